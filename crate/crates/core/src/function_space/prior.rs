use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::state::CoefficientState;
use crate::error::{Error, Result};

/// Index set of the random field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    /// `[-half_width, half_width]` with the real Fourier basis of period `2 * half_width`.
    Interval { half_width: f64 },
    /// `[0, 1]^2`, including the constant mode.
    UnitSquare,
    /// Periodic `[0, 1)^2` restricted to mean-zero fields (no constant mode).
    Torus,
}

impl Domain {
    pub fn dims(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::UnitSquare | Domain::Torus => 2,
        }
    }

    /// Exponent `s` in the planar variance weight `(p^2 + q^2)^(-s)`. On the
    /// square `alpha` divides the coefficient standard deviation; on the
    /// torus it is the power of the covariance operator.
    pub fn planar_exponent(&self, alpha: f64) -> f64 {
        match self {
            Domain::UnitSquare => 2.0 * alpha,
            _ => alpha,
        }
    }
}

/// Parameters of a [`SpectralPrior`].
///
/// Eigenvalues are `lambda_i^2 = scale * w_i` where `w_i = i^(-2 alpha)` in one
/// dimension (so `lambda_i` decays like `i^(-alpha)`). For a wavevector
/// `(p, q)` the weight is `(p^2 + q^2)^(-2 alpha)` on the unit square and
/// `(p^2 + q^2)^(-alpha)` on the torus; the constant mode has weight 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub alpha: f64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    pub modes: usize,
    pub domain: Domain,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Constant,
    Cos,
    Sin,
}

/// One basis function. In one dimension `q == 0` and `p` is the frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub p: i32,
    pub q: i32,
    pub wave: Wave,
}

impl Mode {
    /// Squared integer wavenumber `p^2 + q^2`.
    pub fn norm_sq(&self) -> i64 {
        let (p, q) = (self.p as i64, self.q as i64);
        p * p + q * q
    }
}

/// Points at which fields can be evaluated: `f64` in one dimension,
/// `[f64; 2]` in two.
pub trait Location: Copy + Send + Sync {
    const DIMS: usize;
    fn coords(self) -> [f64; 2];
}

impl Location for f64 {
    const DIMS: usize = 1;
    fn coords(self) -> [f64; 2] {
        [self, 0.0]
    }
}

impl Location for [f64; 2] {
    const DIMS: usize = 2;
    fn coords(self) -> [f64; 2] {
        self
    }
}

/// Gaussian measure `N(0, C)` diagonalized in a real Fourier basis.
///
/// Mode ordering is canonical: in one dimension `i = 1, 2, ...` runs over the
/// constant, then `cos(k pi x / l)`, `sin(k pi x / l)` for `k = 1, 2, ...`; in
/// two dimensions wavevectors of the half plane are sorted by `p^2 + q^2`, ties
/// broken lexicographically in `(p, q)`, each contributing a cosine then a sine.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPrior {
    spec: PriorSpec,
    modes: Vec<Mode>,
    std_devs: Vec<f64>,
}

impl SpectralPrior {
    pub fn new(spec: PriorSpec) -> Result<Self> {
        if spec.modes == 0 {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        if !(spec.scale.is_finite() && spec.scale > 0.0) {
            return Err(Error::invalid("scale", format!("must be positive, got {}", spec.scale)));
        }
        if !spec.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        match spec.domain {
            Domain::Interval { half_width } => {
                if !(half_width.is_finite() && half_width > 0.0) {
                    return Err(Error::invalid("half_width", "must be positive"));
                }
                // sum of i^(-2 alpha) converges iff 2 alpha > 1
                if 2.0 * spec.alpha <= 1.0 {
                    return Err(Error::invalid(
                        "alpha",
                        format!(
                            "trace-class rule violated: 1-D eigenvalues i^(-2 alpha) are summable only for alpha > 0.5, got {}",
                            spec.alpha
                        ),
                    ));
                }
            }
            Domain::UnitSquare | Domain::Torus => {
                // planar lattice sums of |k|^(-2 s) converge iff s > 1, where
                // s = 2 alpha on the square and s = alpha on the torus
                let exponent = spec.domain.planar_exponent(spec.alpha);
                if exponent <= 1.0 {
                    return Err(Error::invalid(
                        "alpha",
                        format!(
                            "trace-class rule violated: 2-D eigenvalues (p^2+q^2)^(-{exponent}) are not summable (alpha = {})",
                            spec.alpha
                        ),
                    ));
                }
            }
        }

        let modes = match spec.domain {
            Domain::Interval { .. } => interval_modes(spec.modes),
            Domain::UnitSquare => planar_modes(spec.modes, true),
            Domain::Torus => planar_modes(spec.modes, false),
        };
        let std_devs = modes
            .iter()
            .enumerate()
            .map(|(j, mode)| {
                let weight = match spec.domain {
                    Domain::Interval { .. } => ((j + 1) as f64).powf(-2.0 * spec.alpha),
                    _ if mode.wave == Wave::Constant => 1.0,
                    _ => (mode.norm_sq() as f64).powf(-spec.domain.planar_exponent(spec.alpha)),
                };
                (spec.scale * weight).sqrt()
            })
            .collect();
        Ok(Self { spec, modes, std_devs })
    }

    pub fn one_d(alpha: f64, scale: f64, modes: usize, half_width: f64) -> Result<Self> {
        Self::new(PriorSpec {
            alpha,
            scale,
            modes,
            domain: Domain::Interval { half_width },
        })
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    pub fn mode_count(&self) -> usize {
        self.spec.modes
    }

    pub fn dims(&self) -> usize {
        self.spec.domain.dims()
    }

    pub fn domain(&self) -> Domain {
        self.spec.domain
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Standard deviations `lambda_i` of the field coefficients.
    pub fn std_devs(&self) -> &[f64] {
        &self.std_devs
    }

    /// First `n` eigenvalues `lambda_i^2` in canonical order.
    pub fn eigenvalues(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 || n > self.mode_count() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.mode_count(),
            });
        }
        Ok(self.std_devs[..n].iter().map(|s| s * s).collect())
    }

    /// Sum of the retained eigenvalues.
    pub fn trace(&self) -> f64 {
        self.std_devs.iter().map(|s| s * s).sum()
    }

    pub fn contains(&self, coords: [f64; 2]) -> bool {
        if !(coords[0].is_finite() && coords[1].is_finite()) {
            return false;
        }
        match self.spec.domain {
            Domain::Interval { half_width } => {
                let tol = 1e-12 * half_width;
                coords[0].abs() <= half_width + tol
            }
            Domain::UnitSquare => {
                let inside = |c: f64| (-1e-12..=1.0 + 1e-12).contains(&c);
                inside(coords[0]) && inside(coords[1])
            }
            Domain::Torus => true,
        }
    }

    pub(crate) fn check_point<L: Location>(&self, point: L) -> Result<[f64; 2]> {
        if L::DIMS != self.dims() {
            return Err(Error::invalid(
                "grid",
                format!("{}-D points given to a {}-D prior", L::DIMS, self.dims()),
            ));
        }
        let c = point.coords();
        if !self.contains(c) {
            return Err(Error::OutsideDomain {
                point: c[..L::DIMS].to_vec(),
                domain: format!("{:?}", self.spec.domain),
            });
        }
        Ok(c)
    }

    /// Value of basis function `index` (0-based) at a point. No domain check.
    pub fn basis_value(&self, index: usize, coords: [f64; 2]) -> f64 {
        let mode = self.modes[index];
        match self.spec.domain {
            Domain::Interval { half_width } => {
                let l = half_width;
                let arg = mode.p as f64 * PI * coords[0] / l;
                match mode.wave {
                    Wave::Constant => 1.0 / (2.0 * l).sqrt(),
                    Wave::Cos => arg.cos() / l.sqrt(),
                    Wave::Sin => arg.sin() / l.sqrt(),
                }
            }
            Domain::UnitSquare | Domain::Torus => {
                let arg = 2.0 * PI * (mode.p as f64 * coords[0] + mode.q as f64 * coords[1]);
                match mode.wave {
                    Wave::Constant => 1.0,
                    Wave::Cos => std::f64::consts::SQRT_2 * arg.cos(),
                    Wave::Sin => std::f64::consts::SQRT_2 * arg.sin(),
                }
            }
        }
    }

    /// Masked field coefficients `xi_i = lambda_i z_i` (zero on inactive modes).
    pub fn field_coefficients(&self, state: &CoefficientState) -> Vec<f64> {
        state
            .z()
            .iter()
            .zip(&self.std_devs)
            .enumerate()
            .map(|(i, (z, s))| if state.is_active(i) { s * z } else { 0.0 })
            .collect()
    }

    /// Basis functions evaluated on a grid, stored mode-major:
    /// `out[i][k] = phi_i(grid[k])`.
    pub fn basis_matrix<L: Location>(&self, grid: &[L]) -> Result<Vec<Vec<f64>>> {
        let coords = grid
            .iter()
            .map(|&p| self.check_point(p))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.mode_count())
            .map(|i| coords.iter().map(|&c| self.basis_value(i, c)).collect())
            .collect())
    }

    pub(crate) fn check_state(&self, state: &CoefficientState) -> Result<()> {
        if state.len() != self.mode_count() {
            return Err(Error::invalid(
                "state",
                format!("has {} coefficients, prior has {} modes", state.len(), self.mode_count()),
            ));
        }
        Ok(())
    }
}

fn interval_modes(n: usize) -> Vec<Mode> {
    (0..n)
        .map(|j| {
            if j == 0 {
                Mode { p: 0, q: 0, wave: Wave::Constant }
            } else {
                let k = ((j + 1) / 2) as i32;
                let wave = if j % 2 == 1 { Wave::Cos } else { Wave::Sin };
                Mode { p: k, q: 0, wave }
            }
        })
        .collect()
}

fn planar_modes(n: usize, with_constant: bool) -> Vec<Mode> {
    let radius = (n as f64).sqrt().ceil() as i32 + 2;
    let mut wavevectors: Vec<(i32, i32)> = (0..=radius)
        .flat_map(|p| (-radius..=radius).map(move |q| (p, q)))
        .filter(|&(p, q)| p > 0 || (p == 0 && q > 0))
        .filter(|&(p, q)| p * p + q * q <= radius * radius)
        .collect();
    wavevectors.sort_by_key(|&(p, q)| (p * p + q * q, p, q));

    let mut modes = Vec::with_capacity(n);
    if with_constant {
        modes.push(Mode { p: 0, q: 0, wave: Wave::Constant });
    }
    for (p, q) in wavevectors {
        for wave in [Wave::Cos, Wave::Sin] {
            if modes.len() == n {
                return modes;
            }
            modes.push(Mode { p, q, wave });
        }
    }
    modes.truncate(n);
    modes
}

/// Exact draw from the prior: independent standard normal whitened coefficients.
pub fn sample_prior<R: Rng + ?Sized>(prior: &SpectralPrior, rng: &mut R) -> CoefficientState {
    let z = (0..prior.mode_count()).map(|_| rng.sample(StandardNormal)).collect();
    CoefficientState::new(z)
}

/// Evaluate `u(x) = sum over active i of lambda_i z_i phi_i(x)` on `grid`.
pub fn synthesize<L: Location>(
    prior: &SpectralPrior,
    state: &CoefficientState,
    grid: &[L],
) -> Result<Vec<f64>> {
    prior.check_state(state)?;
    let xi = prior.field_coefficients(state);
    grid.iter()
        .map(|&point| {
            let c = prior.check_point(point)?;
            Ok(xi
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .map(|(i, x)| x * prior.basis_value(i, c))
                .sum())
        })
        .collect()
}
