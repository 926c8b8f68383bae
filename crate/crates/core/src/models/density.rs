use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, Domain, SpectralPrior};
use crate::samplers::Target;

/// Observations on `[-ell, ell]` and the quadrature resolution used for the
/// normalizing constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityData {
    pub observations: Vec<f64>,
    #[serde(default = "default_ell")]
    pub ell: f64,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
}

fn default_ell() -> f64 {
    10.0
}

fn default_quad_points() -> usize {
    1025
}

impl DensityData {
    pub fn new(observations: Vec<f64>, ell: f64) -> Self {
        Self {
            observations,
            ell,
            quad_points: default_quad_points(),
        }
    }
}

/// Composite trapezoid rule on `points` equispaced nodes of `[-ell, ell]`.
pub fn trapezoid_grid(ell: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * ell / (points - 1) as f64;
    let nodes = (0..points).map(|k| -ell + k as f64 * h).collect();
    let weights = (0..points)
        .map(|k| if k == 0 || k == points - 1 { 0.5 * h } else { h })
        .collect();
    (nodes, weights)
}

/// Nonparametric density estimation: `rho = exp(u) / ∫ exp(u)` and
/// `Phi(u) = -Σ_j ln rho(y_j)`.
#[derive(Debug, Clone)]
pub struct DensityTarget {
    prior: SpectralPrior,
    data: DensityData,
    log_weights: Vec<f64>,
    /// `basis[i][k] = phi_i(x_k)` on the quadrature nodes.
    basis: Vec<Vec<f64>>,
    /// `obs_sums[i] = Σ_j phi_i(y_j)`, with the same linear interpolation as `u(y_j)`.
    obs_sums: Vec<f64>,
}

impl DensityTarget {
    pub fn new(prior: SpectralPrior, data: DensityData) -> Result<Self> {
        let ell = match prior.domain() {
            Domain::Interval { half_width } => half_width,
            other => return Err(Error::invalid("domain", format!("density estimation needs an interval, got {other:?}"))),
        };
        if (ell - data.ell).abs() > 1e-12 * ell {
            return Err(Error::invalid("ell", format!("data half-width {} differs from prior {}", data.ell, ell)));
        }
        if data.quad_points < 3 {
            return Err(Error::invalid("quad_points", "need at least 3 quadrature points"));
        }
        for &y in &data.observations {
            if !(y.is_finite() && y.abs() <= ell) {
                return Err(Error::OutsideDomain {
                    point: vec![y],
                    domain: format!("[-{ell}, {ell}]"),
                });
            }
        }
        let (nodes, weights) = trapezoid_grid(ell, data.quad_points);
        let basis = prior.basis_matrix(&nodes)?;
        let mut interp = vec![0.0; nodes.len()];
        let h = 2.0 * ell / (data.quad_points - 1) as f64;
        for &y in &data.observations {
            let s = ((y + ell) / h).clamp(0.0, (data.quad_points - 1) as f64);
            let k = (s.floor() as usize).min(data.quad_points - 2);
            let t = s - k as f64;
            interp[k] += 1.0 - t;
            interp[k + 1] += t;
        }
        let obs_sums = basis
            .iter()
            .map(|row| row.iter().zip(&interp).map(|(b, c)| b * c).sum())
            .collect();
        Ok(Self {
            prior,
            data,
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            basis,
            obs_sums,
        })
    }

    pub fn prior(&self) -> &SpectralPrior {
        &self.prior
    }

    pub fn data(&self) -> &DensityData {
        &self.data
    }

    /// Field values on the quadrature nodes.
    pub fn field_on_grid(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        self.prior.check_state(state)?;
        let xi = self.prior.field_coefficients(state);
        let mut u = vec![0.0; self.log_weights.len()];
        for (row, &x) in self.basis.iter().zip(&xi) {
            if x != 0.0 {
                for (uk, b) in u.iter_mut().zip(row) {
                    *uk += x * b;
                }
            }
        }
        Ok(u)
    }

    /// `ln ∫ exp(u)` by the trapezoid rule, and the normalized quadrature
    /// masses `w_k exp(u_k) / Z`.
    fn log_normalizer(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let a: Vec<f64> = u.iter().zip(&self.log_weights).map(|(x, lw)| x + lw).collect();
        let m = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mass: Vec<f64> = a.iter().map(|x| (x - m).exp()).collect();
        let total: f64 = mass.iter().sum();
        (m + total.ln(), mass.into_iter().map(|p| p / total).collect())
    }

    fn data_term(&self, state: &CoefficientState) -> f64 {
        self.prior
            .field_coefficients(state)
            .iter()
            .zip(&self.obs_sums)
            .map(|(x, s)| x * s)
            .sum()
    }
}

impl Target for DensityTarget {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        let u = self.field_on_grid(state)?;
        let (log_z, _) = self.log_normalizer(&u);
        let phi = self.data.observations.len() as f64 * log_z - self.data_term(state);
        if phi.is_finite() {
            Ok(phi)
        } else {
            Err(Error::NonFinite("density potential"))
        }
    }

    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        let u = match self.field_on_grid(state) {
            Ok(u) => u,
            Err(e) => return Some(Err(e)),
        };
        let (_, masses) = self.log_normalizer(&u);
        let dy = self.data.observations.len() as f64;
        let lambdas = self.prior.std_devs();
        let grad = (0..state.len())
            .map(|i| {
                if !state.is_active(i) {
                    return 0.0;
                }
                let mean: f64 = self.basis[i].iter().zip(&masses).map(|(b, p)| b * p).sum();
                lambdas[i] * (dy * mean - self.obs_sums[i])
            })
            .collect();
        Some(Ok(grad))
    }
}

/// The two reference densities on `(-ell, ell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrueDensity {
    /// Equal mixture of `N(-3, 1)` and `N(3, 1)`.
    Bimodal,
    /// Proportional to `exp(sin(15 pi x / ell))`.
    Oscillatory,
}

impl TrueDensity {
    /// Unnormalized log density.
    pub fn log_density(self, x: f64, ell: f64) -> f64 {
        match self {
            TrueDensity::Bimodal => {
                let a = -0.5 * (x + 3.0) * (x + 3.0);
                let b = -0.5 * (x - 3.0) * (x - 3.0);
                let m = a.max(b);
                m + ((a - m).exp() + (b - m).exp()).ln()
            }
            TrueDensity::Oscillatory => (15.0 * std::f64::consts::PI * x / ell).sin(),
        }
    }

    /// `n` independent draws by inverting the piecewise-linear CDF built on
    /// `grid_points` nodes.
    pub fn sample<R: Rng + ?Sized>(self, n: usize, ell: f64, grid_points: usize, rng: &mut R) -> Vec<f64> {
        let (nodes, _) = trapezoid_grid(ell, grid_points.max(3));
        let dens: Vec<f64> = nodes.iter().map(|&x| self.log_density(x, ell).exp()).collect();
        let mut cdf = vec![0.0; nodes.len()];
        for k in 1..nodes.len() {
            cdf[k] = cdf[k - 1] + 0.5 * (dens[k] + dens[k - 1]) * (nodes[k] - nodes[k - 1]);
        }
        let total = cdf[cdf.len() - 1];
        (0..n)
            .map(|_| {
                let target = rng.random::<f64>() * total;
                let k = cdf.partition_point(|&c| c < target).clamp(1, nodes.len() - 1);
                let (c0, c1) = (cdf[k - 1], cdf[k]);
                let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
                nodes[k - 1] + t * (nodes[k] - nodes[k - 1])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::sample_prior;
    use crate::rng::stream;
    use crate::samplers::finite_difference_gradient;
    use approx::assert_relative_eq;

    fn target(obs: Vec<f64>, modes: usize) -> DensityTarget {
        let prior = SpectralPrior::one_d(2.0, 1.0, modes, 10.0).unwrap();
        DensityTarget::new(prior, DensityData::new(obs, 10.0)).unwrap()
    }

    #[test]
    fn quadrature_weights_sum_to_length() {
        let (_, w) = trapezoid_grid(10.0, 1025);
        assert_relative_eq!(w.iter().sum::<f64>(), 20.0, epsilon = 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn zero_field_is_uniform() {
        let t = target(vec![1.3], 8);
        let phi = t.potential(&CoefficientState::new(vec![0.0; 8])).unwrap();
        assert_relative_eq!(phi, 20f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(phi, 2.9957, epsilon = 1e-4);
    }

    #[test]
    fn constant_shift_leaves_potential_unchanged() {
        let t = target(vec![-2.0, 0.5, 4.0], 8);
        let mut s = sample_prior(t.prior(), &mut stream(1, 0));
        let a = t.potential(&s).unwrap();
        s.z_mut()[0] += 3.7;
        assert_relative_eq!(t.potential(&s).unwrap(), a, epsilon = 1e-11);
    }

    #[test]
    fn single_mode_matches_hand_quadrature() {
        // observation on a node, only the first cosine active
        let (nodes, _) = trapezoid_grid(10.0, 1025);
        let y = nodes[300];
        let t = target(vec![y], 4);
        let mut z = vec![0.0; 4];
        z[1] = 0.9;
        let s = CoefficientState::new(z);
        let lam = t.prior().std_devs()[1];
        let u = |x: f64| 0.9 * lam * (std::f64::consts::PI * x / 10.0).cos() / 10f64.sqrt();
        let h = 20.0 / 1024.0;
        let mut integral = 0.0;
        for k in 0..1025 {
            let x = -10.0 + k as f64 * h;
            let w = if k == 0 || k == 1024 { 0.5 } else { 1.0 };
            integral += w * h * u(x).exp();
        }
        let expect = -(u(y) - integral.ln());
        assert_relative_eq!(t.potential(&s).unwrap(), expect, epsilon = 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let obs = TrueDensity::Bimodal.sample(40, 10.0, 2049, &mut stream(2, 0));
        let t = target(obs, 12);
        let mut rng = stream(3, 0);
        for _ in 0..10 {
            let s = sample_prior(t.prior(), &mut rng);
            let g = t.gradient(&s).unwrap().unwrap();
            let fd = finite_difference_gradient(&t, &s, 1e-5).unwrap();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-5 * norm.max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_gradient_entries_vanish() {
        let t = target(vec![-2.0, 2.0], 6);
        let g = t.gradient(&CoefficientState::new(vec![0.0; 6])).unwrap().unwrap();
        // constant mode and the odd (sine) modes
        assert!(g[0].abs() < 1e-12);
        assert!(g[2].abs() < 1e-12 && g[4].abs() < 1e-12);
    }

    #[test]
    fn rejects_observations_outside() {
        let prior = SpectralPrior::one_d(2.0, 1.0, 4, 10.0).unwrap();
        assert!(matches!(
            DensityTarget::new(prior, DensityData::new(vec![10.5], 10.0)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn inverse_cdf_draws_match_moments() {
        let n = 20_000;
        let draws = TrueDensity::Bimodal.sample(n, 10.0, 4097, &mut stream(4, 0));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| x * x).sum::<f64>() / n as f64 - mean * mean;
        assert!(mean.abs() < 3.0 * (10.0 / n as f64).sqrt());
        assert!((var - 10.0).abs() < 0.3, "{var}");
        assert!(draws.iter().all(|x| x.abs() <= 10.0));
    }
}
