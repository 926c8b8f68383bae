use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, Domain, SpectralPrior};

use super::banded::SymmetricBand;
use super::likelihood::ForwardModel;

/// Steady groundwater flow `-div(exp(u) grad p) = g` on the unit square with
/// `p = h` on the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarcyProblem {
    /// Cells per side.
    pub grid_size: usize,
    #[serde(default = "default_source")]
    pub source: f64,
    #[serde(default)]
    pub boundary: f64,
    pub measurement_points: Vec<[f64; 2]>,
    #[serde(default = "default_sigma")]
    pub noise_sigma: f64,
}

fn default_source() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    0.01
}

impl DarcyProblem {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 4 {
            return Err(Error::invalid("grid_size", format!("need J >= 4, got {}", self.grid_size)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma > 0.0) {
            return Err(Error::invalid("noise_sigma", format!("must be positive, got {}", self.noise_sigma)));
        }
        if !self.source.is_finite() || !self.boundary.is_finite() {
            return Err(Error::NonFinite("source or boundary value"));
        }
        for p in &self.measurement_points {
            if !p.iter().all(|c| *c > 0.0 && *c < 1.0) {
                return Err(Error::OutsideDomain {
                    point: p.to_vec(),
                    domain: "open unit square".into(),
                });
            }
        }
        Ok(())
    }

    /// `n x n` measurement points on the interior lattice `k / (n + 1)`.
    pub fn lattice_points(n: usize) -> Vec<[f64; 2]> {
        let h = 1.0 / (n + 1) as f64;
        (1..=n)
            .flat_map(|j| (1..=n).map(move |i| [i as f64 * h, j as f64 * h]))
            .collect()
    }
}

/// Nodal head values on the `(J + 1)^2` grid, boundary included, row-major in `x_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadField {
    cells: usize,
    values: Vec<f64>,
}

impl HeadField {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.cells + 1) + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bilinear interpolation.
    pub fn at(&self, point: [f64; 2]) -> f64 {
        let n = self.cells as f64;
        let sx = (point[0] * n).clamp(0.0, n);
        let sy = (point[1] * n).clamp(0.0, n);
        let i = (sx.floor() as usize).min(self.cells - 1);
        let j = (sy.floor() as usize).min(self.cells - 1);
        let (tx, ty) = (sx - i as f64, sy - j as f64);
        (1.0 - tx) * (1.0 - ty) * self.node(i, j)
            + tx * (1.0 - ty) * self.node(i + 1, j)
            + (1.0 - tx) * ty * self.node(i, j + 1)
            + tx * ty * self.node(i + 1, j + 1)
    }

    /// Largest nodal deviation from `exact`.
    pub fn max_error(&self, exact: impl Fn([f64; 2]) -> f64) -> f64 {
        let h = 1.0 / self.cells as f64;
        (0..=self.cells)
            .flat_map(|j| (0..=self.cells).map(move |i| (i, j)))
            .map(|(i, j)| (self.node(i, j) - exact([i as f64 * h, j as f64 * h])).abs())
            .fold(0.0, f64::max)
    }
}

/// Face-midpoint locations: first the `x`-faces `((i + 1/2) h, j h)` for
/// interior rows, then the `y`-faces `(i h, (j + 1/2) h)` for interior columns.
fn face_points(cells: usize) -> Vec<[f64; 2]> {
    let h = 1.0 / cells as f64;
    let x_faces = (1..cells).flat_map(move |j| (0..cells).map(move |i| [(i as f64 + 0.5) * h, j as f64 * h]));
    let y_faces = (0..cells).flat_map(move |j| (1..cells).map(move |i| [i as f64 * h, (j as f64 + 0.5) * h]));
    x_faces.chain(y_faces).collect()
}

/// Five-point finite-volume solve with permeability `exp(u)` sampled at
/// face midpoints (`log_perm` in [`face_points`] order) and a nodal source.
fn solve_faces(cells: usize, log_perm: &[f64], source: impl Fn([f64; 2]) -> f64, boundary: f64) -> Result<HeadField> {
    let m = cells - 1;
    let h = 1.0 / cells as f64;
    let inv_h2 = 1.0 / (h * h);
    if log_perm.iter().any(|u| !u.is_finite()) {
        return Err(Error::NonFinite("log-permeability"));
    }
    let kx = |i: usize, j: usize| log_perm[(j - 1) * cells + i].exp();
    let y_offset = cells * m;
    let ky = |i: usize, j: usize| log_perm[y_offset + j * m + (i - 1)].exp();
    let unknown = |i: usize, j: usize| (j - 1) * m + (i - 1);

    let mut a = SymmetricBand::zeros(m * m, m);
    let mut rhs = vec![0.0; m * m];
    for j in 1..cells {
        for i in 1..cells {
            let row = unknown(i, j);
            let east = kx(i, j) * inv_h2;
            let west = kx(i - 1, j) * inv_h2;
            let north = ky(i, j) * inv_h2;
            let south = ky(i, j - 1) * inv_h2;
            a.add(row, row, east + west + north + south);
            rhs[row] += source([i as f64 * h, j as f64 * h]);
            if i + 1 < cells {
                a.add(unknown(i + 1, j), row, -east);
            } else {
                rhs[row] += east * boundary;
            }
            if i == 1 {
                rhs[row] += west * boundary;
            }
            if j + 1 < cells {
                a.add(unknown(i, j + 1), row, -north);
            } else {
                rhs[row] += north * boundary;
            }
            if j == 1 {
                rhs[row] += south * boundary;
            }
        }
    }
    let p = a.factorize()?.solve(&rhs);
    let mut values = vec![boundary; (cells + 1) * (cells + 1)];
    for j in 1..cells {
        for i in 1..cells {
            values[j * (cells + 1) + i] = p[unknown(i, j)];
        }
    }
    Ok(HeadField { cells, values })
}

/// Solve with log-permeability `log_perm(x)` and a general source term.
pub fn darcy_solve_with(
    cells: usize,
    log_perm: impl Fn([f64; 2]) -> f64,
    source: impl Fn([f64; 2]) -> f64,
    boundary: f64,
) -> Result<HeadField> {
    if cells < 4 {
        return Err(Error::invalid("grid_size", format!("need J >= 4, got {cells}")));
    }
    let u: Vec<f64> = face_points(cells).into_iter().map(log_perm).collect();
    solve_faces(cells, &u, source, boundary)
}

/// Solve the problem's PDE for the log-permeability `log_perm`.
pub fn darcy_solve(log_perm: impl Fn([f64; 2]) -> f64, problem: &DarcyProblem) -> Result<HeadField> {
    problem.validate()?;
    let g = problem.source;
    darcy_solve_with(problem.grid_size, log_perm, |_| g, problem.boundary)
}

/// Heads at the measurement points as a function of the KL coefficients of
/// the log-permeability.
#[derive(Debug, Clone)]
pub struct DarcyForward {
    prior: SpectralPrior,
    problem: DarcyProblem,
    /// `face_basis[i][f]`: basis function `i` at face midpoint `f`.
    face_basis: Vec<Vec<f64>>,
}

impl DarcyForward {
    pub fn new(prior: SpectralPrior, problem: DarcyProblem) -> Result<Self> {
        problem.validate()?;
        if prior.domain() != Domain::UnitSquare {
            return Err(Error::invalid("domain", "groundwater flow needs the unit-square prior"));
        }
        let face_basis = prior.basis_matrix(&face_points(problem.grid_size))?;
        Ok(Self {
            prior,
            problem,
            face_basis,
        })
    }

    pub fn prior(&self) -> &SpectralPrior {
        &self.prior
    }

    pub fn problem(&self) -> &DarcyProblem {
        &self.problem
    }

    pub fn solve(&self, state: &CoefficientState) -> Result<HeadField> {
        self.prior.check_state(state)?;
        let xi = self.prior.field_coefficients(state);
        let mut u = vec![0.0; self.face_basis.first().map_or(0, Vec::len)];
        for (row, &x) in self.face_basis.iter().zip(&xi) {
            if x != 0.0 {
                for (uf, b) in u.iter_mut().zip(row) {
                    *uf += x * b;
                }
            }
        }
        let g = self.problem.source;
        solve_faces(self.problem.grid_size, &u, |_| g, self.problem.boundary)
    }
}

impl ForwardModel for DarcyForward {
    fn forward(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        let head = self.solve(state)?;
        Ok(self.problem.measurement_points.iter().map(|&p| head.at(p)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::{sample_prior, PriorSpec};
    use crate::models::GaussianLikelihood;
    use crate::rng::stream;
    use crate::samplers::Target;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn manufactured_error(cells: usize) -> f64 {
        let exact = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
        let head = darcy_solve_with(cells, |_| 0.0, |x| 2.0 * PI * PI * exact(x), 0.0).unwrap();
        head.max_error(exact)
    }

    #[test]
    fn second_order_convergence() {
        let e: Vec<f64> = [16, 32, 64].iter().map(|&j| manufactured_error(j)).collect();
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn constant_permeability_scaling() {
        let unit = darcy_solve_with(16, |_| 0.0, |_| 1.0, 0.0).unwrap();
        let tenth = darcy_solve_with(16, |_| (0.1f64).ln(), |_| 1.0, 0.0).unwrap();
        for (a, b) in unit.values().iter().zip(tenth.values()) {
            assert_relative_eq!(10.0 * a, *b, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_boundary_without_source() {
        let head = darcy_solve_with(12, |x| (3.0 * x[0]).sin(), |_| 0.0, 2.5).unwrap();
        for v in head.values() {
            assert_relative_eq!(*v, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn maximum_principle() {
        let prior = SpectralPrior::new(PriorSpec {
            alpha: 2.0,
            scale: 1.0,
            modes: 20,
            domain: Domain::UnitSquare,
        })
        .unwrap();
        let problem = DarcyProblem {
            grid_size: 16,
            source: 1.0,
            boundary: 0.0,
            measurement_points: vec![[0.5, 0.5]],
            noise_sigma: 0.01,
        };
        let fwd = DarcyForward::new(prior, problem).unwrap();
        let mut rng = stream(5, 0);
        for _ in 0..5 {
            let s = sample_prior(fwd.prior(), &mut rng);
            assert!(fwd.solve(&s).unwrap().values().iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn potential_composition() {
        let prior = SpectralPrior::new(PriorSpec {
            alpha: 2.0,
            scale: 1.0,
            modes: 5,
            domain: Domain::UnitSquare,
        })
        .unwrap();
        let problem = DarcyProblem {
            grid_size: 8,
            source: 1.0,
            boundary: 0.0,
            measurement_points: vec![[0.3, 0.6]],
            noise_sigma: 0.05,
        };
        let fwd = DarcyForward::new(prior, problem.clone()).unwrap();
        // constant field: only the constant mode, u = 0.7
        let mut z = vec![0.0; 5];
        z[0] = 0.7;
        let s = CoefficientState::new(z);
        let head = darcy_solve(|_| 0.7, &problem).unwrap();
        let pred = head.at([0.3, 0.6]);
        let like = GaussianLikelihood::new(fwd.clone(), vec![0.2], 0.05).unwrap();
        assert_relative_eq!(
            like.potential(&s).unwrap(),
            0.5 * (0.2 - pred).powi(2) / 0.0025,
            max_relative = 1e-12
        );
        let exact = GaussianLikelihood::new(fwd.clone(), fwd.forward(&s).unwrap(), 0.05).unwrap();
        assert_eq!(exact.potential(&s).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_problems() {
        let bad = DarcyProblem {
            grid_size: 3,
            source: 1.0,
            boundary: 0.0,
            measurement_points: vec![],
            noise_sigma: 0.01,
        };
        assert!(bad.validate().is_err());
        let edge = DarcyProblem {
            grid_size: 8,
            measurement_points: vec![[1.0, 0.5]],
            ..bad
        };
        assert!(matches!(edge.validate(), Err(Error::OutsideDomain { .. })));
    }
}
