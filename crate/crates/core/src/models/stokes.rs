use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, Domain, PriorSpec, SpectralPrior};

use super::likelihood::ForwardModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservationKind {
    /// Velocity at fixed stations.
    Eulerian,
    /// Positions of passive tracers.
    Lagrangian,
}

/// Stokes flow on the unit torus observed at `obs_times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StokesProblem {
    #[serde(default = "default_viscosity")]
    pub viscosity: f64,
    pub obs_kind: ObservationKind,
    pub obs_times: Vec<f64>,
    /// Station locations (Eulerian) or initial tracer positions (Lagrangian).
    pub positions: Vec<[f64; 2]>,
    #[serde(default = "default_dt")]
    pub euler_dt: f64,
    #[serde(default = "default_sigma")]
    pub noise_sigma: f64,
}

fn default_viscosity() -> f64 {
    0.1
}

fn default_dt() -> f64 {
    0.01
}

fn default_sigma() -> f64 {
    0.01
}

impl StokesProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.viscosity.is_finite() && self.viscosity > 0.0) {
            return Err(Error::invalid("viscosity", format!("must be positive, got {}", self.viscosity)));
        }
        if !(self.euler_dt.is_finite() && self.euler_dt > 0.0) {
            return Err(Error::invalid("euler_dt", format!("must be positive, got {}", self.euler_dt)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma > 0.0) {
            return Err(Error::invalid("noise_sigma", format!("must be positive, got {}", self.noise_sigma)));
        }
        if self.obs_times.first().is_some_and(|&t| !(t >= 0.0)) || self.obs_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("obs_times", "must be nonnegative and strictly increasing"));
        }
        Ok(())
    }

    /// `n` evenly spaced times ending at `t_final`.
    pub fn even_times(n: usize, t_final: f64) -> Vec<f64> {
        (1..=n).map(|k| t_final * k as f64 / n as f64).collect()
    }

    /// `n x n` cell-centred grid of positions.
    pub fn even_grid(n: usize) -> Vec<[f64; 2]> {
        let h = 1.0 / n as f64;
        (0..n)
            .flat_map(|j| (0..n).map(move |i| [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]))
            .collect()
    }
}

/// Prior `N(0, delta A^-alpha)` where `A` is `nu` times the negative Laplacian
/// on mean-zero divergence-free fields.
pub fn stokes_prior(modes: usize, delta: f64, alpha: f64, viscosity: f64) -> Result<SpectralPrior> {
    SpectralPrior::new(PriorSpec {
        alpha,
        scale: delta * (4.0 * PI * PI * viscosity).powf(-alpha),
        modes,
        domain: Domain::Torus,
    })
}

/// Wavevector `2 pi (p, q)` of the torus mode `(p, q)`.
pub fn physical_wavevector(p: i32, q: i32) -> [f64; 2] {
    [2.0 * PI * p as f64, 2.0 * PI * q as f64]
}

/// `exp(-nu |k|^2 t)`.
pub fn decay_factor(k: [f64; 2], viscosity: f64, t: f64) -> f64 {
    (-viscosity * (k[0] * k[0] + k[1] * k[1]) * t).exp()
}

/// Exact spectral evolution of the field coefficients to time `t`.
pub fn stokes_evolve(prior: &SpectralPrior, coefficients: &[f64], viscosity: f64, t: f64) -> Vec<f64> {
    prior
        .modes()
        .iter()
        .zip(coefficients)
        .map(|(m, c)| c * decay_factor(physical_wavevector(m.p, m.q), viscosity, t))
        .collect()
}

/// Wrap a coordinate onto `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Shortest signed displacement on the circle of unit length.
pub fn min_image(d: f64) -> f64 {
    d - d.round()
}

/// Eulerian velocities or Lagrangian positions, flattened as
/// `[time][position][component]`.
#[derive(Debug, Clone)]
pub struct StokesForward {
    prior: SpectralPrior,
    problem: StokesProblem,
    /// Unit divergence-free direction `(-q, p) / |(p, q)|` of each mode.
    directions: Vec<[f64; 2]>,
    /// `nu |k|^2` per mode.
    rates: Vec<f64>,
}

impl StokesForward {
    pub fn new(prior: SpectralPrior, problem: StokesProblem) -> Result<Self> {
        problem.validate()?;
        if prior.domain() != Domain::Torus {
            return Err(Error::invalid("domain", "Stokes flow needs the torus prior"));
        }
        let directions = prior
            .modes()
            .iter()
            .map(|m| {
                let n = (m.norm_sq() as f64).sqrt();
                [-(m.q as f64) / n, m.p as f64 / n]
            })
            .collect();
        let rates = prior
            .modes()
            .iter()
            .map(|m| {
                let k = physical_wavevector(m.p, m.q);
                problem.viscosity * (k[0] * k[0] + k[1] * k[1])
            })
            .collect();
        Ok(Self {
            prior,
            problem,
            directions,
            rates,
        })
    }

    pub fn prior(&self) -> &SpectralPrior {
        &self.prior
    }

    pub fn problem(&self) -> &StokesProblem {
        &self.problem
    }

    pub fn directions(&self) -> &[[f64; 2]] {
        &self.directions
    }

    /// Velocity at `x` for field coefficients already evolved to the time of interest.
    pub fn velocity(&self, coefficients: &[f64], x: [f64; 2]) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (i, &c) in coefficients.iter().enumerate() {
            if c != 0.0 {
                let s = c * self.prior.basis_value(i, x);
                v[0] += s * self.directions[i][0];
                v[1] += s * self.directions[i][1];
            }
        }
        v
    }

    fn evolved(&self, xi: &[f64], t: f64) -> Vec<f64> {
        xi.iter().zip(&self.rates).map(|(c, r)| c * (-r * t).exp()).collect()
    }

    /// Velocities at each station and observation time.
    pub fn eulerian(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        self.prior.check_state(state)?;
        let xi = self.prior.field_coefficients(state);
        let mut out = Vec::with_capacity(2 * self.problem.obs_times.len() * self.problem.positions.len());
        for &t in &self.problem.obs_times {
            let c = self.evolved(&xi, t);
            for &x in &self.problem.positions {
                out.extend(self.velocity(&c, x));
            }
        }
        Ok(out)
    }

    /// Forward-Euler tracer positions (wrapped onto the torus) at each
    /// observation time; the last step before each observation is shortened
    /// to land on it exactly.
    pub fn lagrangian_trace(&self, state: &CoefficientState) -> Result<Vec<Vec<[f64; 2]>>> {
        self.prior.check_state(state)?;
        let xi = self.prior.field_coefficients(state);
        let dt = self.problem.euler_dt;
        let mut z: Vec<[f64; 2]> = self.problem.positions.iter().map(|p| [wrap(p[0]), wrap(p[1])]).collect();
        let mut t = 0.0;
        let mut out = Vec::with_capacity(self.problem.obs_times.len());
        for &t_obs in &self.problem.obs_times {
            while t_obs - t > 1e-12 * dt {
                let h = dt.min(t_obs - t);
                let c = self.evolved(&xi, t);
                for p in z.iter_mut() {
                    let v = self.velocity(&c, *p);
                    *p = [wrap(p[0] + h * v[0]), wrap(p[1] + h * v[1])];
                }
                t += h;
            }
            out.push(z.clone());
        }
        Ok(out)
    }
}

impl ForwardModel for StokesForward {
    fn forward(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        match self.problem.obs_kind {
            ObservationKind::Eulerian => self.eulerian(state),
            ObservationKind::Lagrangian => Ok(self
                .lagrangian_trace(state)?
                .into_iter()
                .flatten()
                .flat_map(|p| p.into_iter())
                .collect()),
        }
    }

    fn difference(&self, observed: f64, predicted: f64) -> f64 {
        match self.problem.obs_kind {
            ObservationKind::Eulerian => observed - predicted,
            ObservationKind::Lagrangian => min_image(observed - predicted),
        }
    }
}
