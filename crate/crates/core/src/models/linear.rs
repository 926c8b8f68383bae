use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, SpectralPrior};
use crate::samplers::{GaussianMisfit, Target};

use super::likelihood::ForwardModel;

/// `y_i = h_i xi_i + noise` on the first `m` modes: a target whose posterior
/// is known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearGaussianTarget {
    weights: Vec<f64>,
    std_devs: Vec<f64>,
    noise_variance: f64,
    data: Vec<f64>,
}

/// Posterior mean and variance of one whitened coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePosterior {
    pub mean: f64,
    pub variance: f64,
}

impl LinearGaussianTarget {
    pub fn new(prior: &SpectralPrior, weights: Vec<f64>, noise_variance: f64, data: Vec<f64>) -> Result<Self> {
        if weights.len() > prior.mode_count() {
            return Err(Error::OutOfRange {
                index: weights.len(),
                max: prior.mode_count(),
            });
        }
        if data.len() != weights.len() {
            return Err(Error::invalid("data", format!("expected {} values, got {}", weights.len(), data.len())));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::invalid("noise_variance", format!("must be positive, got {noise_variance}")));
        }
        Ok(Self {
            std_devs: prior.std_devs()[..weights.len()].to_vec(),
            weights,
            noise_variance,
            data,
        })
    }

    pub fn observed_modes(&self) -> usize {
        self.weights.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        if data.len() != self.data.len() {
            return Err(Error::invalid("data", format!("expected {} values, got {}", self.data.len(), data.len())));
        }
        Ok(Self { data, ..self.clone() })
    }

    fn gain(&self, i: usize) -> f64 {
        self.weights[i] * self.std_devs[i]
    }

    /// Conjugate posterior of each observed whitened coordinate; unobserved
    /// modes keep the standard normal prior.
    pub fn posterior_oracle(&self) -> Vec<ModePosterior> {
        (0..self.observed_modes())
            .map(|i| {
                let g = self.gain(i);
                let variance = 1.0 / (1.0 + g * g / self.noise_variance);
                ModePosterior {
                    mean: variance * g * self.data[i] / self.noise_variance,
                    variance,
                }
            })
            .collect()
    }
}

impl ForwardModel for LinearGaussianTarget {
    fn forward(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        if state.len() < self.observed_modes() {
            return Err(Error::OutOfRange {
                index: self.observed_modes(),
                max: state.len(),
            });
        }
        Ok((0..self.observed_modes())
            .map(|i| if state.is_active(i) { self.gain(i) * state.z()[i] } else { 0.0 })
            .collect())
    }
}

impl GaussianMisfit for LinearGaussianTarget {
    fn residual(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        let g = self.forward(state)?;
        Ok(self.data.iter().zip(g).map(|(y, p)| y - p).collect())
    }

    fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    fn data_dim(&self) -> usize {
        self.data.len()
    }
}

impl Target for LinearGaussianTarget {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        let r = self.residual(state)?;
        Ok(0.5 * r.iter().map(|x| x * x).sum::<f64>() / self.noise_variance)
    }

    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        let r = match self.residual(state) {
            Ok(r) => r,
            Err(e) => return Some(Err(e)),
        };
        let mut g = vec![0.0; state.len()];
        for (i, ri) in r.iter().enumerate() {
            if state.is_active(i) {
                g[i] = -ri * self.gain(i) / self.noise_variance;
            }
        }
        Some(Ok(g))
    }
}
