use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::CoefficientState;

use super::target::{GaussianMisfit, Target};

/// Gamma(shape, rate) prior on the noise precision `tau = sigma^-2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionHyperprior {
    pub alpha_sigma: f64,
    pub beta_sigma: f64,
}

impl PrecisionHyperprior {
    pub fn new(alpha_sigma: f64, beta_sigma: f64) -> Result<Self> {
        let h = Self { alpha_sigma, beta_sigma };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha_sigma", self.alpha_sigma), ("beta_sigma", self.beta_sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Posterior shape and rate given a residual.
    pub fn posterior(&self, residual: &[f64]) -> (f64, f64) {
        let half_sq = 0.5 * residual.iter().map(|r| r * r).sum::<f64>();
        (self.alpha_sigma + 0.5 * residual.len() as f64, self.beta_sigma + half_sq)
    }
}

/// Conjugate Gibbs draw of the noise precision.
pub fn sample_precision<M: GaussianMisfit + ?Sized, R: Rng + ?Sized>(
    misfit: &M,
    state: &CoefficientState,
    hyper: &PrecisionHyperprior,
    rng: &mut R,
) -> Result<f64> {
    hyper.validate()?;
    let (shape, rate) = hyper.posterior(&misfit.residual(state)?);
    let gamma = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::invalid("precision", e.to_string()))?;
    Ok(gamma.sample(rng))
}

/// Negative log marginal likelihood with the precision integrated out, up to
/// an additive constant.
pub fn marginal_potential<M: GaussianMisfit + ?Sized>(
    misfit: &M,
    hyper: &PrecisionHyperprior,
    state: &CoefficientState,
) -> Result<f64> {
    let (shape, rate) = hyper.posterior(&misfit.residual(state)?);
    Ok(shape * rate.ln())
}

/// `Phi = tau |r|^2 / 2` at a fixed precision `tau`.
#[derive(Debug, Clone)]
pub struct ScaledMisfitTarget<M> {
    pub misfit: M,
    pub precision: f64,
}

impl<M: GaussianMisfit> ScaledMisfitTarget<M> {
    pub fn new(misfit: M, precision: f64) -> Self {
        Self { misfit, precision }
    }
}

impl<M: GaussianMisfit> Target for ScaledMisfitTarget<M> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        let r = self.misfit.residual(state)?;
        Ok(0.5 * self.precision * r.iter().map(|x| x * x).sum::<f64>())
    }
}

/// Potential of the precision-marginalized posterior.
#[derive(Debug, Clone)]
pub struct MarginalMisfitTarget<M> {
    pub misfit: M,
    pub hyper: PrecisionHyperprior,
}

impl<M: GaussianMisfit> MarginalMisfitTarget<M> {
    pub fn new(misfit: M, hyper: PrecisionHyperprior) -> Result<Self> {
        hyper.validate()?;
        Ok(Self { misfit, hyper })
    }
}

impl<M: GaussianMisfit> Target for MarginalMisfitTarget<M> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        marginal_potential(&self.misfit, &self.hyper, state)
    }
}
