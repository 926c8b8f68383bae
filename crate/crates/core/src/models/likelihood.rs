use crate::error::{Error, Result};
use crate::function_space::CoefficientState;
use crate::samplers::{finite_difference_gradient, GaussianMisfit, Target};

/// A deterministic parameter-to-observable map `G`.
pub trait ForwardModel: Send + Sync {
    fn forward(&self, state: &CoefficientState) -> Result<Vec<f64>>;

    /// Observed minus predicted, for one component. Models on periodic
    /// domains override this with a wrapped difference.
    fn difference(&self, observed: f64, predicted: f64) -> f64 {
        observed - predicted
    }
}

impl<F: ForwardModel + ?Sized> ForwardModel for &F {
    fn forward(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        (**self).forward(state)
    }
    fn difference(&self, observed: f64, predicted: f64) -> f64 {
        (**self).difference(observed, predicted)
    }
}

/// `Phi(u) = |y - G(u)|^2 / (2 sigma^2)`.
#[derive(Debug, Clone)]
pub struct GaussianLikelihood<F> {
    pub model: F,
    pub data: Vec<f64>,
    pub sigma: f64,
    /// Step for the central-difference gradient.
    pub fd_step: f64,
}

impl<F: ForwardModel> GaussianLikelihood<F> {
    pub fn new(model: F, data: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid("noise_sigma", format!("must be positive, got {sigma}")));
        }
        Ok(Self {
            model,
            data,
            sigma,
            fd_step: 1e-5,
        })
    }
}

impl<F: ForwardModel> GaussianMisfit for GaussianLikelihood<F> {
    fn residual(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        let g = self.model.forward(state)?;
        if g.len() != self.data.len() {
            return Err(Error::invalid(
                "data",
                format!("{} observations but the model predicts {}", self.data.len(), g.len()),
            ));
        }
        Ok(self.data.iter().zip(&g).map(|(y, p)| self.model.difference(*y, *p)).collect())
    }

    fn noise_variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    fn data_dim(&self) -> usize {
        self.data.len()
    }
}

impl<F: ForwardModel> Target for GaussianLikelihood<F> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        let r = self.residual(state)?;
        let phi = 0.5 * r.iter().map(|x| x * x).sum::<f64>() / self.noise_variance();
        if phi.is_finite() {
            Ok(phi)
        } else {
            Err(Error::NonFinite("potential"))
        }
    }

    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        Some(finite_difference_gradient(self, state, self.fd_step))
    }
}
