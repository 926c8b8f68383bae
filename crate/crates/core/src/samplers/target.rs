use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::CoefficientState;

/// A posterior `dmu/dmu0 ∝ exp(-potential)` over coefficient states.
pub trait Target: Send + Sync {
    fn potential(&self, state: &CoefficientState) -> Result<f64>;

    /// Gradient of the potential with respect to the whitened coefficients,
    /// zero on inactive modes. `None` when the target has no gradient.
    fn gradient(&self, _state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        None
    }
}

impl<T: Target + ?Sized> Target for &T {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        (**self).potential(state)
    }
    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        (**self).gradient(state)
    }
}

impl<T: Target + ?Sized> Target for Box<T> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        (**self).potential(state)
    }
    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        (**self).gradient(state)
    }
}

/// Gaussian data misfit `y - G(u)` with noise variance `sigma^2`.
pub trait GaussianMisfit: Send + Sync {
    fn residual(&self, state: &CoefficientState) -> Result<Vec<f64>>;
    fn noise_variance(&self) -> f64;
    fn data_dim(&self) -> usize;
}

impl<M: GaussianMisfit + ?Sized> GaussianMisfit for &M {
    fn residual(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        (**self).residual(state)
    }
    fn noise_variance(&self) -> f64 {
        (**self).noise_variance()
    }
    fn data_dim(&self) -> usize {
        (**self).data_dim()
    }
}

impl<M: GaussianMisfit + ?Sized> GaussianMisfit for Arc<M> {
    fn residual(&self, state: &CoefficientState) -> Result<Vec<f64>> {
        (**self).residual(state)
    }
    fn noise_variance(&self) -> f64 {
        (**self).noise_variance()
    }
    fn data_dim(&self) -> usize {
        (**self).data_dim()
    }
}

impl<T: Target + ?Sized> Target for Arc<T> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        (**self).potential(state)
    }
    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        (**self).gradient(state)
    }
}

/// `Phi ≡ 0`: the posterior is the prior.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPotential;

impl Target for ZeroPotential {
    fn potential(&self, _state: &CoefficientState) -> Result<f64> {
        Ok(0.0)
    }
    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        Some(Ok(vec![0.0; state.len()]))
    }
}

/// Central differences over active modes.
pub fn finite_difference_gradient<T: Target + ?Sized>(
    target: &T,
    state: &CoefficientState,
    step: f64,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; state.len()];
    let mut probe = state.clone();
    for i in state.active_indices() {
        let z0 = state.z()[i];
        probe.z_mut()[i] = z0 + step;
        let up = target.potential(&probe)?;
        probe.z_mut()[i] = z0 - step;
        let down = target.potential(&probe)?;
        probe.z_mut()[i] = z0;
        grad[i] = (up - down) / (2.0 * step);
    }
    if grad.iter().all(|g| g.is_finite()) {
        Ok(grad)
    } else {
        Err(Error::NonFinite("finite-difference gradient"))
    }
}

/// Supplies a finite-difference gradient to a target that has none.
#[derive(Debug, Clone)]
pub struct FdGradient<T> {
    pub inner: T,
    pub step: f64,
}

impl<T> FdGradient<T> {
    pub fn new(inner: T) -> Self {
        Self { inner, step: 1e-5 }
    }
}

impl<T: Target> Target for FdGradient<T> {
    fn potential(&self, state: &CoefficientState) -> Result<f64> {
        self.inner.potential(state)
    }
    fn gradient(&self, state: &CoefficientState) -> Option<Result<Vec<f64>>> {
        Some(finite_difference_gradient(&self.inner, state, self.step))
    }
}
