//! Gaussian random-field priors in Karhunen–Loève form.
//!
//! A prior is described by its eigenvalue law and an orthonormal real Fourier
//! basis. States are stored in whitened coordinates: coefficient `z[i]` is a
//! standard normal under the prior and the field coefficient is
//! `xi[i] = lambda[i] * z[i]`. Random-truncation and sieve priors reuse the
//! same coefficients and add a mask (a truncation level or per-mode switches).

mod laws;
mod prior;
mod state;

pub use laws::{SieveLaw, TruncationLaw};
pub use prior::{sample_prior, synthesize, Domain, Location, Mode, PriorSpec, SpectralPrior, Wave};
pub use state::{CoefficientState, Mask};
