//! Forward maps and potentials for the benchmark problems.

mod banded;
mod darcy;
mod density;
mod likelihood;
mod linear;
mod stokes;
mod twin;

pub use banded::{BandCholesky, SymmetricBand};
pub use darcy::{darcy_solve, darcy_solve_with, DarcyForward, DarcyProblem, HeadField};
pub use density::{trapezoid_grid, DensityData, DensityTarget, TrueDensity};
pub use likelihood::{ForwardModel, GaussianLikelihood};
pub use linear::{LinearGaussianTarget, ModePosterior};
pub use stokes::{
    decay_factor, min_image, physical_wavevector, stokes_evolve, stokes_prior, wrap, ObservationKind, StokesForward,
    StokesProblem,
};
pub use twin::{synthesize_twin_data, TwinData};
