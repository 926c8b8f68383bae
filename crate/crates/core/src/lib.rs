//! Function-space MCMC: dimension-robust proposals on Karhunen–Loève
//! coefficients, the targets they are exercised on, and the diagnostics
//! used to compare them.

pub mod diagnostics;
pub mod error;
pub mod function_space;
pub mod models;
pub mod parallel;
pub mod rng;
pub mod runner;
pub mod samplers;

pub use error::{Error, Result};
