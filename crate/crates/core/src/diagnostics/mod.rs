//! Autocorrelation, integrated autocorrelation times, acceptance sweeps
//! and burn-in step tuning.

mod acf;
mod summary;
mod sweep;
mod tune;

pub use acf::{
    autocorrelation, autocorrelation_with, iact, iact_with, Autocorrelation, Observable, Trace, DEFAULT_MAX_LAG,
};
pub use summary::{summarize, summary, SummaryRow};
pub use sweep::{acceptance_sweep, AcceptanceCurve, SweepOptions};
pub use tune::{tune_scale, tune_step, TuneOptions, TuneResult};
