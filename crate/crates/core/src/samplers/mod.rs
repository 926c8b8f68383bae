//! Function-space Metropolis–Hastings kernels and Gibbs compositions.
//!
//! All proposals act mode-wise on whitened coefficients of the active modes,
//! leaving masked-out coefficients untouched.

mod acceptance;
mod chain;
mod gibbs;
mod precision;
mod proposal;
mod target;

pub use acceptance::{accept_log_ratio, Evaluated};
pub use chain::{mh_step, random_delta_wrap, ChainState, StepOutcome};
pub use gibbs::{
    mwg_block_update, mwg_sweep, rtm_step, sieve_step, sieve_switch_move, Partition, RtmOutcome,
    SieveOutcome,
};
pub use precision::{
    marginal_potential, sample_precision, MarginalMisfitTarget, PrecisionHyperprior, ScaledMisfitTarget,
};
pub use proposal::{
    beta_from_delta, delta_from_beta, propose_langevin, propose_pcn, propose_rw, propose_theta_cn,
    LangevinVariant, ModeMap, Precond, ProposalConfig, ProposalKind, StepScale, UniformInterval,
};
pub use target::{finite_difference_gradient, FdGradient, GaussianMisfit, Target, ZeroPotential};
