use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::SpectralPrior;
use crate::samplers::{mh_step, ChainState, ProposalConfig, StepScale, Target};

/// Stochastic-approximation settings for burn-in step-size adaptation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneOptions {
    pub target_acceptance: f64,
    pub burst_length: usize,
    pub max_bursts: usize,
    /// Gain constant `c0` in `c_k = c0 / sqrt(k)`.
    pub gain: f64,
    pub min_scale: f64,
    /// Upper bound on the step; `None` means 1 for `beta` and 2 for `delta`.
    pub max_scale: Option<f64>,
    /// Final bursts averaged for the reported acceptance.
    pub tail_bursts: usize,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            target_acceptance: 0.234,
            burst_length: 100,
            max_bursts: 200,
            gain: 1.0,
            min_scale: 1e-8,
            max_scale: None,
            tail_bursts: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub scale: f64,
    /// Mean acceptance over the final `tail_bursts` bursts.
    pub acceptance: f64,
    /// The step ended pinned at a bound.
    pub saturated: bool,
    /// Final acceptance within 0.05 of the target.
    pub converged: bool,
    pub history: Vec<(f64, f64)>,
}

/// Adapt a scalar step with `s <- s exp(c_k (a_k - a*))`, where `a_k` is the
/// mean acceptance returned by `burst(s)`.
pub fn tune_scale(
    initial: f64,
    upper: f64,
    options: &TuneOptions,
    mut burst: impl FnMut(f64) -> Result<f64>,
) -> Result<TuneResult> {
    let t = options.target_acceptance;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::invalid("target_acceptance", format!("must lie in (0, 1), got {t}")));
    }
    if options.max_bursts == 0 || options.burst_length == 0 {
        return Err(Error::invalid("max_bursts", "bursts must be nonempty".to_string()));
    }
    let lower = options.min_scale.min(upper);
    let mut scale = initial.clamp(lower, upper);
    let mut history = Vec::with_capacity(options.max_bursts);
    for k in 1..=options.max_bursts {
        let acc = burst(scale)?;
        history.push((scale, acc));
        let c = options.gain / (k as f64).sqrt();
        scale = (scale * (c * (acc - t)).exp()).clamp(lower, upper);
    }
    let tail = options.tail_bursts.clamp(1, history.len());
    let acceptance = history[history.len() - tail..].iter().map(|h| h.1).sum::<f64>() / tail as f64;
    let saturated = scale >= upper || scale <= lower;
    Ok(TuneResult {
        scale,
        acceptance,
        saturated,
        converged: (acceptance - t).abs() <= 0.05,
        history,
    })
}

/// Tune the step of `config` by running `chain` on `target`. The chain is
/// advanced; the tuning steps are meant to be discarded.
pub fn tune_step<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    prior: &SpectralPrior,
    config: &ProposalConfig,
    options: &TuneOptions,
    rng: &mut R,
) -> Result<TuneResult> {
    config.validate()?;
    let upper = options.max_scale.unwrap_or(match config.scale {
        StepScale::Beta(_) => 1.0,
        StepScale::Delta(_) => 2.0,
    });
    tune_scale(config.scale.value(), upper, options, |s| {
        let cfg = ProposalConfig {
            scale: config.scale.with_value(s),
            ..*config
        };
        let mut total = 0.0;
        for _ in 0..options.burst_length {
            total += mh_step(chain, target, prior, &cfg, rng)?.accept_prob;
        }
        Ok(total / options.burst_length as f64)
    })
}
