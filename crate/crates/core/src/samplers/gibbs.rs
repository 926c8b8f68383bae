use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::function_space::{SieveLaw, TruncationLaw};

use super::chain::{decide, ChainState, StepOutcome};
use super::proposal::propose_pcn;
use super::target::Target;

/// Contiguous coefficient blocks for Metropolis-within-Gibbs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Range<usize>>,
}

impl Partition {
    /// Blocks must be nonempty, ordered and cover `0..modes` exactly.
    pub fn new(blocks: Vec<Range<usize>>, modes: usize) -> Result<Self> {
        let mut next = 0;
        for (j, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::EmptyBlock(j));
            }
            if b.start != next {
                return Err(Error::invalid("partition", format!("block {j} starts at {}, expected {next}", b.start)));
            }
            next = b.end;
        }
        if next != modes {
            return Err(Error::invalid("partition", format!("blocks cover {next} of {modes} modes")));
        }
        Ok(Self { blocks })
    }

    pub fn singletons(modes: usize) -> Self {
        Self {
            blocks: (0..modes).map(|i| i..i + 1).collect(),
        }
    }

    /// `J - 1` singletons followed by one block holding every remaining mode.
    pub fn tail_blocked(modes: usize, blocks: usize) -> Result<Self> {
        if blocks == 0 || blocks > modes {
            return Err(Error::invalid("blocks", format!("need 1 <= J <= {modes}, got {blocks}")));
        }
        let mut v: Vec<Range<usize>> = (0..blocks - 1).map(|i| i..i + 1).collect();
        v.push(blocks - 1..modes);
        Ok(Self { blocks: v })
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Resample the active modes of one block from the prior and accept on the
/// potential difference.
pub fn mwg_block_update<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    block: Range<usize>,
    rng: &mut R,
) -> Result<StepOutcome> {
    if block.is_empty() {
        return Err(Error::EmptyBlock(block.start));
    }
    if block.end > chain.state.len() {
        return Err(Error::OutOfRange {
            index: block.end,
            max: chain.state.len(),
        });
    }
    let mut v = chain.state.clone();
    for i in block {
        if v.is_active(i) {
            v.z_mut()[i] = rng.sample(StandardNormal);
        }
    }
    let phi_v = target.potential(&v)?;
    if !phi_v.is_finite() {
        return Err(Error::NonFinite("proposal potential"));
    }
    let outcome = decide(chain.phi - phi_v, rng);
    chain.commit(outcome, outcome.accepted.then_some((v, phi_v, None)));
    Ok(outcome)
}

/// One systematic scan over `partition`.
pub fn mwg_sweep<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    partition: &Partition,
    rng: &mut R,
) -> Result<Vec<StepOutcome>> {
    if partition.blocks.last().map_or(0, |b| b.end) != chain.state.len() {
        return Err(Error::invalid("partition", "does not cover the state".to_string()));
    }
    partition
        .blocks
        .iter()
        .map(|b| mwg_block_update(chain, target, b.clone(), rng))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtmOutcome {
    pub coefficients: StepOutcome,
    pub level: StepOutcome,
}

/// pCN update of the active coefficients followed by a reflecting ±1 move on
/// the truncation level.
pub fn rtm_step<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    law: &TruncationLaw,
    beta: f64,
    rng: &mut R,
) -> Result<RtmOutcome> {
    let d = chain
        .state
        .truncation()
        .ok_or(Error::MaskMismatch("random truncation needs a truncated state"))?;
    let n = law.max_level();
    if n != chain.state.len() {
        return Err(Error::MaskMismatch("truncation law support differs from mode count"));
    }
    let coefficients = pcn_update(chain, target, beta, rng)?;

    if n == 1 {
        let level = StepOutcome {
            accepted: true,
            accept_prob: 1.0,
        };
        chain.commit(level, None);
        return Ok(RtmOutcome { coefficients, level });
    }
    let propose_prob = |level: usize| if level == 1 || level == n { 1.0 } else { 0.5 };
    let to = if d == 1 {
        2
    } else if d == n || rng.random::<bool>() {
        d - 1
    } else {
        d + 1
    };
    let mut v = chain.state.clone();
    v.set_truncation(to)?;
    let phi_v = target.potential(&v)?;
    if !phi_v.is_finite() {
        return Err(Error::NonFinite("proposal potential"));
    }
    let log_ratio = chain.phi - phi_v + law.log_pmf(to) - law.log_pmf(d) + f64::ln(propose_prob(to))
        - f64::ln(propose_prob(d));
    let level = decide(log_ratio, rng);
    chain.commit(level, level.accepted.then_some((v, phi_v, None)));
    Ok(RtmOutcome { coefficients, level })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveOutcome {
    pub coefficients: StepOutcome,
    pub switch: StepOutcome,
}

/// pCN update of the active coefficients followed by one switch move.
pub fn sieve_step<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    law: &SieveLaw,
    beta: f64,
    rng: &mut R,
) -> Result<SieveOutcome> {
    if chain.state.switches().is_none() {
        return Err(Error::MaskMismatch("sieve needs a switched state"));
    }
    let coefficients = pcn_update(chain, target, beta, rng)?;
    let switch = sieve_switch_move(chain, target, law, rng)?;
    Ok(SieveOutcome { coefficients, switch })
}

/// Toggle one switch: activate a uniformly chosen inactive mode or deactivate
/// a uniformly chosen active one, with exact proposal probabilities in the
/// acceptance ratio.
pub fn sieve_switch_move<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    law: &SieveLaw,
    rng: &mut R,
) -> Result<StepOutcome> {
    let switches = chain
        .state
        .switches()
        .ok_or(Error::MaskMismatch("sieve needs a switched state"))?;
    let n = switches.len();
    if n == 0 {
        return Err(Error::invalid("switches", "no modes to switch".to_string()));
    }
    let on = switches.iter().filter(|&&s| s).count();
    let activate_prob = |k: usize| match k {
        0 => 1.0,
        k if k == n => 0.0,
        _ => 0.5,
    };
    let activate = match on {
        0 => true,
        k if k == n => false,
        _ => rng.random::<bool>(),
    };
    let candidates: Vec<usize> = (0..n).filter(|&i| switches[i] != activate).collect();
    let pick = candidates[rng.random_range(0..candidates.len())];
    let (forward, reverse) = if activate {
        (activate_prob(on) / (n - on) as f64, (1.0 - activate_prob(on + 1)) / (on + 1) as f64)
    } else {
        ((1.0 - activate_prob(on)) / on as f64, activate_prob(on - 1) / (n - on + 1) as f64)
    };

    let mut v = chain.state.clone();
    let s = v.switches_mut().expect("switched state");
    s[pick] = activate;
    let prior_shift = law.log_prior(s) - law.log_prior(switches);
    let phi_v = target.potential(&v)?;
    if !phi_v.is_finite() {
        return Err(Error::NonFinite("proposal potential"));
    }
    let log_ratio = chain.phi - phi_v + prior_shift + reverse.ln() - forward.ln();
    let outcome = decide(log_ratio, rng);
    chain.commit(outcome, outcome.accepted.then_some((v, phi_v, None)));
    Ok(outcome)
}

fn pcn_update<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    beta: f64,
    rng: &mut R,
) -> Result<StepOutcome> {
    let v = propose_pcn(&chain.state, beta, rng)?;
    let phi_v = target.potential(&v)?;
    if !phi_v.is_finite() {
        return Err(Error::NonFinite("proposal potential"));
    }
    let outcome = decide(chain.phi - phi_v, rng);
    chain.commit(outcome, outcome.accepted.then_some((v, phi_v, None)));
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::CoefficientState;
    use crate::rng::stream;
    use crate::samplers::target::ZeroPotential;

    #[test]
    fn partitions() {
        let p = Partition::tail_blocked(6, 3).unwrap();
        assert_eq!(p.blocks(), &[0..1, 1..2, 2..6]);
        assert_eq!(Partition::singletons(3).len(), 3);
        assert!(matches!(Partition::new(vec![0..2, 2..2, 2..4], 4), Err(Error::EmptyBlock(1))));
        assert!(Partition::new(vec![0..2], 4).is_err());
        assert!(Partition::tail_blocked(3, 0).is_err());
    }

    #[test]
    fn zero_potential_mwg_accepts_and_resamples() {
        let mut rng = stream(21, 0);
        let mut chain = ChainState::new(CoefficientState::new(vec![5.0; 4]), &ZeroPotential).unwrap();
        let p = Partition::tail_blocked(4, 2).unwrap();
        let outcomes = mwg_sweep(&mut chain, &ZeroPotential, &p, &mut rng).unwrap();
        assert!(outcomes.iter().all(|o| o.accepted));
        assert!(chain.state.z().iter().all(|&z| z != 5.0));
    }

    #[test]
    fn single_block_is_independence_step() {
        let mut rng = stream(22, 0);
        let mut chain = ChainState::new(CoefficientState::new(vec![0.0; 5]), &ZeroPotential).unwrap();
        let whole = Partition::new(vec![0..5], 5).unwrap();
        let outcomes = mwg_sweep(&mut chain, &ZeroPotential, &whole, &mut rng).unwrap();
        assert_eq!(outcomes.len(), 1);
        let mut rng2 = stream(22, 0);
        let fresh: Vec<f64> = (0..5).map(|_| rng2.sample(StandardNormal)).collect();
        assert_eq!(chain.state.z(), &fresh[..]);
    }

    #[test]
    fn rtm_reflects_at_one() {
        let law = TruncationLaw::new(1.0, 5).unwrap();
        let mut rng = stream(23, 0);
        for _ in 0..50 {
            let mut chain = ChainState::new(CoefficientState::truncated(vec![0.0; 5], 1).unwrap(), &ZeroPotential).unwrap();
            rtm_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng).unwrap();
            let d = chain.state.truncation().unwrap();
            assert!(d == 1 || d == 2);
        }
    }

    #[test]
    fn rtm_zero_potential_preserves_truncation_law() {
        let rate = 0.7;
        let law = TruncationLaw::new(rate, 6).unwrap();
        let mut rng = stream(24, 0);
        let mut chain = ChainState::new(CoefficientState::truncated(vec![0.0; 6], 3).unwrap(), &ZeroPotential).unwrap();
        let mut counts = [0usize; 7];
        let steps = 100_000;
        for _ in 0..steps {
            rtm_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng).unwrap();
            counts[chain.state.truncation().unwrap()] += 1;
        }
        for d in 1..=6 {
            let freq = counts[d] as f64 / steps as f64;
            // generous allowance for autocorrelation of the level chain
            assert!((freq - law.pmf(d)).abs() < 0.02, "level {d}: {freq} vs {}", law.pmf(d));
        }
        let ratio = counts[1] as f64 / counts[2] as f64;
        assert!((ratio / rate.exp() - 1.0).abs() < 0.08, "{ratio}");
    }

    #[test]
    fn rtm_steep_law_collapses() {
        let law = TruncationLaw::new(50.0, 4).unwrap();
        let mut rng = stream(25, 0);
        let mut chain = ChainState::new(CoefficientState::truncated(vec![0.0; 4], 4).unwrap(), &ZeroPotential).unwrap();
        for _ in 0..100 {
            rtm_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng).unwrap();
        }
        assert_eq!(chain.state.truncation(), Some(1));
    }

    #[test]
    fn sieve_symmetric_switches_are_binomial() {
        let n = 8;
        let law = SieveLaw::new(0.0).unwrap();
        let mut rng = stream(26, 0);
        let mut chain = ChainState::new(
            CoefficientState::with_switches(vec![0.0; n], vec![false; n]).unwrap(),
            &ZeroPotential,
        )
        .unwrap();
        let steps = 100_000;
        let mut total = 0usize;
        for _ in 0..steps {
            sieve_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng).unwrap();
            total += chain.state.active_count();
        }
        let mean = total as f64 / steps as f64;
        assert!((mean - 4.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn sieve_edge_moves() {
        let law = SieveLaw::new(0.0).unwrap();
        let mut rng = stream(27, 0);
        let mut chain =
            ChainState::new(CoefficientState::with_switches(vec![0.0; 3], vec![false; 3]).unwrap(), &ZeroPotential)
                .unwrap();
        sieve_switch_move(&mut chain, &ZeroPotential, &law, &mut rng).unwrap();
        assert_eq!(chain.state.active_count(), 1);
        let mut full =
            ChainState::new(CoefficientState::with_switches(vec![0.0; 3], vec![true; 3]).unwrap(), &ZeroPotential)
                .unwrap();
        sieve_switch_move(&mut full, &ZeroPotential, &law, &mut rng).unwrap();
        assert_eq!(full.state.active_count(), 2);
    }

    #[test]
    fn wrong_masks_rejected() {
        let mut rng = stream(28, 0);
        let mut chain = ChainState::new(CoefficientState::new(vec![0.0; 3]), &ZeroPotential).unwrap();
        let law = TruncationLaw::new(1.0, 3).unwrap();
        assert!(matches!(
            rtm_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng),
            Err(Error::MaskMismatch(_))
        ));
        let sieve = SieveLaw::new(1.0).unwrap();
        assert!(sieve_step(&mut chain, &ZeroPotential, &sieve, 0.5, &mut rng).is_err());
    }
}
