use rand::Rng;

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, SpectralPrior};

use super::acceptance::{accept_log_ratio, accept_prob, Evaluated};
use super::proposal::{propose_with, ProposalConfig, ProposalKind};
use super::target::Target;

/// A single chain: current state, cached potential and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub state: CoefficientState,
    pub phi: f64,
    pub step_index: u64,
    pub accepted_last: bool,
    grad: Option<Vec<f64>>,
}

/// Outcome of one Metropolis–Hastings decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    /// `min(1, exp(log_ratio))`.
    pub accept_prob: f64,
}

impl ChainState {
    pub fn new<T: Target + ?Sized>(state: CoefficientState, target: &T) -> Result<Self> {
        let phi = target.potential(&state)?;
        if !phi.is_finite() {
            return Err(Error::NonFinite("initial potential"));
        }
        Ok(Self {
            state,
            phi,
            step_index: 0,
            accepted_last: false,
            grad: None,
        })
    }

    /// Replace the state, recomputing the cached potential.
    pub fn reset<T: Target + ?Sized>(&mut self, state: CoefficientState, target: &T) -> Result<()> {
        let phi = target.potential(&state)?;
        if !phi.is_finite() {
            return Err(Error::NonFinite("potential"));
        }
        self.state = state;
        self.phi = phi;
        self.grad = None;
        Ok(())
    }

    pub(crate) fn commit(&mut self, outcome: StepOutcome, next: Option<(CoefficientState, f64, Option<Vec<f64>>)>) {
        if let Some((state, phi, grad)) = next {
            self.state = state;
            self.phi = phi;
            self.grad = grad;
        }
        self.accepted_last = outcome.accepted;
        self.step_index += 1;
    }

    fn gradient<T: Target + ?Sized>(&mut self, target: &T) -> Result<Vec<f64>> {
        if let Some(g) = &self.grad {
            return Ok(g.clone());
        }
        let g = target.gradient(&self.state).ok_or(Error::MissingGradient)??;
        self.grad = Some(g.clone());
        Ok(g)
    }
}

/// Effective step for one iteration: the configured step, or a fresh draw
/// from the configured uniform interval.
pub fn random_delta_wrap<R: Rng + ?Sized>(config: &ProposalConfig, rng: &mut R) -> f64 {
    if config.kind == ProposalKind::Independence {
        return 2.0;
    }
    match config.random_scale {
        None => config.scale.delta(),
        Some(r) if r.low == r.high => config.scale.with_value(r.low).delta(),
        Some(r) => config.scale.with_value(rng.random_range(r.low..=r.high)).delta(),
    }
}

/// Draw the acceptance decision for a log ratio.
pub(crate) fn decide<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> StepOutcome {
    let p = accept_prob(log_ratio);
    let u: f64 = rng.random();
    StepOutcome {
        accepted: u < p,
        accept_prob: p,
    }
}

/// One Metropolis–Hastings step.
pub fn mh_step<T: Target + ?Sized, R: Rng + ?Sized>(
    chain: &mut ChainState,
    target: &T,
    prior: &SpectralPrior,
    config: &ProposalConfig,
    rng: &mut R,
) -> Result<StepOutcome> {
    let delta = random_delta_wrap(config, rng);
    let needs_grad = config.kind.needs_gradient();
    let grad_u = if needs_grad { Some(chain.gradient(target)?) } else { None };
    let proposal = propose_with(
        config.kind,
        delta,
        config.theta,
        config.precond,
        &chain.state,
        prior,
        grad_u.as_deref(),
        rng,
    )?;
    let phi_v = target.potential(&proposal)?;
    if !phi_v.is_finite() {
        return Err(Error::NonFinite("proposal potential"));
    }
    let grad_v = if needs_grad {
        Some(target.gradient(&proposal).ok_or(Error::MissingGradient)??)
    } else {
        None
    };
    let u = Evaluated {
        state: chain.state.clone(),
        phi: chain.phi,
        grad: grad_u,
    };
    let v = Evaluated {
        state: proposal,
        phi: phi_v,
        grad: grad_v,
    };
    let outcome = decide(accept_log_ratio(config, delta, prior, &u, &v)?, rng);
    let next = outcome.accepted.then(|| (v.state, v.phi, v.grad));
    chain.commit(outcome, next);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::sample_prior;
    use crate::rng::stream;
    use crate::samplers::proposal::StepScale;
    use crate::samplers::target::ZeroPotential;

    struct Quadratic;

    impl Target for Quadratic {
        fn potential(&self, s: &CoefficientState) -> Result<f64> {
            Ok(s.z().iter().map(|z| 0.5 * (z - 1.0) * (z - 1.0)).sum())
        }
        fn gradient(&self, s: &CoefficientState) -> Option<Result<Vec<f64>>> {
            Some(Ok(s.z().iter().map(|z| z - 1.0).collect()))
        }
    }

    fn prior() -> SpectralPrior {
        SpectralPrior::one_d(2.0, 1.0, 4, 10.0).unwrap()
    }

    #[test]
    fn zero_potential_pcn_always_accepts() {
        let p = prior();
        let mut rng = stream(11, 0);
        let mut chain = ChainState::new(sample_prior(&p, &mut rng), &ZeroPotential).unwrap();
        let cfg = ProposalConfig::pcn_beta(0.8).unwrap();
        for _ in 0..10_000 {
            let o = mh_step(&mut chain, &ZeroPotential, &p, &cfg, &mut rng).unwrap();
            assert!(o.accepted);
            assert_eq!(o.accept_prob, 1.0);
        }
        assert_eq!(chain.step_index, 10_000);
    }

    #[test]
    fn beta_zero_chain_is_constant() {
        let p = prior();
        let mut rng = stream(12, 0);
        let start = sample_prior(&p, &mut rng);
        let mut chain = ChainState::new(start.clone(), &Quadratic).unwrap();
        let cfg = ProposalConfig::pcn_beta(0.0).unwrap();
        for _ in 0..100 {
            mh_step(&mut chain, &Quadratic, &p, &cfg, &mut rng).unwrap();
        }
        assert_eq!(chain.state, start);
    }

    #[test]
    fn cache_stays_coherent() {
        let p = prior();
        let mut rng = stream(13, 0);
        for kind in [
            ProposalKind::Pcn,
            ProposalKind::Pcnl,
            ProposalKind::Cnl,
            ProposalKind::RwCovariance,
            ProposalKind::ThetaCn,
        ] {
            let cfg = ProposalConfig::new(kind, StepScale::Delta(0.3)).unwrap();
            let mut chain = ChainState::new(sample_prior(&p, &mut rng), &Quadratic).unwrap();
            for _ in 0..200 {
                mh_step(&mut chain, &Quadratic, &p, &cfg, &mut rng).unwrap();
                assert_eq!(chain.phi, Quadratic.potential(&chain.state).unwrap());
            }
        }
    }

    #[test]
    fn langevin_requires_gradient() {
        struct NoGrad;
        impl Target for NoGrad {
            fn potential(&self, _: &CoefficientState) -> Result<f64> {
                Ok(0.0)
            }
        }
        let p = prior();
        let mut rng = stream(14, 0);
        let mut chain = ChainState::new(sample_prior(&p, &mut rng), &NoGrad).unwrap();
        let cfg = ProposalConfig::new(ProposalKind::Pcnl, StepScale::Delta(0.1)).unwrap();
        assert!(matches!(
            mh_step(&mut chain, &NoGrad, &p, &cfg, &mut rng),
            Err(Error::MissingGradient)
        ));
    }

    #[test]
    fn random_step_draws() {
        let mut rng = stream(15, 0);
        let fixed = ProposalConfig::pcn_delta(0.3).unwrap().with_random_scale(0.3, 0.3).unwrap();
        assert_eq!(random_delta_wrap(&fixed, &mut rng), 0.3);

        let cfg = ProposalConfig::pcn_delta(0.3).unwrap().with_random_scale(0.1, 0.5).unwrap();
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| random_delta_wrap(&cfg, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let se = (0.4f64 * 0.4 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * se);
        assert!(draws.iter().all(|d| (0.1..=0.5).contains(d)));

        let p = prior();
        let cfg = ProposalConfig::pcn_beta(0.5).unwrap().with_random_scale(0.05, 0.95).unwrap();
        let mut chain = ChainState::new(sample_prior(&p, &mut rng), &ZeroPotential).unwrap();
        for _ in 0..1000 {
            assert!(mh_step(&mut chain, &ZeroPotential, &p, &cfg, &mut rng).unwrap().accepted);
        }
    }

    #[test]
    fn independence_uses_full_step() {
        let mut rng = stream(16, 0);
        assert_eq!(random_delta_wrap(&ProposalConfig::independence(), &mut rng), 2.0);
    }
}
