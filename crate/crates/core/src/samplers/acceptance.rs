use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, SpectralPrior};

use super::proposal::{Precond, ProposalConfig, ProposalKind};

/// A state together with its potential and, for gradient-based kernels,
/// its whitened gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub state: CoefficientState,
    pub phi: f64,
    pub grad: Option<Vec<f64>>,
}

impl Evaluated {
    pub fn new(state: CoefficientState, phi: f64) -> Self {
        Self { state, phi, grad: None }
    }

    pub fn with_grad(state: CoefficientState, phi: f64, grad: Vec<f64>) -> Self {
        Self {
            state,
            phi,
            grad: Some(grad),
        }
    }
}

/// Log Metropolis–Hastings ratio for moving from `u` to `v` under `config`
/// with effective step `delta`.
pub fn accept_log_ratio(
    config: &ProposalConfig,
    delta: f64,
    prior: &SpectralPrior,
    u: &Evaluated,
    v: &Evaluated,
) -> Result<f64> {
    if !u.phi.is_finite() || !v.phi.is_finite() {
        return Err(Error::NonFinite("potential"));
    }
    if u.state.mask() != v.state.mask() || u.state.len() != v.state.len() {
        return Err(Error::MaskMismatch("proposal changed the mask"));
    }
    let base = u.phi - v.phi;
    let lambdas = prior.std_devs();
    let active = || u.state.active_indices();
    let (zu, zv) = (u.state.z(), v.state.z());

    let ratio = match config.kind {
        ProposalKind::Pcn | ProposalKind::Independence => base,
        ProposalKind::RwIdentity | ProposalKind::RwCovariance => {
            base + u.state.prior_sq_norm() - v.state.prior_sq_norm()
        }
        ProposalKind::ThetaCn => {
            // Transition densities and prior combine into a per-mode quadratic
            // whose weight is proportional to (2 theta - 1).
            let skew = delta * (2.0 * config.theta - 1.0) / 2.0;
            if skew == 0.0 {
                base
            } else {
                base + active()
                    .map(|i| {
                        let weight = match config.precond {
                            Precond::Covariance => skew,
                            Precond::Identity => skew / (lambdas[i] * lambdas[i]),
                        };
                        0.5 * (zv[i] * zv[i] - zu[i] * zu[i]) * weight
                    })
                    .sum::<f64>()
            }
        }
        ProposalKind::Pcnl | ProposalKind::Cnl => {
            let gu = u.grad.as_deref().ok_or(Error::MissingGradient)?;
            let gv = v.grad.as_deref().ok_or(Error::MissingGradient)?;
            let inv_var = |i: usize| match config.kind {
                ProposalKind::Cnl => 1.0 / (lambdas[i] * lambdas[i]),
                _ => 1.0,
            };
            let rho = |phi: f64, from: &[f64], to: &[f64], g: &[f64]| -> f64 {
                phi + active()
                    .map(|i| {
                        0.5 * (to[i] - from[i]) * g[i]
                            + 0.25 * delta * inv_var(i) * ((from[i] + to[i]) * g[i] + g[i] * g[i])
                    })
                    .sum::<f64>()
            };
            rho(u.phi, zu, zv, gu) - rho(v.phi, zv, zu, gv)
        }
    };
    if ratio.is_nan() {
        return Err(Error::NonFinite("acceptance ratio"));
    }
    Ok(ratio)
}

/// `min(1, exp(log_ratio))`, computed without overflow.
pub(crate) fn accept_prob(log_ratio: f64) -> f64 {
    log_ratio.min(0.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::sample_prior;
    use crate::rng::stream;
    use crate::samplers::proposal::{ModeMap, StepScale};
    use approx::assert_relative_eq;

    fn prior() -> SpectralPrior {
        SpectralPrior::one_d(1.5, 2.0, 6, 10.0).unwrap()
    }

    fn pair(seed: u64) -> (CoefficientState, CoefficientState) {
        let p = prior();
        let mut rng = stream(seed, 0);
        (sample_prior(&p, &mut rng), sample_prior(&p, &mut rng))
    }

    fn log_normal(x: f64, mean: f64, sd: f64) -> f64 {
        let r = (x - mean) / sd;
        -0.5 * r * r - sd.ln()
    }

    /// Brute-force MH ratio from the Gaussian transition density and the
    /// whitened prior.
    fn density_oracle(cfg: &ProposalConfig, delta: f64, u: &Evaluated, v: &Evaluated, grads: bool) -> f64 {
        let p = prior();
        let mut total = u.phi - v.phi;
        for i in 0..u.state.len() {
            let lsq = p.std_devs()[i].powi(2);
            let m = ModeMap::new(cfg.kind, delta, cfg.theta, cfg.precond, lsq).unwrap();
            let (gu, gv) = if grads {
                (u.grad.as_ref().unwrap()[i], v.grad.as_ref().unwrap()[i])
            } else {
                (0.0, 0.0)
            };
            let (a, b) = (u.state.z()[i], v.state.z()[i]);
            let fwd = log_normal(b, m.a * a - m.c * gu, m.b);
            let rev = log_normal(a, m.a * b - m.c * gv, m.b);
            total += rev - fwd - 0.5 * b * b + 0.5 * a * a;
        }
        total
    }

    #[test]
    fn pcn_examples() {
        let cfg = ProposalConfig::pcn_beta(0.3).unwrap();
        let (a, b) = pair(1);
        let u = Evaluated::new(a.clone(), 0.7);
        let v = Evaluated::new(b.clone(), 0.7);
        let r = accept_log_ratio(&cfg, cfg.scale.delta(), &prior(), &u, &v).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(accept_prob(r), 1.0);
        let u = Evaluated::new(a, 0.0);
        let v = Evaluated::new(b, 2f64.ln());
        let r = accept_log_ratio(&cfg, cfg.scale.delta(), &prior(), &u, &v).unwrap();
        assert_relative_eq!(accept_prob(r), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn theta_half_equals_pcn() {
        let (a, b) = pair(2);
        let u = Evaluated::new(a, 1.3);
        let v = Evaluated::new(b, 0.4);
        let pcn = ProposalConfig::pcn_delta(0.4).unwrap();
        let expect = accept_log_ratio(&pcn, 0.4, &prior(), &u, &v).unwrap();
        for precond in [Precond::Identity, Precond::Covariance] {
            let cfg = ProposalConfig::theta_cn(0.4, 0.5, precond).unwrap();
            let got = accept_log_ratio(&cfg, 0.4, &prior(), &u, &v).unwrap();
            assert_eq!(got, expect);
            // the brute-force density ratio agrees to round-off
            assert_relative_eq!(density_oracle(&cfg, 0.4, &u, &v, false), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn theta_cn_matches_density_oracle() {
        for (seed, theta) in [(3, 0.0), (4, 0.3), (5, 0.8), (6, 1.0)] {
            let (a, b) = pair(seed);
            let u = Evaluated::new(a, 0.2);
            let v = Evaluated::new(b, -0.5);
            for precond in [Precond::Identity, Precond::Covariance] {
                let cfg = ProposalConfig::theta_cn(0.35, theta, precond).unwrap();
                let got = accept_log_ratio(&cfg, 0.35, &prior(), &u, &v).unwrap();
                assert_relative_eq!(got, density_oracle(&cfg, 0.35, &u, &v, false), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn random_walk_matches_density_oracle() {
        let (a, b) = pair(7);
        let u = Evaluated::new(a, 0.1);
        let v = Evaluated::new(b, 0.9);
        for kind in [ProposalKind::RwIdentity, ProposalKind::RwCovariance] {
            let cfg = ProposalConfig::new(kind, StepScale::Delta(0.2)).unwrap();
            let got = accept_log_ratio(&cfg, 0.2, &prior(), &u, &v).unwrap();
            assert_relative_eq!(got, density_oracle(&cfg, 0.2, &u, &v, false), epsilon = 1e-10);
        }
    }

    #[test]
    fn langevin_matches_density_oracle() {
        let (a, b) = pair(8);
        let gu: Vec<f64> = a.z().iter().map(|z| 0.3 * z + 0.1).collect();
        let gv: Vec<f64> = b.z().iter().map(|z| -0.2 * z + 0.4).collect();
        let u = Evaluated::with_grad(a, 0.6, gu);
        let v = Evaluated::with_grad(b, 1.1, gv);
        for kind in [ProposalKind::Pcnl, ProposalKind::Cnl] {
            let cfg = ProposalConfig::new(kind, StepScale::Delta(0.25)).unwrap();
            let got = accept_log_ratio(&cfg, 0.25, &prior(), &u, &v).unwrap();
            assert_relative_eq!(got, density_oracle(&cfg, 0.25, &u, &v, true), epsilon = 1e-10);
        }
    }

    #[test]
    fn langevin_with_zero_gradient_reduces_to_cn_family() {
        let (a, b) = pair(9);
        let zero = vec![0.0; a.len()];
        let u = Evaluated::with_grad(a, 0.6, zero.clone());
        let v = Evaluated::with_grad(b, 1.1, zero);
        let cfg = ProposalConfig::new(ProposalKind::Pcnl, StepScale::Delta(0.25)).unwrap();
        let got = accept_log_ratio(&cfg, 0.25, &prior(), &u, &v).unwrap();
        assert_relative_eq!(got, 0.6 - 1.1, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_finite_and_missing_gradient() {
        let (a, b) = pair(10);
        let cfg = ProposalConfig::pcn_beta(0.5).unwrap();
        let u = Evaluated::new(a.clone(), f64::INFINITY);
        let v = Evaluated::new(b.clone(), 0.0);
        assert!(matches!(
            accept_log_ratio(&cfg, 0.5, &prior(), &u, &v),
            Err(Error::NonFinite(_))
        ));
        let cfg = ProposalConfig::new(ProposalKind::Cnl, StepScale::Delta(0.1)).unwrap();
        let u = Evaluated::new(a, 0.0);
        let v = Evaluated::new(b, 0.0);
        assert!(matches!(
            accept_log_ratio(&cfg, 0.1, &prior(), &u, &v),
            Err(Error::MissingGradient)
        ));
    }
}
