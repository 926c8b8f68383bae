use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{CoefficientState, SpectralPrior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProposalKind {
    /// Standard random walk, identity preconditioning.
    #[serde(rename = "rw-i")]
    RwIdentity,
    /// Standard random walk preconditioned by the prior covariance.
    #[serde(rename = "rw-c")]
    RwCovariance,
    /// One-parameter family of implicit discretizations; `theta = 0.5` is CN/pCN.
    ThetaCn,
    Pcn,
    Cnl,
    Pcnl,
    /// Independence sampler: a fresh prior draw (pCN with beta = 1).
    #[serde(rename = "indep")]
    Independence,
}

impl ProposalKind {
    pub fn needs_gradient(self) -> bool {
        matches!(self, ProposalKind::Cnl | ProposalKind::Pcnl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precond {
    Identity,
    #[default]
    Covariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LangevinVariant {
    Cnl,
    Pcnl,
}

/// Proposal step size, given either as `delta` or as the pCN `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepScale {
    Delta(f64),
    Beta(f64),
}

impl StepScale {
    pub fn delta(self) -> f64 {
        match self {
            StepScale::Delta(d) => d,
            StepScale::Beta(b) => delta_from_beta(b),
        }
    }

    pub fn beta(self) -> f64 {
        match self {
            StepScale::Delta(d) => beta_from_delta(d),
            StepScale::Beta(b) => b,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            StepScale::Delta(v) | StepScale::Beta(v) => v,
        }
    }

    pub fn with_value(self, v: f64) -> Self {
        match self {
            StepScale::Delta(_) => StepScale::Delta(v),
            StepScale::Beta(_) => StepScale::Beta(v),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            StepScale::Delta(d) if !(d.is_finite() && d >= 0.0) => {
                Err(Error::invalid("delta", format!("must be finite and >= 0, got {d}")))
            }
            StepScale::Beta(b) if !(0.0..=1.0).contains(&b) => {
                Err(Error::invalid("beta", format!("must lie in [0, 1], got {b}")))
            }
            _ => Ok(()),
        }
    }
}

/// `beta^2 = 8 delta / (2 + delta)^2`, valid for `delta` in `[0, 2]`.
pub fn beta_from_delta(delta: f64) -> f64 {
    (8.0 * delta).sqrt() / (2.0 + delta)
}

/// Inverse of [`beta_from_delta`] on `[0, 2]`.
pub fn delta_from_beta(beta: f64) -> f64 {
    let c = (1.0 - beta * beta).max(0.0).sqrt();
    2.0 * (1.0 - c) / (1.0 + c)
}

/// Uniform law for a randomized step, in the parameterization of the
/// configured [`StepScale`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformInterval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalConfig {
    pub kind: ProposalKind,
    pub scale: StepScale,
    pub theta: f64,
    pub precond: Precond,
    pub random_scale: Option<UniformInterval>,
}

impl ProposalConfig {
    pub fn new(kind: ProposalKind, scale: StepScale) -> Result<Self> {
        let cfg = Self {
            kind,
            scale,
            theta: 0.5,
            precond: Precond::Covariance,
            random_scale: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn pcn_beta(beta: f64) -> Result<Self> {
        Self::new(ProposalKind::Pcn, StepScale::Beta(beta))
    }

    pub fn pcn_delta(delta: f64) -> Result<Self> {
        Self::new(ProposalKind::Pcn, StepScale::Delta(delta))
    }

    pub fn independence() -> Self {
        Self {
            kind: ProposalKind::Independence,
            scale: StepScale::Delta(2.0),
            theta: 0.5,
            precond: Precond::Covariance,
            random_scale: None,
        }
    }

    pub fn theta_cn(delta: f64, theta: f64, precond: Precond) -> Result<Self> {
        let cfg = Self {
            theta,
            precond,
            ..Self::new(ProposalKind::ThetaCn, StepScale::Delta(delta))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Crank–Nicolson: theta = 1/2 with identity preconditioning.
    pub fn cn(delta: f64) -> Result<Self> {
        Self::theta_cn(delta, 0.5, Precond::Identity)
    }

    pub fn with_random_scale(mut self, low: f64, high: f64) -> Result<Self> {
        self.random_scale = Some(UniformInterval { low, high });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.scale.validate()?;
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::invalid("theta", format!("must lie in [0, 1], got {}", self.theta)));
        }
        if let Some(r) = self.random_scale {
            if !(r.low <= r.high) {
                return Err(Error::invalid("random", format!("low {} exceeds high {}", r.low, r.high)));
            }
            self.scale.with_value(r.low).validate()?;
            self.scale.with_value(r.high).validate()?;
        }
        Ok(())
    }
}

/// Per-mode affine proposal `z_v = a z_u - c g + b eta` in whitened
/// coordinates, where `g` is the whitened gradient and `eta ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ModeMap {
    /// Coefficients for a mode with prior variance `lambda_sq`.
    pub fn new(kind: ProposalKind, delta: f64, theta: f64, precond: Precond, lambda_sq: f64) -> Result<Self> {
        let map = match kind {
            ProposalKind::Pcn | ProposalKind::Independence => Self {
                a: (2.0 - delta) / (2.0 + delta),
                b: (8.0 * delta).sqrt() / (2.0 + delta),
                c: 0.0,
            },
            ProposalKind::ThetaCn => match precond {
                Precond::Covariance => {
                    let den = 1.0 + delta * theta;
                    Self {
                        a: (1.0 - delta * (1.0 - theta)) / den,
                        b: (2.0 * delta).sqrt() / den,
                        c: 0.0,
                    }
                }
                Precond::Identity => {
                    let den = lambda_sq + delta * theta;
                    Self {
                        a: (lambda_sq - delta * (1.0 - theta)) / den,
                        b: (2.0 * delta * lambda_sq).sqrt() / den,
                        c: 0.0,
                    }
                }
            },
            ProposalKind::RwCovariance => Self {
                a: 1.0,
                b: (2.0 * delta).sqrt(),
                c: 0.0,
            },
            ProposalKind::RwIdentity => Self {
                a: 1.0,
                b: (2.0 * delta / lambda_sq).sqrt(),
                c: 0.0,
            },
            ProposalKind::Pcnl => Self {
                a: (2.0 - delta) / (2.0 + delta),
                b: (8.0 * delta).sqrt() / (2.0 + delta),
                c: 2.0 * delta / (2.0 + delta),
            },
            ProposalKind::Cnl => {
                let den = 2.0 * lambda_sq + delta;
                Self {
                    a: (2.0 * lambda_sq - delta) / den,
                    b: (8.0 * delta * lambda_sq).sqrt() / den,
                    c: 2.0 * delta / den,
                }
            }
        };
        if map.a.is_finite() && map.b.is_finite() && map.c.is_finite() {
            Ok(map)
        } else {
            Err(Error::NonFinite("proposal coefficients (degenerate denominator)"))
        }
    }
}

/// Apply `kind` with effective step `delta` to the active modes of `u`.
pub(crate) fn propose_with<R: Rng + ?Sized>(
    kind: ProposalKind,
    delta: f64,
    theta: f64,
    precond: Precond,
    u: &CoefficientState,
    prior: &SpectralPrior,
    grad: Option<&[f64]>,
    rng: &mut R,
) -> Result<CoefficientState> {
    prior.check_state(u)?;
    if kind.needs_gradient() && grad.is_none() {
        return Err(Error::MissingGradient);
    }
    let lambdas = prior.std_devs();
    let mut v = u.clone();
    for i in u.active_indices() {
        let lambda_sq = lambdas[i] * lambdas[i];
        let map = ModeMap::new(kind, delta, theta, precond, lambda_sq)?;
        let eta: f64 = rng.sample(StandardNormal);
        let drift = grad.map_or(0.0, |g| map.c * g[i]);
        v.z_mut()[i] = map.a * u.z()[i] - drift + map.b * eta;
    }
    Ok(v)
}

/// pCN: `z_v = sqrt(1 - beta^2) z_u + beta eta` on active modes.
pub fn propose_pcn<R: Rng + ?Sized>(u: &CoefficientState, beta: f64, rng: &mut R) -> Result<CoefficientState> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("beta", format!("must lie in [0, 1], got {beta}")));
    }
    let a = (1.0 - beta * beta).sqrt();
    let mut v = u.clone();
    for i in u.active_indices() {
        let eta: f64 = rng.sample(StandardNormal);
        v.z_mut()[i] = a * u.z()[i] + beta * eta;
    }
    Ok(v)
}

pub fn propose_theta_cn<R: Rng + ?Sized>(
    u: &CoefficientState,
    prior: &SpectralPrior,
    delta: f64,
    theta: f64,
    precond: Precond,
    rng: &mut R,
) -> Result<CoefficientState> {
    ProposalConfig::theta_cn(delta, theta, precond)?;
    propose_with(ProposalKind::ThetaCn, delta, theta, precond, u, prior, None, rng)
}

pub fn propose_rw<R: Rng + ?Sized>(
    u: &CoefficientState,
    prior: &SpectralPrior,
    delta: f64,
    precond: Precond,
    rng: &mut R,
) -> Result<CoefficientState> {
    StepScale::Delta(delta).validate()?;
    let kind = match precond {
        Precond::Identity => ProposalKind::RwIdentity,
        Precond::Covariance => ProposalKind::RwCovariance,
    };
    propose_with(kind, delta, 0.5, precond, u, prior, None, rng)
}

pub fn propose_langevin<R: Rng + ?Sized>(
    u: &CoefficientState,
    prior: &SpectralPrior,
    delta: f64,
    variant: LangevinVariant,
    grad: &[f64],
    rng: &mut R,
) -> Result<CoefficientState> {
    StepScale::Delta(delta).validate()?;
    if grad.len() != u.len() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    let kind = match variant {
        LangevinVariant::Cnl => ProposalKind::Cnl,
        LangevinVariant::Pcnl => ProposalKind::Pcnl,
    };
    propose_with(kind, delta, 0.5, Precond::Covariance, u, prior, Some(grad), rng)
}
