use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Observable, TuneOptions, DEFAULT_MAX_LAG};
use crate::error::{Error, Result};
use crate::function_space::{Domain, PriorSpec, SieveLaw, SpectralPrior, TruncationLaw};
use crate::models::{DarcyProblem, StokesProblem, TrueDensity};
use crate::parallel::Execution;
use crate::samplers::{
    Partition, Precond, PrecisionHyperprior, ProposalConfig, ProposalKind, StepScale, UniformInterval,
};

use super::validate::SUITES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sample,
    Sweep,
    Tune,
    Compare,
    #[serde(alias = "twin-generate")]
    Twin,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Sample => "sample",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Tune => "tune",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Twin => "twin",
            ExperimentKind::Validate => "validate",
        }
    }
}

/// One experiment. After [`parse_config`] every defaulted field holds its
/// effective value, so serializing the config reproduces the run exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub prior: Option<PriorSpec>,
    #[serde(default)]
    pub target: TargetSpec,
    pub sampler: Option<SamplerSpec>,
    pub precision: Option<PrecisionSpec>,
    pub chain: Option<ChainSpec>,
    #[serde(default)]
    pub observables: Vec<Observable>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub execution: Execution,
    pub sweep: Option<SweepSpec>,
    pub compare: Option<CompareSpec>,
    pub validate: Option<ValidateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// `Phi = 0`: sample the prior.
    #[default]
    Zero,
    Density {
        observations: DensitySource,
        #[serde(default = "default_quad_points")]
        quad_points: usize,
    },
    Linear {
        weights: Vec<f64>,
        noise_variance: f64,
        data: DataSource,
    },
    Darcy {
        problem: DarcyProblem,
        data: DataSource,
    },
    Stokes {
        problem: StokesProblem,
        /// When set, the prior scale becomes `delta (4 pi^2 nu)^(-alpha)`.
        delta: Option<f64>,
        data: DataSource,
    },
}

fn default_quad_points() -> usize {
    1025
}

impl TargetSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TargetSpec::Zero => "zero",
            TargetSpec::Density { .. } => "density",
            TargetSpec::Linear { .. } => "linear",
            TargetSpec::Darcy { .. } => "darcy",
            TargetSpec::Stokes { .. } => "stokes",
        }
    }

    /// Targets whose potential is a Gaussian data misfit.
    pub fn is_gaussian(&self) -> bool {
        matches!(self, TargetSpec::Linear { .. } | TargetSpec::Darcy { .. } | TargetSpec::Stokes { .. })
    }

    pub(crate) fn data_source(&self) -> Option<&DataSource> {
        match self {
            TargetSpec::Linear { data, .. } | TargetSpec::Darcy { data, .. } | TargetSpec::Stokes { data, .. } => {
                Some(data)
            }
            _ => None,
        }
    }
}

/// Observations for a Gaussian-likelihood model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSource {
    Inline {
        values: Vec<f64>,
    },
    /// A JSON array of numbers, or an object with an `observations` array
    /// (such as `twin.json`).
    File {
        path: PathBuf,
    },
    /// Synthesize data from a truth: the given whitened coefficients, or a
    /// prior draw when absent.
    Twin {
        truth: Option<Vec<f64>>,
        /// Defaults to the model's noise level.
        noise_sigma: Option<f64>,
    },
}

/// Observations for density estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySource {
    Inline { values: Vec<f64> },
    File { path: PathBuf },
    Synthetic { truth: TrueDensity, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SamplerSpec {
    /// Metropolis–Hastings with one of the proposal families.
    Mh { proposal: ProposalSpec },
    /// Metropolis-within-Gibbs; `blocks = J` gives `J - 1` singletons and a
    /// tail block, absent means all singletons.
    Mwg { blocks: Option<usize> },
    /// pCN on the active modes plus a random-truncation level move.
    Rtm { scale: StepScale, rate: f64 },
    /// pCN on the active modes plus a sieve switch move.
    Sieve { scale: StepScale, rate: f64 },
}

impl SamplerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerSpec::Mh { .. } => "mh",
            SamplerSpec::Mwg { .. } => "mwg",
            SamplerSpec::Rtm { .. } => "rtm",
            SamplerSpec::Sieve { .. } => "sieve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalSpec {
    pub kind: ProposalKind,
    /// Required except for `indep`.
    pub scale: Option<StepScale>,
    #[serde(default = "half")]
    pub theta: f64,
    #[serde(default)]
    pub precond: Precond,
    pub random_scale: Option<UniformInterval>,
}

fn half() -> f64 {
    0.5
}

impl ProposalSpec {
    pub fn to_config(&self) -> Result<ProposalConfig> {
        if self.kind == ProposalKind::Independence {
            return Ok(ProposalConfig::independence());
        }
        let scale = self
            .scale
            .ok_or_else(|| Error::config("sampler.proposal.scale", "required for this proposal kind"))?;
        let cfg = ProposalConfig {
            kind: self.kind,
            scale,
            theta: self.theta,
            precond: self.precond,
            random_scale: self.random_scale,
        };
        cfg.validate().map_err(|e| at("sampler.proposal", e))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionMode {
    /// Alternate the field update with a conjugate Gamma draw of the precision.
    #[default]
    Gibbs,
    /// Integrate the precision out of the likelihood.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionSpec {
    pub alpha_sigma: f64,
    pub beta_sigma: f64,
    #[serde(default)]
    pub mode: PrecisionMode,
}

impl PrecisionSpec {
    pub fn hyperprior(&self) -> Result<PrecisionHyperprior> {
        PrecisionHyperprior::new(self.alpha_sigma, self.beta_sigma).map_err(|e| at("precision", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSpec {
    /// An independent prior draw per chain.
    #[default]
    Prior,
    /// The zero function.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    /// Recorded steps, burn-in included; tuning steps come before and are not counted.
    pub length: usize,
    /// Defaults to 10% of `length`.
    pub burn_in: Option<usize>,
    #[serde(default = "one")]
    pub thin: usize,
    #[serde(default = "one")]
    pub chains: usize,
    pub tune: Option<TuneOptions>,
    #[serde(default)]
    pub init: InitSpec,
}

fn one() -> usize {
    1
}

impl ChainSpec {
    pub fn new(length: usize) -> Self {
        Self {
            length,
            burn_in: Some(length / 10),
            thin: 1,
            chains: 1,
            tune: None,
            init: InitSpec::Prior,
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.length / 10)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Step sizes, in the parameterization of the proposal's `scale`.
    pub scales: Vec<f64>,
    /// Mode counts; each replaces `prior.modes`.
    pub meshes: Vec<usize>,
    pub steps: usize,
    #[serde(default)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareEntry {
    pub label: String,
    pub sampler: SamplerSpec,
    pub tune: Option<TuneOptions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    pub samplers: Vec<CompareEntry>,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
}

fn default_max_lag() -> usize {
    DEFAULT_MAX_LAG
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    /// A suite name or `all`.
    pub suite: String,
}

/// Default output directory when neither the config nor the command line names one.
pub const DEFAULT_OUTPUT: &str = "fsmcmc-output";

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("{path}.{name}"), reason),
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

/// Parse a JSON experiment document, resolve relative file paths against
/// `base_dir`, fill defaults and check every cross-field rule.
pub fn parse_config(document: &str, base_dir: Option<&Path>) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let mut config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    if let Some(dir) = base_dir {
        config.rebase(dir);
    }
    config.resolve()?;
    Ok(config)
}

/// Read and parse a config file; relative paths inside it are taken
/// relative to the file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path.parent())
}

impl ExperimentConfig {
    /// Minimal sample experiment, used by tests and examples.
    pub fn sample(prior: PriorSpec, target: TargetSpec, sampler: SamplerSpec, length: usize, seed: u64) -> Self {
        Self {
            kind: ExperimentKind::Sample,
            seed,
            prior: Some(prior),
            target,
            sampler: Some(sampler),
            precision: None,
            chain: Some(ChainSpec::new(length)),
            observables: Vec::new(),
            output: None,
            execution: Execution::default(),
            sweep: None,
            compare: None,
            validate: None,
        }
    }

    /// Apply command-line overrides and re-check.
    pub fn with_overrides(mut self, seed: Option<u64>, output: Option<PathBuf>) -> Result<Self> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(o) = output {
            self.output = Some(o);
        }
        self.resolve()?;
        Ok(self)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }

    fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        match &mut self.target {
            TargetSpec::Density {
                observations: DensitySource::File { path },
                ..
            } => fix(path),
            TargetSpec::Linear { data, .. } | TargetSpec::Darcy { data, .. } | TargetSpec::Stokes { data, .. } => {
                if let DataSource::File { path } = data {
                    fix(path);
                }
            }
            _ => {}
        }
    }

    /// The prior, which every kind except `validate` requires.
    pub fn prior(&self) -> Result<SpectralPrior> {
        let spec = self.prior.ok_or_else(|| Error::config("prior", "required"))?;
        SpectralPrior::new(spec).map_err(|e| at("prior", e))
    }

    pub fn chain_spec(&self) -> Result<&ChainSpec> {
        self.chain.as_ref().ok_or_else(|| Error::config("chain", "required"))
    }

    pub fn sampler_spec(&self) -> Result<&SamplerSpec> {
        self.sampler.as_ref().ok_or_else(|| Error::config("sampler", "required"))
    }

    /// Fill defaults and check cross-field rules. Idempotent.
    pub fn resolve(&mut self) -> Result<()> {
        use ExperimentKind::*;
        if self.output.is_none() {
            self.output = Some(PathBuf::from(DEFAULT_OUTPUT));
        }
        if self.kind == Validate {
            let v = self.validate.as_ref().ok_or_else(|| Error::config("validate", "required"))?;
            if v.suite != "all" && !SUITES.contains(&v.suite.as_str()) {
                return Err(Error::config(
                    "validate.suite",
                    format!("unknown suite `{}`; available: all, {}", v.suite, SUITES.join(", ")),
                ));
            }
            return Ok(());
        }

        if let (
            TargetSpec::Stokes {
                problem,
                delta: Some(d),
                ..
            },
            Some(spec),
        ) = (&self.target, &mut self.prior)
        {
            if !(d.is_finite() && *d > 0.0) {
                return Err(Error::config("target.delta", format!("must be positive, got {d}")));
            }
            spec.scale = d * (4.0 * std::f64::consts::PI.powi(2) * problem.viscosity).powf(-spec.alpha);
        }
        let prior = self.prior()?;
        self.check_target(&prior)?;
        self.check_observables(&prior)?;

        if let Some(p) = &self.precision {
            p.hyperprior()?;
            if !self.target.is_gaussian() {
                return Err(Error::config(
                    "precision",
                    format!("needs a Gaussian-likelihood target, got `{}`", self.target.name()),
                ));
            }
        }

        match self.kind {
            Sample | Tune => {
                let modes = prior.mode_count();
                let s = self.sampler.as_mut().ok_or_else(|| Error::config("sampler", "required"))?;
                resolve_sampler(s, modes, "sampler")?;
                self.resolve_chain()?;
                if self.kind == Tune && !matches!(self.sampler, Some(SamplerSpec::Mwg { .. })) {
                    if let Some(c) = &mut self.chain {
                        c.tune.get_or_insert_with(TuneOptions::default);
                    }
                } else if self.kind == Tune {
                    return Err(Error::config("sampler.algorithm", "mwg has no step size to tune"));
                }
            }
            Sweep => {
                let s = self.sweep.as_ref().ok_or_else(|| Error::config("sweep", "required"))?;
                if s.scales.is_empty() || s.meshes.is_empty() {
                    return Err(Error::config("sweep", "scales and meshes must be nonempty"));
                }
                if s.steps == 0 {
                    return Err(Error::config("sweep.steps", "must be positive"));
                }
                for (i, &m) in s.meshes.iter().enumerate() {
                    let spec = PriorSpec {
                        modes: m,
                        ..self.prior.expect("checked above")
                    };
                    SpectralPrior::new(spec).map_err(|e| at(&format!("sweep.meshes[{i}]"), e))?;
                }
                if self.precision.is_some() {
                    return Err(Error::config("precision", "not supported by sweep experiments"));
                }
                let modes = prior.mode_count();
                let sampler = self.sampler.as_mut().ok_or_else(|| Error::config("sampler", "required"))?;
                resolve_sampler(sampler, modes, "sampler")?;
                let SamplerSpec::Mh { proposal } = sampler else {
                    return Err(Error::config("sampler.algorithm", "sweeps need an mh sampler"));
                };
                let cfg = proposal.to_config()?;
                for (i, &v) in s.scales.iter().enumerate() {
                    ProposalConfig {
                        scale: cfg.scale.with_value(v),
                        ..cfg
                    }
                    .validate()
                    .map_err(|e| at(&format!("sweep.scales[{i}]"), e))?;
                }
            }
            Compare => {
                let modes = prior.mode_count();
                let c = self.compare.as_mut().ok_or_else(|| Error::config("compare", "required"))?;
                if c.samplers.is_empty() {
                    return Err(Error::config("compare.samplers", "must be nonempty"));
                }
                if c.max_lag == 0 {
                    return Err(Error::config("compare.max_lag", "must be positive"));
                }
                for (i, e) in c.samplers.iter_mut().enumerate() {
                    resolve_sampler(&mut e.sampler, modes, &format!("compare.samplers[{i}].sampler"))?;
                }
                self.resolve_chain()?;
            }
            Twin => {
                let generated = matches!(self.target.data_source(), Some(DataSource::Twin { .. }))
                    || matches!(
                        self.target,
                        TargetSpec::Density {
                            observations: DensitySource::Synthetic { .. },
                            ..
                        }
                    );
                if !generated {
                    return Err(Error::config("target", "twin experiments need a twin or synthetic data source"));
                }
            }
            Validate => unreachable!(),
        }
        if self.observables.is_empty() {
            self.observables.push(Observable::Potential);
        }
        Ok(())
    }

    fn resolve_chain(&mut self) -> Result<()> {
        let c = self.chain.as_mut().ok_or_else(|| Error::config("chain", "required"))?;
        if c.length == 0 {
            return Err(Error::config("chain.length", "must be positive"));
        }
        let burn = *c.burn_in.get_or_insert(c.length / 10);
        if burn >= c.length {
            return Err(Error::config(
                "chain.burn_in",
                format!("{burn} discards the whole chain of length {}", c.length),
            ));
        }
        if c.thin == 0 {
            return Err(Error::config("chain.thin", "must be positive"));
        }
        if c.chains == 0 {
            return Err(Error::config("chain.chains", "must be positive"));
        }
        if let Some(t) = &c.tune {
            if !(t.target_acceptance > 0.0 && t.target_acceptance < 1.0) {
                return Err(Error::config("chain.tune.target_acceptance", "must lie in (0, 1)"));
            }
            if t.burst_length == 0 || t.max_bursts == 0 {
                return Err(Error::config("chain.tune", "bursts must be nonempty"));
            }
        }
        Ok(())
    }

    fn check_target(&self, prior: &SpectralPrior) -> Result<()> {
        let need = |want: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(
                    "prior.domain",
                    format!("target `{}` needs the {want} domain", self.target.name()),
                ))
            }
        };
        let check_data = |data: &DataSource, expected: Option<usize>| -> Result<()> {
            match data {
                DataSource::File { path } if !path.is_file() => Err(Error::config(
                    "target.data.path",
                    format!("file {} does not exist", path.display()),
                )),
                DataSource::Inline { values } if expected.is_some_and(|n| n != values.len()) => Err(Error::config(
                    "target.data.values",
                    format!("expected {} values, got {}", expected.unwrap_or(0), values.len()),
                )),
                DataSource::Twin { truth, noise_sigma } => {
                    if let Some(t) = truth {
                        if t.len() != prior.mode_count() {
                            return Err(Error::config(
                                "target.data.truth",
                                format!("expected {} coefficients, got {}", prior.mode_count(), t.len()),
                            ));
                        }
                    }
                    if noise_sigma.is_some_and(|s| !(s.is_finite() && s >= 0.0)) {
                        return Err(Error::config("target.data.noise_sigma", "must be finite and >= 0"));
                    }
                    Ok(())
                }
                _ => Ok(()),
            }
        };
        match &self.target {
            TargetSpec::Zero => Ok(()),
            TargetSpec::Density {
                observations,
                quad_points,
            } => {
                need("interval", matches!(prior.domain(), Domain::Interval { .. }))?;
                if *quad_points < 3 {
                    return Err(Error::config("target.quad_points", "need at least 3 points"));
                }
                match observations {
                    DensitySource::File { path } if !path.is_file() => Err(Error::config(
                        "target.observations.path",
                        format!("file {} does not exist", path.display()),
                    )),
                    DensitySource::Inline { values } if values.is_empty() => {
                        Err(Error::config("target.observations.values", "must be nonempty"))
                    }
                    DensitySource::Synthetic { count: 0, .. } => {
                        Err(Error::config("target.observations.count", "must be positive"))
                    }
                    _ => Ok(()),
                }
            }
            TargetSpec::Linear {
                weights,
                noise_variance,
                data,
            } => {
                if weights.len() > prior.mode_count() {
                    return Err(Error::config(
                        "target.weights",
                        format!("{} weights exceed the {} prior modes", weights.len(), prior.mode_count()),
                    ));
                }
                if !(noise_variance.is_finite() && *noise_variance > 0.0) {
                    return Err(Error::config("target.noise_variance", "must be positive"));
                }
                check_data(data, Some(weights.len()))
            }
            TargetSpec::Darcy { problem, data } => {
                need("unit-square", prior.domain() == Domain::UnitSquare)?;
                problem.validate().map_err(|e| at("target.problem", e))?;
                check_data(data, Some(problem.measurement_points.len()))
            }
            TargetSpec::Stokes { problem, data, .. } => {
                need("torus", prior.domain() == Domain::Torus)?;
                problem.validate().map_err(|e| at("target.problem", e))?;
                check_data(data, Some(problem.obs_times.len() * problem.positions.len() * 2))
            }
        }
    }

    fn check_observables(&self, prior: &SpectralPrior) -> Result<()> {
        for (i, o) in self.observables.iter().enumerate() {
            let path = format!("observables[{i}]");
            match o {
                Observable::Point { x } => {
                    if x.len() != prior.dims() {
                        return Err(Error::config(
                            path,
                            format!("point has {} coordinates, the domain has {}", x.len(), prior.dims()),
                        ));
                    }
                    let c = if x.len() == 1 { [x[0], 0.0] } else { [x[0], x[1]] };
                    if !prior.contains(c) {
                        return Err(Error::config(path, format!("point {x:?} lies outside the domain")));
                    }
                }
                Observable::Kappa { x } => {
                    if prior.dims() != 2 || !prior.contains(*x) {
                        return Err(Error::config(path, "kappa needs a point of a planar domain"));
                    }
                }
                Observable::Mode { index } if *index >= prior.mode_count() => {
                    return Err(Error::config(
                        path,
                        format!("mode {index} out of range for {} modes", prior.mode_count()),
                    ));
                }
                Observable::NoiseVariance if !self.target.is_gaussian() => {
                    return Err(Error::config(path, "noise variance needs a Gaussian-likelihood target"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn resolve_sampler(s: &mut SamplerSpec, modes: usize, path: &str) -> Result<()> {
    match s {
        SamplerSpec::Mh { proposal } => {
            let cfg = proposal.to_config().map_err(|e| match e {
                Error::Config { path: p, message } => {
                    Error::config(p.replacen("sampler", path, 1), message)
                }
                other => other,
            })?;
            proposal.scale = Some(cfg.scale);
        }
        SamplerSpec::Mwg { blocks } => {
            if let Some(j) = blocks {
                Partition::tail_blocked(modes, *j).map_err(|e| at(path, e))?;
            }
        }
        SamplerSpec::Rtm { scale, rate } => {
            ProposalConfig::new(ProposalKind::Pcn, *scale).map_err(|e| at(&format!("{path}.scale"), e))?;
            TruncationLaw::new(*rate, modes).map_err(|e| at(path, e))?;
        }
        SamplerSpec::Sieve { scale, rate } => {
            ProposalConfig::new(ProposalKind::Pcn, *scale).map_err(|e| at(&format!("{path}.scale"), e))?;
            SieveLaw::new(*rate).map_err(|e| at(path, e))?;
        }
    }
    Ok(())
}
