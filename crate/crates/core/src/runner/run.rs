use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::diagnostics::{
    acceptance_sweep, summarize, tune_scale, Observable, SummaryRow, SweepOptions, Trace, TuneResult,
};
use crate::error::{Error, Result};
use crate::function_space::{sample_prior, synthesize, CoefficientState, SieveLaw, SpectralPrior, TruncationLaw};
use crate::parallel::map_range;
use crate::rng::{stream, ChainRng};
use crate::samplers::{
    mh_step, mwg_block_update, rtm_step, sample_precision, sieve_step, ChainState, FdGradient, GaussianMisfit,
    MarginalMisfitTarget, Partition, PrecisionHyperprior, ProposalConfig, ScaledMisfitTarget, StepOutcome,
    StepScale, Target,
};

use super::build::{build, build_at_mesh, Dataset, Problem};
use super::config::{ChainSpec, ExperimentConfig, ExperimentKind, InitSpec, PrecisionMode, PrecisionSpec, SamplerSpec};
use super::output::{trace_csv, Manifest, OutputDir};
use super::validate::run_suites;

/// A transition kernel ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Mh(ProposalConfig),
    /// One block per step, cycling through the partition.
    Mwg(Partition),
    Rtm { law: TruncationLaw, scale: StepScale },
    Sieve { law: SieveLaw, scale: StepScale },
}

impl Kernel {
    pub fn new(spec: &SamplerSpec, prior: &SpectralPrior) -> Result<Self> {
        let modes = prior.mode_count();
        Ok(match spec {
            SamplerSpec::Mh { proposal } => Kernel::Mh(proposal.to_config()?),
            SamplerSpec::Mwg { blocks: None } => Kernel::Mwg(Partition::singletons(modes)),
            SamplerSpec::Mwg { blocks: Some(j) } => Kernel::Mwg(Partition::tail_blocked(modes, *j)?),
            SamplerSpec::Rtm { scale, rate } => Kernel::Rtm {
                law: TruncationLaw::new(*rate, modes)?,
                scale: *scale,
            },
            SamplerSpec::Sieve { scale, rate } => Kernel::Sieve {
                law: SieveLaw::new(*rate)?,
                scale: *scale,
            },
        })
    }

    pub fn scale(&self) -> Option<StepScale> {
        match self {
            Kernel::Mh(c) => Some(c.scale),
            Kernel::Mwg(_) => None,
            Kernel::Rtm { scale, .. } | Kernel::Sieve { scale, .. } => Some(*scale),
        }
    }

    /// The same kernel with its step replaced by `value`.
    pub fn with_scale(&self, value: f64) -> Self {
        let mut k = self.clone();
        match &mut k {
            Kernel::Mh(c) => c.scale = c.scale.with_value(value),
            Kernel::Mwg(_) => {}
            Kernel::Rtm { scale, .. } | Kernel::Sieve { scale, .. } => *scale = scale.with_value(value),
        }
        k
    }

    pub fn needs_gradient(&self) -> bool {
        matches!(self, Kernel::Mh(c) if c.kind.needs_gradient())
    }

    pub fn initial_state<R: Rng + ?Sized>(
        &self,
        prior: &SpectralPrior,
        init: InitSpec,
        rng: &mut R,
    ) -> Result<CoefficientState> {
        let z = match init {
            InitSpec::Prior => sample_prior(prior, rng).z().to_vec(),
            InitSpec::Zero => vec![0.0; prior.mode_count()],
        };
        match self {
            Kernel::Rtm { law, .. } => CoefficientState::truncated(z, law.sample(rng)),
            Kernel::Sieve { .. } => {
                let n = z.len();
                CoefficientState::with_switches(z, vec![true; n])
            }
            _ => Ok(CoefficientState::new(z)),
        }
    }

    /// One step. The returned outcome is the coefficient move; level and
    /// switch moves of the Gibbs kernels are folded into the same step.
    pub fn step<T: Target + ?Sized, R: Rng + ?Sized>(
        &self,
        chain: &mut ChainState,
        target: &T,
        prior: &SpectralPrior,
        rng: &mut R,
    ) -> Result<StepOutcome> {
        match self {
            Kernel::Mh(c) => mh_step(chain, target, prior, c, rng),
            Kernel::Mwg(p) => {
                let b = p.blocks()[(chain.step_index % p.len() as u64) as usize].clone();
                mwg_block_update(chain, target, b, rng)
            }
            Kernel::Rtm { law, scale } => Ok(rtm_step(chain, target, law, scale.beta(), rng)?.coefficients),
            Kernel::Sieve { law, scale } => Ok(sieve_step(chain, target, law, scale.beta(), rng)?.coefficients),
        }
    }
}

/// A chain bound to its target, with optional noise-precision updates.
struct Walker<'a> {
    problem: &'a Problem,
    chain: ChainState,
    target: Arc<dyn Target>,
    precision: Option<(PrecisionHyperprior, PrecisionMode, Arc<dyn GaussianMisfit>)>,
    tau: f64,
    fd_wrap: bool,
}

impl<'a> Walker<'a> {
    fn new(
        problem: &'a Problem,
        kernel: &Kernel,
        precision: Option<&PrecisionSpec>,
        init: InitSpec,
        rng: &mut ChainRng,
    ) -> Result<Self> {
        let state = kernel.initial_state(&problem.prior, init, rng)?;
        let fd_wrap = kernel.needs_gradient();
        let mut tau = problem.misfit.as_ref().map_or(1.0, |m| 1.0 / m.noise_variance());
        let (target, precision): (Arc<dyn Target>, _) = match precision {
            None => (problem.target.clone(), None),
            Some(p) => {
                let misfit = problem
                    .misfit
                    .clone()
                    .ok_or(Error::MissingMisfit)?;
                let hyper = p.hyperprior()?;
                let target: Arc<dyn Target> = match p.mode {
                    PrecisionMode::Gibbs => {
                        tau = sample_precision(misfit.as_ref(), &state, &hyper, rng)?;
                        scaled(misfit.clone(), tau, fd_wrap)
                    }
                    PrecisionMode::Marginal => {
                        let t = MarginalMisfitTarget::new(misfit.clone(), hyper)?;
                        if fd_wrap {
                            Arc::new(FdGradient::new(t))
                        } else {
                            Arc::new(t)
                        }
                    }
                };
                (target, Some((hyper, p.mode, misfit)))
            }
        };
        let chain = ChainState::new(state, target.as_ref())?;
        Ok(Self {
            problem,
            chain,
            target,
            precision,
            tau,
            fd_wrap,
        })
    }

    fn advance(&mut self, kernel: &Kernel, rng: &mut ChainRng) -> Result<StepOutcome> {
        let outcome = kernel.step(&mut self.chain, self.target.as_ref(), &self.problem.prior, rng)?;
        if let Some((hyper, PrecisionMode::Gibbs, misfit)) = &self.precision {
            self.tau = sample_precision(misfit.as_ref(), &self.chain.state, hyper, rng)?;
            self.target = scaled(misfit.clone(), self.tau, self.fd_wrap);
            let state = self.chain.state.clone();
            self.chain.reset(state, self.target.as_ref())?;
        }
        Ok(outcome)
    }

    fn observe(&self, observable: &Observable) -> Result<f64> {
        let prior = &self.problem.prior;
        let state = &self.chain.state;
        Ok(match observable {
            Observable::Point { x } if x.len() == 1 => synthesize(prior, state, &[x[0]])?[0],
            Observable::Point { x } => synthesize(prior, state, &[[x[0], x[1]]])?[0],
            Observable::Kappa { x } => synthesize(prior, state, &[*x])?[0].exp(),
            Observable::Mode { index } => {
                if state.is_active(*index) {
                    state.z()[*index]
                } else {
                    0.0
                }
            }
            Observable::Potential => self.chain.phi,
            Observable::ActiveModes => state.active_count() as f64,
            Observable::NoiseVariance => match &self.precision {
                Some((_, PrecisionMode::Gibbs, _)) => 1.0 / self.tau,
                // conditional mean of sigma^2 given the field
                Some((hyper, PrecisionMode::Marginal, misfit)) => {
                    let (shape, rate) = hyper.posterior(&misfit.residual(state)?);
                    rate / (shape - 1.0)
                }
                None => self
                    .problem
                    .misfit
                    .as_ref()
                    .map_or(f64::NAN, |m| m.noise_variance()),
            },
        })
    }
}

fn scaled(misfit: Arc<dyn GaussianMisfit>, tau: f64, fd_wrap: bool) -> Arc<dyn Target> {
    let t = ScaledMisfitTarget::new(misfit, tau);
    if fd_wrap {
        Arc::new(FdGradient::new(t))
    } else {
        Arc::new(t)
    }
}

/// Recorded output of one chain: the steps kept after burn-in and thinning.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub steps: Vec<u64>,
    /// `values[i]` holds observable `i` at the kept steps.
    pub values: Vec<Vec<f64>>,
    pub accepted: Vec<bool>,
    /// Fraction of accepted coefficient moves after burn-in.
    pub acceptance_rate: f64,
    /// Mean acceptance probability after burn-in.
    pub mean_accept_prob: f64,
    pub scale: Option<StepScale>,
    pub tune: Option<TuneResult>,
    pub burn_in: usize,
    pub thin: usize,
    pub final_state: CoefficientState,
}

impl ChainOutput {
    pub fn summary(&self, observables: &[Observable], max_lag: usize) -> Result<Vec<SummaryRow>> {
        observables
            .iter()
            .zip(&self.values)
            .map(|(o, v)| {
                let mut row = summarize(&Trace::new(o.clone(), v.clone(), 0)?, max_lag)?;
                row.burn_in = self.burn_in;
                Ok(row)
            })
            .collect()
    }
}

/// Run one chain: optional tuning (discarded), then `spec.length` recorded steps.
pub fn run_chain(
    problem: &Problem,
    kernel: &Kernel,
    precision: Option<&PrecisionSpec>,
    spec: &ChainSpec,
    observables: &[Observable],
    rng: &mut ChainRng,
) -> Result<ChainOutput> {
    let mut walker = Walker::new(problem, kernel, precision, spec.init, rng)?;
    let mut kernel = kernel.clone();
    let mut tune = None;
    if let (Some(options), Some(scale)) = (&spec.tune, kernel.scale()) {
        let upper = options.max_scale.unwrap_or(match scale {
            StepScale::Beta(_) => 1.0,
            StepScale::Delta(_) => 2.0,
        });
        let base = kernel.clone();
        let result = tune_scale(scale.value(), upper, options, |s| {
            let k = base.with_scale(s);
            let mut total = 0.0;
            for _ in 0..options.burst_length {
                total += walker.advance(&k, rng)?.accept_prob;
            }
            Ok(total / options.burst_length as f64)
        })?;
        kernel = kernel.with_scale(result.scale);
        tune = Some(result);
    }

    let burn_in = spec.burn_in();
    let kept = (spec.length - burn_in).div_ceil(spec.thin);
    let mut steps = Vec::with_capacity(kept);
    let mut values = vec![Vec::with_capacity(kept); observables.len()];
    let mut accepted = Vec::with_capacity(kept);
    let (mut n_acc, mut sum_prob) = (0usize, 0.0);
    for step in 0..spec.length {
        let o = walker.advance(&kernel, rng)?;
        if step < burn_in {
            continue;
        }
        n_acc += usize::from(o.accepted);
        sum_prob += o.accept_prob;
        if (step - burn_in) % spec.thin == 0 {
            steps.push(step as u64);
            accepted.push(o.accepted);
            for (v, obs) in values.iter_mut().zip(observables) {
                v.push(walker.observe(obs)?);
            }
        }
    }
    let n = (spec.length - burn_in) as f64;
    Ok(ChainOutput {
        steps,
        values,
        accepted,
        acceptance_rate: n_acc as f64 / n,
        mean_accept_prob: sum_prob / n,
        scale: kernel.scale(),
        tune,
        burn_in,
        thin: spec.thin,
        final_state: walker.chain.state,
    })
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    /// The main result: summaries, curve, tuned step, comparison table or validation report.
    pub result: serde_json::Value,
    /// `Some(false)` when a validation check failed.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
struct ChainSummary {
    chain: usize,
    acceptance_rate: f64,
    mean_accept_prob: f64,
    scale: Option<StepScale>,
    burn_in: usize,
    thin: usize,
    kept: usize,
    tune: Option<TuneResult>,
    observables: Vec<SummaryRow>,
}

const SUMMARY_MAX_LAG: usize = crate::diagnostics::DEFAULT_MAX_LAG;

/// Execute an experiment and persist its artifacts under `config.output`.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let mut out = OutputDir::create(&config.output_dir())?;
    let mut manifest = Manifest::new(config);
    let mut passed = None;
    let result = match config.kind {
        ExperimentKind::Sample => run_sample(config, &mut out, &mut manifest)?,
        ExperimentKind::Sweep => run_sweep(config, &mut out)?,
        ExperimentKind::Tune => run_tune(config, &mut out, &mut manifest)?,
        ExperimentKind::Compare => run_compare(config, &mut out)?,
        ExperimentKind::Twin => run_twin(config, &mut out, &mut manifest)?,
        ExperimentKind::Validate => {
            let suite = &config.validate.as_ref().ok_or_else(|| Error::config("validate", "required"))?.suite;
            let report = run_suites(suite, config.seed, config.execution)?;
            passed = Some(report.passed);
            let v = serde_json::to_value(&report)?;
            out.write_json("validate.json", &v)?;
            v
        }
    };
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let output_dir = out.finish(manifest)?;
    Ok(RunReport {
        output_dir,
        result,
        passed,
    })
}

fn record_data(data: &Dataset, problem: &Problem, manifest: &mut Manifest<'_>) -> Result<()> {
    if let Some(v) = data.values() {
        manifest.extras.insert("observation_count".into(), json!(v.len()));
    }
    if let Some(twin) = data.twin() {
        let phi = problem.target.potential(&twin.truth)?;
        manifest.extras.insert("phi_at_truth".into(), json!(phi));
        manifest.extras.insert("twin_noise_sigma".into(), json!(twin.sigma));
    }
    Ok(())
}

fn run_sample(config: &ExperimentConfig, out: &mut OutputDir, manifest: &mut Manifest<'_>) -> Result<serde_json::Value> {
    let (problem, data) = build(config)?;
    record_data(&data, &problem, manifest)?;
    let kernel = Kernel::new(config.sampler_spec()?, &problem.prior)?;
    let spec = config.chain_spec()?;
    let outputs = map_range(config.execution, spec.chains, |k| {
        let mut rng = stream(config.seed, k as u64);
        run_chain(&problem, &kernel, config.precision.as_ref(), spec, &config.observables, &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::with_capacity(outputs.len());
    for (k, o) in outputs.iter().enumerate() {
        for (i, v) in o.values.iter().enumerate() {
            out.write_text(&format!("chain{k}/trace_{i}.csv"), &trace_csv(&o.steps, v, &o.accepted))?;
        }
        let rows = o.summary(&config.observables, SUMMARY_MAX_LAG)?;
        out.write_json(&format!("chain{k}/summary.json"), &rows)?;
        summaries.push(ChainSummary {
            chain: k,
            acceptance_rate: o.acceptance_rate,
            mean_accept_prob: o.mean_accept_prob,
            scale: o.scale,
            burn_in: o.burn_in,
            thin: o.thin,
            kept: o.steps.len(),
            tune: o.tune.clone(),
            observables: rows,
        });
    }
    if let Some(twin) = data.twin() {
        out.write_json("twin.json", twin)?;
    }
    let v = serde_json::to_value(&summaries)?;
    out.write_json("summary.json", &v)?;
    Ok(v)
}

fn run_sweep(config: &ExperimentConfig, out: &mut OutputDir) -> Result<serde_json::Value> {
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::config("sweep", "required"))?;
    let prior = config.prior()?;
    let data = super::build::load_dataset(config, &prior)?;
    let Kernel::Mh(proposal) = Kernel::new(config.sampler_spec()?, &prior)? else {
        return Err(Error::config("sampler.algorithm", "sweeps need an mh sampler"));
    };
    let curve = acceptance_sweep(
        |m| build_at_mesh(config, &data, m).map(|p| (p.prior, p.target)),
        &proposal,
        &sweep.scales,
        &sweep.meshes,
        SweepOptions {
            steps: sweep.steps,
            burn_in: sweep.burn_in,
            seed: config.seed,
            execution: config.execution,
        },
    )?;
    out.write_text("sweep.csv", &curve.to_csv())?;
    let v = serde_json::to_value(&curve)?;
    out.write_json("sweep.json", &v)?;
    Ok(v)
}

fn run_tune(config: &ExperimentConfig, out: &mut OutputDir, manifest: &mut Manifest<'_>) -> Result<serde_json::Value> {
    let (problem, data) = build(config)?;
    record_data(&data, &problem, manifest)?;
    let kernel = Kernel::new(config.sampler_spec()?, &problem.prior)?;
    let spec = config.chain_spec()?;
    let mut rng = stream(config.seed, 0);
    let o = run_chain(&problem, &kernel, config.precision.as_ref(), spec, &config.observables, &mut rng)?;
    let tune = o.tune.clone().ok_or_else(|| Error::config("chain.tune", "required"))?;
    let v = json!({
        "tuned_scale": o.scale,
        "tune": tune,
        "verification": {
            "steps": spec.length - o.burn_in,
            "mean_accept_prob": o.mean_accept_prob,
            "acceptance_rate": o.acceptance_rate,
        },
    });
    out.write_json("tune.json", &v)?;
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow {
    sampler: String,
    observable: String,
    iact: f64,
    mean: f64,
    mcse: f64,
    acceptance: f64,
    scale: Option<f64>,
}

fn run_compare(config: &ExperimentConfig, out: &mut OutputDir) -> Result<serde_json::Value> {
    let compare = config.compare.as_ref().ok_or_else(|| Error::config("compare", "required"))?;
    let (problem, _) = build(config)?;
    let base = config.chain_spec()?;
    let rows = map_range(config.execution, compare.samplers.len(), |i| -> Result<Vec<CompareRow>> {
        let entry = &compare.samplers[i];
        let kernel = Kernel::new(&entry.sampler, &problem.prior)?;
        let spec = ChainSpec {
            chains: 1,
            tune: entry.tune.or(base.tune),
            ..base.clone()
        };
        let mut rng = stream(config.seed, i as u64);
        let o = run_chain(&problem, &kernel, config.precision.as_ref(), &spec, &config.observables, &mut rng)?;
        o.summary(&config.observables, compare.max_lag)?
            .into_iter()
            .map(|r| {
                Ok(CompareRow {
                    sampler: entry.label.clone(),
                    observable: r.observable,
                    iact: r.iact,
                    mean: r.mean,
                    mcse: r.mcse,
                    acceptance: o.mean_accept_prob,
                    scale: o.scale.map(StepScale::value),
                })
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();

    let mut csv = String::from("sampler,observable,iact,mean,mcse,acceptance,scale\n");
    for r in &rows {
        let scale = r.scale.map_or(String::new(), |s| s.to_string());
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.sampler,
            csv_field(&r.observable),
            r.iact,
            r.mean,
            r.mcse,
            r.acceptance,
            scale
        ));
    }
    out.write_text("compare.csv", &csv)?;
    let v = serde_json::to_value(&rows)?;
    out.write_json("compare.json", &v)?;
    Ok(v)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

fn run_twin(config: &ExperimentConfig, out: &mut OutputDir, manifest: &mut Manifest<'_>) -> Result<serde_json::Value> {
    let (problem, data) = build(config)?;
    record_data(&data, &problem, manifest)?;
    let observations = data.values().map(<[f64]>::to_vec).unwrap_or_default();
    out.write_json("observations.json", &observations)?;
    let v = match data.twin() {
        Some(twin) => {
            let mut v = serde_json::to_value(twin)?;
            v["phi_at_truth"] = json!(problem.target.potential(&twin.truth)?);
            v
        }
        None => json!({ "observations": observations }),
    };
    out.write_json("twin.json", &v)?;
    Ok(v)
}
