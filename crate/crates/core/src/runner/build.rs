use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::{sample_prior, CoefficientState, PriorSpec, SpectralPrior};
use crate::models::{
    DarcyForward, DensityData, DensityTarget, ForwardModel, GaussianLikelihood, LinearGaussianTarget, StokesForward,
    TwinData, synthesize_twin_data,
};
use crate::rng::stream;
use crate::samplers::{GaussianMisfit, Target, ZeroPotential};

use super::config::{DataSource, DensitySource, ExperimentConfig, TargetSpec};

/// Stream index reserved for synthetic data, disjoint from chain streams.
pub const DATA_STREAM: u64 = 1 << 40;

/// Observations resolved from the config.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    None,
    Values(Vec<f64>),
    Twin(TwinData),
}

impl Dataset {
    pub fn values(&self) -> Option<&[f64]> {
        match self {
            Dataset::None => None,
            Dataset::Values(v) => Some(v),
            Dataset::Twin(t) => Some(&t.observations),
        }
    }

    pub fn twin(&self) -> Option<&TwinData> {
        match self {
            Dataset::Twin(t) => Some(t),
            _ => None,
        }
    }
}

/// A prior together with the target built on it.
#[derive(Clone)]
pub struct Problem {
    pub prior: SpectralPrior,
    pub target: Arc<dyn Target>,
    /// Present for Gaussian-likelihood models.
    pub misfit: Option<Arc<dyn GaussianMisfit>>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("prior", &self.prior.spec())
            .field("gaussian", &self.misfit.is_some())
            .finish()
    }
}

fn read_values(path: &Path, field: &str) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let array = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(map) => map
            .get("observations")
            .ok_or_else(|| Error::config(field, format!("{} has no `observations` array", path.display())))?,
        _ => return Err(Error::config(field, format!("{} is not a JSON array", path.display()))),
    };
    serde_json::from_value(array.clone()).map_err(|e| Error::config(field, e.to_string()))
}

fn forward_model(spec: &TargetSpec, prior: &SpectralPrior) -> Result<Option<(Arc<dyn ForwardModel>, f64)>> {
    Ok(match spec {
        TargetSpec::Linear {
            weights,
            noise_variance,
            ..
        } => {
            let zero = vec![0.0; weights.len()];
            let lin = LinearGaussianTarget::new(prior, weights.clone(), *noise_variance, zero)?;
            Some((Arc::new(lin), noise_variance.sqrt()))
        }
        TargetSpec::Darcy { problem, .. } => Some((
            Arc::new(DarcyForward::new(prior.clone(), problem.clone())?),
            problem.noise_sigma,
        )),
        TargetSpec::Stokes { problem, .. } => Some((
            Arc::new(StokesForward::new(prior.clone(), problem.clone())?),
            problem.noise_sigma,
        )),
        _ => None,
    })
}

/// Load or synthesize the observations named by the config. Synthetic data
/// are drawn from [`DATA_STREAM`] of the master seed.
pub fn load_dataset(config: &ExperimentConfig, prior: &SpectralPrior) -> Result<Dataset> {
    let mut rng = stream(config.seed, DATA_STREAM);
    match &config.target {
        TargetSpec::Zero => Ok(Dataset::None),
        TargetSpec::Density {
            observations,
            quad_points,
        } => {
            let values = match observations {
                DensitySource::Inline { values } => values.clone(),
                DensitySource::File { path } => read_values(path, "target.observations.path")?,
                DensitySource::Synthetic { truth, count } => {
                    truth.sample(*count, half_width(prior)?, (*quad_points).max(4097), &mut rng)
                }
            };
            Ok(Dataset::Values(values))
        }
        spec => {
            let data = spec.data_source().expect("gaussian targets carry a data source");
            match data {
                DataSource::Inline { values } => Ok(Dataset::Values(values.clone())),
                DataSource::File { path } => Ok(Dataset::Values(read_values(path, "target.data.path")?)),
                DataSource::Twin { truth, noise_sigma } => {
                    let (model, sigma) = forward_model(spec, prior)?.expect("gaussian targets have a forward model");
                    let truth = match truth {
                        Some(z) => CoefficientState::new(z.clone()),
                        None => sample_prior(prior, &mut rng),
                    };
                    let mut twin = synthesize_twin_data(model.as_ref(), &truth, noise_sigma.unwrap_or(sigma), &mut rng)?;
                    twin.seed = Some(config.seed);
                    Ok(Dataset::Twin(twin))
                }
            }
        }
    }
}

fn half_width(prior: &SpectralPrior) -> Result<f64> {
    match prior.domain() {
        crate::function_space::Domain::Interval { half_width } => Ok(half_width),
        _ => Err(Error::config("prior.domain", "density estimation needs an interval")),
    }
}

/// Build the target for `prior` from already-loaded data.
pub fn build_problem(spec: &TargetSpec, prior: SpectralPrior, data: &Dataset) -> Result<Problem> {
    let values = || {
        data.values()
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::config("target", "model needs observations"))
    };
    let (target, misfit): (Arc<dyn Target>, Option<Arc<dyn GaussianMisfit>>) = match spec {
        TargetSpec::Zero => (Arc::new(ZeroPotential), None),
        TargetSpec::Density { quad_points, .. } => {
            let d = DensityData {
                observations: values()?,
                ell: half_width(&prior)?,
                quad_points: *quad_points,
            };
            (Arc::new(DensityTarget::new(prior.clone(), d)?), None)
        }
        TargetSpec::Linear {
            weights,
            noise_variance,
            ..
        } => {
            let t = Arc::new(LinearGaussianTarget::new(&prior, weights.clone(), *noise_variance, values()?)?);
            (t.clone(), Some(t))
        }
        TargetSpec::Darcy { problem, .. } => {
            let f = DarcyForward::new(prior.clone(), problem.clone())?;
            let t = Arc::new(GaussianLikelihood::new(f, values()?, problem.noise_sigma)?);
            (t.clone(), Some(t))
        }
        TargetSpec::Stokes { problem, .. } => {
            let f = StokesForward::new(prior.clone(), problem.clone())?;
            let t = Arc::new(GaussianLikelihood::new(f, values()?, problem.noise_sigma)?);
            (t.clone(), Some(t))
        }
    };
    Ok(Problem { prior, target, misfit })
}

/// Prior and target at the config's own resolution, plus the data used.
pub fn build(config: &ExperimentConfig) -> Result<(Problem, Dataset)> {
    let prior = config.prior()?;
    let data = load_dataset(config, &prior)?;
    Ok((build_problem(&config.target, prior, &data)?, data))
}

/// The same problem at another mode count, sharing the data.
pub fn build_at_mesh(config: &ExperimentConfig, data: &Dataset, modes: usize) -> Result<Problem> {
    let spec = PriorSpec {
        modes,
        ..config.prior.ok_or_else(|| Error::config("prior", "required"))?
    };
    build_problem(&config.target, SpectralPrior::new(spec)?, data)
}
