use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{sample_prior, SpectralPrior};
use crate::parallel::{map, Execution};
use crate::rng::stream;
use crate::samplers::{mh_step, ChainState, ProposalConfig, Target};

/// Mean acceptance probability over a grid of mesh sizes and step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCurve {
    /// Step sizes in the parameterization of the proposal configuration.
    pub scales: Vec<f64>,
    pub meshes: Vec<usize>,
    /// `mean_acceptance[m][s]` for mesh `meshes[m]` and scale `scales[s]`.
    pub mean_acceptance: Vec<Vec<f64>>,
    pub steps_per_cell: usize,
    pub seed: u64,
}

impl AcceptanceCurve {
    /// CSV with header `mesh,beta,mean_acceptance,steps,seed`, rows ordered by
    /// mesh then scale.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mesh,beta,mean_acceptance,steps,seed\n");
        for (m, row) in self.meshes.iter().zip(&self.mean_acceptance) {
            for (s, a) in self.scales.iter().zip(row) {
                let _ = writeln!(out, "{m},{s},{a},{},{}", self.steps_per_cell, self.seed);
            }
        }
        out
    }

    /// Acceptance at one scale across all meshes.
    pub fn column(&self, scale_index: usize) -> Vec<f64> {
        self.mean_acceptance.iter().map(|row| row[scale_index]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub steps: usize,
    /// Steps discarded before averaging; the chain starts from a prior draw.
    pub burn_in: usize,
    pub seed: u64,
    pub execution: Execution,
}

/// Run one chain per `(mesh, scale)` cell. `family(mesh)` builds the prior
/// and target at that resolution; `config.scale` is replaced by each entry
/// of `scales`. Cell `c` (row-major) uses random stream `c`.
pub fn acceptance_sweep<T, F>(
    family: F,
    config: &ProposalConfig,
    scales: &[f64],
    meshes: &[usize],
    options: SweepOptions,
) -> Result<AcceptanceCurve>
where
    T: Target,
    F: Fn(usize) -> Result<(SpectralPrior, T)> + Sync,
{
    if scales.is_empty() || meshes.is_empty() {
        return Err(Error::invalid("grid", "scale and mesh grids must be nonempty".to_string()));
    }
    if options.steps == 0 {
        return Err(Error::invalid("steps", "must be positive".to_string()));
    }
    let configs = scales
        .iter()
        .map(|&s| {
            let c = ProposalConfig {
                scale: config.scale.with_value(s),
                ..*config
            };
            c.validate().map(|_| c)
        })
        .collect::<Result<Vec<_>>>()?;
    let problems = map(options.execution, meshes.to_vec(), &family)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..meshes.len())
        .flat_map(|m| (0..scales.len()).map(move |s| (m, s)))
        .collect();
    let results = map(options.execution, cells, |(m, s)| {
        let (prior, target) = &problems[m];
        let mut rng = stream(options.seed, (m * scales.len() + s) as u64);
        let mut chain = ChainState::new(sample_prior(prior, &mut rng), target)?;
        let mut total = 0.0;
        for step in 0..options.burn_in + options.steps {
            let o = mh_step(&mut chain, target, prior, &configs[s], &mut rng)?;
            if step >= options.burn_in {
                total += o.accept_prob;
            }
        }
        Ok(total / options.steps as f64)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    Ok(AcceptanceCurve {
        scales: scales.to_vec(),
        meshes: meshes.to_vec(),
        mean_acceptance: results.chunks(scales.len()).map(<[f64]>::to_vec).collect(),
        steps_per_cell: options.steps,
        seed: options.seed,
    })
}
