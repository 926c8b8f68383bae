//! Experiment orchestration: JSON configs in, traces, summaries, curves and
//! manifests out.
//!
//! Every run is a pure function of its resolved config and master seed.
//! Chain `k` of a sample experiment, sampler `k` of a comparison and cell `k`
//! of a sweep draw from random stream `k`; synthetic data use a reserved
//! stream. The manifest's wall time is the only field that varies between
//! identical runs.

mod build;
mod config;
mod output;
mod run;
mod validate;

pub use build::{build, build_at_mesh, build_problem, load_dataset, Dataset, Problem, DATA_STREAM};
pub use config::{
    load_config, parse_config, ChainSpec, CompareEntry, CompareSpec, DataSource, DensitySource, ExperimentConfig,
    ExperimentKind, InitSpec, PrecisionMode, PrecisionSpec, ProposalSpec, SamplerSpec, SweepSpec, TargetSpec,
    ValidateSpec, DEFAULT_OUTPUT,
};
pub use output::{trace_csv, Manifest, OutputDir, VERSION};
pub use run::{run, run_chain, ChainOutput, Kernel, RunReport};
pub use validate::{
    darcy_manufactured_error, run_suites, sieve_switch_law, stokes_shear_error, Check, ValidationReport, SUITES,
};
