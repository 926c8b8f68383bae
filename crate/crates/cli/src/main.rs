use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fsmcmc::runner::{load_config, run, ExperimentKind};
use fsmcmc::Error;

#[derive(Debug, Parser)]
#[command(name = "fsmcmc", version, about = "Function-space MCMC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run chains and write traces and summaries.
    Sample(RunArgs),
    /// Mean acceptance over a grid of meshes and step sizes.
    Sweep(RunArgs),
    /// Adapt the step size towards a target acceptance.
    Tune(RunArgs),
    /// IACT table for several samplers on one target.
    Compare(RunArgs),
    /// Generate synthetic data from a known truth.
    Twin(RunArgs),
    /// Run built-in invariant checks.
    Validate(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Sample(a) => (ExperimentKind::Sample, a),
            Command::Sweep(a) => (ExperimentKind::Sweep, a),
            Command::Tune(a) => (ExperimentKind::Tune, a),
            Command::Compare(a) => (ExperimentKind::Compare, a),
            Command::Twin(a) => (ExperimentKind::Twin, a),
            Command::Validate(a) => (ExperimentKind::Validate, a),
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn report(e: &Error) -> ExitCode {
    let (kind, code) = match e {
        Error::Config { .. } | Error::Json(_) => ("config", EXIT_CONFIG),
        Error::Io { .. } => ("io", EXIT_RUNTIME),
        _ => ("runtime", EXIT_RUNTIME),
    };
    let body = serde_json::json!({ "error": kind, "message": e.to_string() });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let config = match load_config(&args.config).and_then(|c| c.with_overrides(args.seed, args.out.clone())) {
        Ok(c) => c,
        Err(e @ Error::Io { .. }) => {
            eprintln!("{}", serde_json::json!({ "error": "config", "message": e.to_string() }));
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => return report(&e),
    };
    if config.kind != kind {
        let e = Error::Config {
            path: "kind".into(),
            message: format!("config describes a `{}` experiment, not `{}`", config.kind.name(), kind.name()),
        };
        return report(&e);
    }
    match run(&config) {
        Ok(r) => {
            println!("{}", serde_json::to_string_pretty(&r.result).unwrap_or_default());
            eprintln!("wrote {}", r.output_dir.display());
            if r.passed == Some(false) {
                ExitCode::from(EXIT_RUNTIME)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => report(&e),
    }
}
