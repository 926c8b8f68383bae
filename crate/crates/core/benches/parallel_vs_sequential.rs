use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fsmcmc::diagnostics::{acceptance_sweep, autocorrelation_with, Observable, SweepOptions};
use fsmcmc::function_space::SpectralPrior;
use fsmcmc::models::{DensityData, DensityTarget, TrueDensity};
use fsmcmc::parallel::{map_range, Execution};
use fsmcmc::rng::stream;
use fsmcmc::runner::{run_chain, ChainSpec, Kernel, Problem};
use fsmcmc::samplers::ProposalConfig;
use rand::Rng;
use rand_distr::StandardNormal;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn density(modes: usize) -> fsmcmc::Result<(SpectralPrior, DensityTarget)> {
    let prior = SpectralPrior::one_d(2.0, 1.0, modes, 10.0)?;
    let obs = TrueDensity::Bimodal.sample(100, 10.0, 2049, &mut stream(1, 1 << 40));
    let target = DensityTarget::new(prior.clone(), DensityData::new(obs, 10.0))?;
    Ok((prior, target))
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("acceptance_sweep");
    g.sample_size(10);
    let cfg = ProposalConfig::pcn_beta(0.2).unwrap();
    for execution in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &execution| {
            let options = SweepOptions { steps: 500, burn_in: 0, seed: 3, execution };
            b.iter(|| acceptance_sweep(density, &cfg, &[0.1, 0.3], &[16, 64], options).unwrap());
        });
    }
    g.finish();
}

fn chains(c: &mut Criterion) {
    let mut g = c.benchmark_group("multi_chain");
    g.sample_size(10);
    let (prior, target) = density(32).unwrap();
    let problem = Problem { prior, target: Arc::new(target), misfit: None };
    let kernel = Kernel::Mh(ProposalConfig::pcn_beta(0.2).unwrap());
    let spec = ChainSpec::new(1_000);
    let obs = [Observable::Point { x: vec![0.0] }];
    for execution in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &execution| {
            b.iter(|| {
                map_range(execution, 4, |k| {
                    run_chain(&problem, &kernel, None, &spec, &obs, &mut stream(5, k as u64)).unwrap().mean_accept_prob
                })
            });
        });
    }
    g.finish();
}

fn acf(c: &mut Criterion) {
    let mut g = c.benchmark_group("autocorrelation");
    let mut rng = stream(7, 0);
    let x: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
    for execution in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &execution| {
            b.iter(|| autocorrelation_with(execution, black_box(&x), 500).unwrap());
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, chains, acf);
criterion_main!(benches);
