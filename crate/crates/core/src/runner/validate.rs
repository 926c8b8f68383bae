//! Self-checks runnable from the command line.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::diagnostics::{iact, DEFAULT_MAX_LAG};
use crate::error::{Error, Result};
use crate::function_space::{sample_prior, CoefficientState, Domain, PriorSpec, SieveLaw, SpectralPrior, TruncationLaw, Wave};
use crate::models::{
    darcy_solve_with, min_image, stokes_evolve, stokes_prior, DensityData, DensityTarget, LinearGaussianTarget,
    ObservationKind, StokesForward, StokesProblem, TrueDensity,
};
use crate::parallel::{map, Execution};
use crate::rng::stream;
use crate::samplers::{
    finite_difference_gradient, mh_step, rtm_step, sieve_switch_move, ChainState, Precond, ProposalConfig,
    ProposalKind, StepScale, Target, ZeroPotential,
};

pub const SUITES: &[&str] = &[
    "prior-preservation",
    "theta-degeneracy",
    "rw-degeneracy",
    "sieve-detailed-balance",
    "rtm-invariance",
    "conjugate-linear",
    "gradient-check",
    "darcy-convergence",
    "stokes-forward",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub criterion: String,
    pub statistics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Builder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Builder {
    fn check(&mut self, name: &str, passed: bool, criterion: &str, stats: &[(&str, f64)]) {
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name: name.to_string(),
            passed,
            criterion: criterion.to_string(),
            statistics: stats.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
    }
}

/// Run one suite, or every suite for `"all"`.
pub fn run_suites(name: &str, seed: u64, execution: Execution) -> Result<ValidationReport> {
    let names: Vec<&'static str> = if name == "all" {
        SUITES.to_vec()
    } else {
        vec![*SUITES.iter().find(|s| **s == name).ok_or_else(|| {
            Error::config("validate.suite", format!("unknown suite `{name}`; available: all, {}", SUITES.join(", ")))
        })?]
    };
    let mut checks = Vec::new();
    for (i, suite) in names.iter().enumerate() {
        let mut b = Builder {
            suite,
            checks: Vec::new(),
        };
        let s = seed.wrapping_add(i as u64);
        match *suite {
            "prior-preservation" => prior_preservation(&mut b, s)?,
            "theta-degeneracy" => theta_degeneracy(&mut b, s, execution)?,
            "rw-degeneracy" => rw_degeneracy(&mut b, s, execution)?,
            "sieve-detailed-balance" => sieve_detailed_balance(&mut b, s)?,
            "rtm-invariance" => rtm_invariance(&mut b, s)?,
            "conjugate-linear" => conjugate_linear(&mut b, s)?,
            "gradient-check" => gradient_check(&mut b, s)?,
            "darcy-convergence" => darcy_convergence(&mut b)?,
            "stokes-forward" => stokes_forward(&mut b)?,
            _ => unreachable!(),
        }
        checks.extend(b.checks);
    }
    Ok(ValidationReport {
        suites: names.iter().map(|s| s.to_string()).collect(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn interval_prior(alpha: f64, modes: usize) -> Result<SpectralPrior> {
    SpectralPrior::one_d(alpha, 1.0, modes, 10.0)
}

/// Mean and Monte Carlo standard error of a correlated trace.
fn mean_and_mcse(x: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let tau = iact(x, DEFAULT_MAX_LAG)?.max(1.0);
    Ok((mean, (var * tau / n).sqrt()))
}

fn prior_preservation(b: &mut Builder, seed: u64) -> Result<()> {
    let prior = interval_prior(1.0, 64)?;
    let cfg = ProposalConfig::pcn_beta(0.5)?;
    let mut rng = stream(seed, 0);
    let mut chain = ChainState::new(sample_prior(&prior, &mut rng), &ZeroPotential)?;
    let steps = 20_000;
    let mut min_prob: f64 = 1.0;
    let mut sq = vec![Vec::with_capacity(steps); 10];
    for _ in 0..steps {
        min_prob = min_prob.min(mh_step(&mut chain, &ZeroPotential, &prior, &cfg, &mut rng)?.accept_prob);
        for (i, t) in sq.iter_mut().enumerate() {
            t.push(chain.state.z()[i].powi(2));
        }
    }
    b.check(
        "acceptance-identically-one",
        min_prob == 1.0,
        "every pCN step with zero potential has acceptance probability exactly 1",
        &[("min_accept_prob", min_prob)],
    );
    let mut worst: f64 = 0.0;
    for t in &sq {
        // E[z^2] = 1 in whitened coordinates, i.e. Var(xi_i) = lambda_i^2
        let (m, se) = mean_and_mcse(t)?;
        worst = worst.max((m - 1.0).abs() / se);
    }
    b.check(
        "mode-variances",
        worst <= 3.0,
        "per-mode variance of modes 1-10 within 3 standard errors of the prior eigenvalue",
        &[("max_standardized_error", worst), ("steps", steps as f64)],
    );
    Ok(())
}

const MESHES: [usize; 4] = [16, 64, 256, 1024];

fn zero_potential_acceptance(
    cfg: ProposalConfig,
    alpha: f64,
    steps: usize,
    seed: u64,
    execution: Execution,
) -> Result<Vec<f64>> {
    map(execution, MESHES.iter().enumerate().collect(), |(k, &d)| {
        let prior = interval_prior(alpha, d)?;
        let mut rng = stream(seed, k as u64);
        let mut chain = ChainState::new(sample_prior(&prior, &mut rng), &ZeroPotential)?;
        let mut total = 0.0;
        for _ in 0..steps {
            total += mh_step(&mut chain, &ZeroPotential, &prior, &cfg, &mut rng)?.accept_prob;
        }
        Ok(total / steps as f64)
    })
    .into_iter()
    .collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn theta_degeneracy(b: &mut Builder, seed: u64, execution: Execution) -> Result<()> {
    let off = zero_potential_acceptance(ProposalConfig::theta_cn(0.5, 0.3, Precond::Covariance)?, 1.0, 2000, seed, execution)?;
    let on = zero_potential_acceptance(ProposalConfig::theta_cn(0.5, 0.5, Precond::Covariance)?, 1.0, 2000, seed, execution)?;
    let stats: Vec<(String, f64)> = MESHES.iter().zip(&off).map(|(d, a)| (format!("theta_0.3_d{d}"), *a)).collect();
    let refs: Vec<(&str, f64)> = stats.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    b.check(
        "theta-0.3-decays",
        strictly_decreasing(&off),
        "mean acceptance strictly decreases across d = 16, 64, 256, 1024 at theta = 0.3",
        &refs,
    );
    let min_on = on.iter().copied().fold(1.0, f64::min);
    b.check(
        "theta-0.5-constant",
        on.iter().all(|&a| a == 1.0),
        "mean acceptance is exactly 1 on every mesh at theta = 0.5",
        &[("min_acceptance", min_on)],
    );
    Ok(())
}

fn rw_degeneracy(b: &mut Builder, seed: u64, execution: Execution) -> Result<()> {
    let cfg = ProposalConfig::new(ProposalKind::RwCovariance, StepScale::Delta(0.01))?;
    let acc = zero_potential_acceptance(cfg, 1.0, 2000, seed, execution)?;
    let drop = acc[0] - acc[acc.len() - 1];
    b.check(
        "rw-c-decays",
        strictly_decreasing(&acc) && drop >= 0.2,
        "standard random walk acceptance strictly decreases with d and drops by at least 0.2 from d = 16 to 1024",
        &[("acceptance_d16", acc[0]), ("acceptance_d1024", acc[3]), ("drop", drop)],
    );
    Ok(())
}

/// Exact stationary law of the switches at fixed coefficients.
pub fn sieve_switch_law<T: Target + ?Sized>(target: &T, z: &[f64], law: &SieveLaw) -> Result<Vec<f64>> {
    let n = z.len();
    let mut logw = Vec::with_capacity(1 << n);
    for code in 0..1usize << n {
        let switches: Vec<bool> = (0..n).map(|i| code >> i & 1 == 1).collect();
        let lp = law.log_prior(&switches);
        let phi = target.potential(&CoefficientState::with_switches(z.to_vec(), switches)?)?;
        logw.push(lp - phi);
    }
    let m = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - m).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

fn switch_code(s: &CoefficientState) -> usize {
    s.switches()
        .map(|sw| sw.iter().enumerate().map(|(i, &b)| usize::from(b) << i).sum())
        .unwrap_or(0)
}

fn sieve_detailed_balance(b: &mut Builder, seed: u64) -> Result<()> {
    let n = 8;
    let prior = interval_prior(1.0, n)?;
    let mut rng = stream(seed, 0);
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let data: Vec<f64> = (0..n).map(|i| 0.3 * (i as f64 + 1.0).sin()).collect();
    let target = LinearGaussianTarget::new(&prior, vec![1.0; n], 0.5, data)?;
    let law = SieveLaw::new(1.5)?;
    let exact = sieve_switch_law(&target, &z, &law)?;
    let mut chain = ChainState::new(CoefficientState::with_switches(z, vec![false; n])?, &target)?;
    let moves = 1_000_000;
    let mut counts = vec![0usize; 1 << n];
    for _ in 0..moves {
        sieve_switch_move(&mut chain, &target, &law, &mut rng)?;
        counts[switch_code(&chain.state)] += 1;
    }
    let tv = 0.5
        * counts
            .iter()
            .zip(&exact)
            .map(|(&c, p)| (c as f64 / moves as f64 - p).abs())
            .sum::<f64>();
    b.check(
        "switch-law-tv",
        tv <= 0.02,
        "empirical switch distribution within total variation 0.02 of the enumerated target over 10^6 moves",
        &[("tv_distance", tv), ("moves", moves as f64)],
    );
    Ok(())
}

fn rtm_invariance(b: &mut Builder, seed: u64) -> Result<()> {
    let n = 10;
    let law = TruncationLaw::new(0.5, n)?;
    let mut rng = stream(seed, 0);
    let mut chain = ChainState::new(CoefficientState::truncated(vec![0.0; n], n)?, &ZeroPotential)?;
    let steps = 200_000;
    let mut counts = vec![0usize; n + 1];
    for _ in 0..steps {
        rtm_step(&mut chain, &ZeroPotential, &law, 0.5, &mut rng)?;
        counts[chain.state.truncation().unwrap_or(0)] += 1;
    }
    let tv = 0.5 * (1..=n).map(|d| (counts[d] as f64 / steps as f64 - law.pmf(d)).abs()).sum::<f64>();
    b.check(
        "level-law-tv",
        tv <= 0.02,
        "with zero potential the truncation level follows its prior law (total variation <= 0.02)",
        &[("tv_distance", tv), ("steps", steps as f64)],
    );
    Ok(())
}

fn conjugate_linear(b: &mut Builder, seed: u64) -> Result<()> {
    let prior = interval_prior(1.0, 32)?;
    let m = 4;
    let mut rng = stream(seed, 0);
    let data: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let target = LinearGaussianTarget::new(&prior, vec![2.0; m], 0.25, data)?;
    let oracle = target.posterior_oracle();
    let cfg = ProposalConfig::pcn_beta(0.3)?;
    let mut chain = ChainState::new(sample_prior(&prior, &mut rng), &target)?;
    for _ in 0..5_000 {
        mh_step(&mut chain, &target, &prior, &cfg, &mut rng)?;
    }
    let steps = 100_000;
    let mut traces = vec![Vec::with_capacity(steps); m];
    for _ in 0..steps {
        mh_step(&mut chain, &target, &prior, &cfg, &mut rng)?;
        for (i, t) in traces.iter_mut().enumerate() {
            t.push(chain.state.z()[i]);
        }
    }
    let (mut worst_mean, mut worst_var): (f64, f64) = (0.0, 0.0);
    for (t, post) in traces.iter().zip(&oracle) {
        let (mean, se) = mean_and_mcse(t)?;
        worst_mean = worst_mean.max((mean - post.mean).abs() / se);
        let centred: Vec<f64> = t.iter().map(|x| (x - post.mean).powi(2)).collect();
        let (var, se) = mean_and_mcse(&centred)?;
        worst_var = worst_var.max((var - post.variance).abs() / se);
    }
    b.check(
        "posterior-moments",
        worst_mean <= 3.0 && worst_var <= 3.0,
        "pCN posterior mean and variance of each observed mode within 3 MCSE of the conjugate closed form",
        &[("max_mean_error_in_mcse", worst_mean), ("max_variance_error_in_mcse", worst_var)],
    );
    Ok(())
}

fn gradient_check(b: &mut Builder, seed: u64) -> Result<()> {
    let mut rng = stream(seed, 0);
    let prior = interval_prior(1.0, 24)?;
    let obs = TrueDensity::Bimodal.sample(50, 10.0, 2049, &mut rng);
    let density = DensityTarget::new(prior.clone(), DensityData::new(obs, 10.0))?;
    let linear = LinearGaussianTarget::new(&prior, vec![1.5; 6], 0.3, vec![0.2, -0.1, 0.4, 0.0, 1.0, -0.5])?;
    let state = sample_prior(&prior, &mut rng);
    let rel = |t: &dyn Target| -> Result<f64> {
        let g = t.gradient(&state).ok_or(Error::MissingGradient)??;
        let fd = finite_difference_gradient(t, &state, 1e-5)?;
        let scale = fd.iter().map(|x| x.abs()).fold(1e-12, f64::max);
        Ok(g.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale)
    };
    let (d, l) = (rel(&density)?, rel(&linear)?);
    b.check(
        "analytic-gradients",
        d <= 1e-5 && l <= 1e-5,
        "analytic gradients agree with central differences to 1e-5 relative",
        &[("density_relative_error", d), ("linear_relative_error", l)],
    );
    Ok(())
}

/// Max nodal error for the manufactured solution `sin(pi x) sin(pi y)` with
/// permeability `exp(x y)`.
pub fn darcy_manufactured_error(cells: usize) -> Result<f64> {
    let p = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    // -div(k grad p) with k = exp(x y): -k (lap p + y p_x + x p_y)
    let source = |x: [f64; 2]| {
        let k = (x[0] * x[1]).exp();
        let px = PI * (PI * x[0]).cos() * (PI * x[1]).sin();
        let py = PI * (PI * x[0]).sin() * (PI * x[1]).cos();
        -k * (-2.0 * PI * PI * p(x) + x[1] * px + x[0] * py)
    };
    Ok(darcy_solve_with(cells, |x| x[0] * x[1], source, 0.0)?.max_error(p))
}

fn darcy_convergence(b: &mut Builder) -> Result<()> {
    let e: Vec<f64> = [16, 32, 64].iter().map(|&j| darcy_manufactured_error(j)).collect::<Result<_>>()?;
    let r = [e[0] / e[1], e[1] / e[2]];
    b.check(
        "second-order",
        r.iter().all(|x| (3.5..=4.5).contains(x)),
        "max-error ratio per mesh doubling over J = 16, 32, 64 lies in [3.5, 4.5]",
        &[("ratio_16_32", r[0]), ("ratio_32_64", r[1]), ("error_64", e[2])],
    );
    Ok(())
}

/// Error of the forward-Euler tracer for a single shear mode at time 1.
pub fn stokes_shear_error(dt: f64) -> Result<f64> {
    let nu = 0.1;
    let prior = stokes_prior(20, 400.0, 2.0, nu)?;
    let idx = prior
        .modes()
        .iter()
        .position(|m| (m.p, m.q, m.wave) == (1, 0, Wave::Cos))
        .ok_or(Error::invalid("modes", "shear mode missing"))?;
    let mut z = vec![0.0; prior.mode_count()];
    z[idx] = 0.5;
    let problem = StokesProblem {
        viscosity: nu,
        obs_kind: ObservationKind::Lagrangian,
        obs_times: vec![1.0],
        positions: vec![[0.1, 0.4]],
        euler_dt: dt,
        noise_sigma: 0.01,
    };
    let f = StokesForward::new(prior.clone(), problem)?;
    let end = f.lagrangian_trace(&CoefficientState::new(z))?[0][0];
    // velocity (0, A e^{-rate t} sqrt2 cos(2 pi x)) leaves x fixed
    let amp = 0.5 * prior.std_devs()[idx] * 2f64.sqrt() * (2.0 * PI * 0.1).cos();
    let rate = nu * 4.0 * PI * PI;
    let exact = 0.4 + amp * (1.0 - (-rate).exp()) / rate;
    Ok(min_image(end[1] - exact).abs())
}

fn stokes_forward(b: &mut Builder) -> Result<()> {
    let nu = 0.1;
    let prior = SpectralPrior::new(PriorSpec {
        alpha: 2.0,
        scale: 1.0,
        modes: 40,
        domain: Domain::Torus,
    })?;
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.5, 1.0, 2.0] {
        let evolved = stokes_evolve(&prior, &vec![1.0; 40], nu, t);
        for (m, c) in prior.modes().iter().zip(&evolved) {
            let k2 = 4.0 * PI * PI * f64::from(m.p * m.p + m.q * m.q);
            let expected = (-nu * k2 * t).exp();
            worst = worst.max((c - expected).abs() / expected);
        }
    }
    b.check(
        "mode-decay",
        worst <= 1e-12,
        "per-mode decay equals exp(-nu |k|^2 t) to 1e-12 relative",
        &[("max_relative_error", worst)],
    );
    let ratio = stokes_shear_error(0.01)? / stokes_shear_error(0.005)?;
    b.check(
        "euler-first-order",
        (1.8..=2.2).contains(&ratio),
        "Lagrangian Euler error halves with the time step (ratio in [1.8, 2.2])",
        &[("error_ratio", ratio)],
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_suites_pass() {
        for s in ["gradient-check", "darcy-convergence", "stokes-forward", "theta-degeneracy", "rw-degeneracy"] {
            let r = run_suites(s, 1, Execution::Parallel).unwrap();
            assert!(r.passed, "{s}: {:#?}", r.checks);
        }
    }

    #[test]
    fn unknown_suite_errors() {
        let e = run_suites("nope", 1, Execution::Sequential).unwrap_err().to_string();
        assert!(e.contains("stokes-forward"));
    }

    #[test]
    fn enumerated_switch_law_is_normalized() {
        let prior = interval_prior(1.0, 3).unwrap();
        let t = LinearGaussianTarget::new(&prior, vec![1.0; 3], 1.0, vec![0.5, 0.0, -0.5]).unwrap();
        let p = sieve_switch_law(&t, &[1.0, 2.0, 3.0], &SieveLaw::new(0.5).unwrap()).unwrap();
        assert_eq!(p.len(), 8);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // with zero potential the law is a product of Bernoulli(e^-r / (1 + e^-r))
        let p0 = sieve_switch_law(&ZeroPotential, &[0.0; 2], &SieveLaw::new(0.5).unwrap()).unwrap();
        let q = (-0.5f64).exp() / (1.0 + (-0.5f64).exp());
        assert!((p0[3] - q * q).abs() < 1e-12);
    }
}
