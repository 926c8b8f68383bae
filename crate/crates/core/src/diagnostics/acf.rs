use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{map_range, Execution};

/// What a scalar trace records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Observable {
    /// Field value `u(x)` at a point.
    Point { x: Vec<f64> },
    /// Whitened coefficient of one mode (0-based).
    Mode { index: usize },
    /// Permeability `exp(u(x))`.
    Kappa { x: [f64; 2] },
    /// Potential `Phi` of the current state.
    Potential,
    /// Active level of a truncated or sieve state.
    ActiveModes,
    /// Current noise variance `sigma^2`.
    NoiseVariance,
}

impl std::fmt::Display for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Observable::Point { x } => {
                let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                write!(f, "u({})", parts.join(","))
            }
            Observable::Mode { index } => write!(f, "z[{index}]"),
            Observable::Kappa { x } => write!(f, "kappa({},{})", x[0], x[1]),
            Observable::Potential => write!(f, "phi"),
            Observable::ActiveModes => write!(f, "active_modes"),
            Observable::NoiseVariance => write!(f, "sigma2"),
        }
    }
}

/// Per-step values of one observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub observable: Observable,
    pub values: Vec<f64>,
    pub burn_in: usize,
}

impl Trace {
    pub fn new(observable: Observable, values: Vec<f64>, burn_in: usize) -> Result<Self> {
        if values.len() <= burn_in {
            return Err(Error::invalid(
                "burn_in",
                format!("{burn_in} discards the whole trace of length {}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("trace value"));
        }
        Ok(Self {
            observable,
            values,
            burn_in,
        })
    }

    /// Values after burn-in.
    pub fn kept(&self) -> &[f64] {
        &self.values[self.burn_in..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    pub values: Vec<f64>,
    /// Set for constant traces, whose ACF is defined as `[1, 0, 0, ...]`.
    pub degenerate: bool,
}

/// Biased empirical autocorrelation up to `max_lag`.
pub fn autocorrelation(values: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    autocorrelation_with(Execution::default(), values, max_lag)
}

pub fn autocorrelation_with(execution: Execution, values: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    let n = values.len();
    if max_lag >= n {
        return Err(Error::invalid("max_lag", format!("{max_lag} must be below the trace length {n}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0 = centred.iter().map(|x| x * x).sum::<f64>();
    if c0 <= f64::MIN_POSITIVE * n as f64 {
        let mut acf = vec![0.0; max_lag + 1];
        acf[0] = 1.0;
        return Ok(Autocorrelation {
            values: acf,
            degenerate: true,
        });
    }
    let acf = map_range(execution, max_lag + 1, |k| {
        if k == 0 {
            1.0
        } else {
            centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum::<f64>() / c0
        }
    });
    Ok(Autocorrelation {
        values: acf,
        degenerate: false,
    })
}

/// Default window for the integrated autocorrelation time.
pub const DEFAULT_MAX_LAG: usize = 100;

/// `1 + 2 Σ_{k=1}^{max_lag} acf(k)`.
pub fn iact(values: &[f64], max_lag: usize) -> Result<f64> {
    iact_with(Execution::default(), values, max_lag)
}

pub fn iact_with(execution: Execution, values: &[f64], max_lag: usize) -> Result<f64> {
    let acf = autocorrelation_with(execution, values, max_lag)?;
    Ok(1.0 + 2.0 * acf.values[1..].iter().sum::<f64>())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0);
        let mut x: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 - phi * phi).sqrt();
        (0..n)
            .map(|_| {
                x = phi * x + rng.sample::<f64, _>(StandardNormal);
                x
            })
            .collect()
    }

    #[test]
    fn white_noise() {
        let x = ar1(0.0, 100_000, 1);
        let acf = autocorrelation(&x, 20).unwrap();
        assert_eq!(acf.values[0], 1.0);
        let se = 1.0 / (x.len() as f64).sqrt();
        assert!(acf.values[1..].iter().all(|r| r.abs() < 4.0 * se));
        let t = iact(&x, 100).unwrap();
        assert!((0.8..=1.2).contains(&t), "{t}");
    }

    #[test]
    fn ar1_closed_form() {
        let x = ar1(0.9, 200_000, 2);
        let acf = autocorrelation(&x, 10).unwrap();
        for k in 1..=10 {
            assert!((acf.values[k] - 0.9f64.powi(k as i32)).abs() < 0.03);
        }
        let t = iact(&x, 100).unwrap();
        assert!((t / 19.0 - 1.0).abs() < 0.1, "{t}");
    }

    #[test]
    fn constant_trace_is_flagged() {
        let acf = autocorrelation(&[2.0; 50], 5).unwrap();
        assert!(acf.degenerate);
        assert_eq!(acf.values, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(iact(&[2.0; 50], 5).unwrap(), 1.0);
    }

    #[test]
    fn lag_must_fit() {
        assert!(autocorrelation(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let x = ar1(0.5, 5_000, 3);
        let a = autocorrelation_with(Execution::Sequential, &x, 50).unwrap();
        let b = autocorrelation_with(Execution::Parallel, &x, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_validation() {
        assert!(Trace::new(Observable::Potential, vec![1.0; 3], 3).is_err());
        assert!(Trace::new(Observable::Potential, vec![1.0, f64::NAN], 0).is_err());
        let t = Trace::new(Observable::Mode { index: 0 }, vec![1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(t.kept(), &[2.0, 3.0]);
    }
}
