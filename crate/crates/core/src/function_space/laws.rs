use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prior on the truncation level: `p(i) ∝ exp(-rate * i)` on `1..=max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationLaw {
    rate: f64,
    log_pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl TruncationLaw {
    pub fn new(rate: f64, max_level: usize) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("trunc_rate", format!("must be positive and finite, got {rate}")));
        }
        if max_level == 0 {
            return Err(Error::invalid("modes", "truncation law needs at least one level"));
        }
        // log p(i) = -rate (i - 1) - log Z, computed relative to the mode at i = 1
        let rel: Vec<f64> = (0..max_level).map(|k| -rate * k as f64).collect();
        let log_z = rel.iter().map(|r| r.exp()).sum::<f64>().ln();
        let log_pmf: Vec<f64> = rel.iter().map(|r| r - log_z).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = log_pmf
            .iter()
            .map(|l| {
                acc += l.exp();
                acc
            })
            .collect();
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(Self { rate, log_pmf, cdf })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn max_level(&self) -> usize {
        self.log_pmf.len()
    }

    /// `ln p(level)`; `-inf` outside the support.
    pub fn log_pmf(&self, level: usize) -> f64 {
        if level == 0 || level > self.max_level() {
            f64::NEG_INFINITY
        } else {
            self.log_pmf[level - 1]
        }
    }

    pub fn pmf(&self, level: usize) -> f64 {
        self.log_pmf(level).exp()
    }

    pub fn mean(&self) -> f64 {
        (1..=self.max_level()).map(|i| i as f64 * self.pmf(i)).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c < u) + 1
    }
}

/// Sieve prior on switches: density `exp(-rate * sum chi_i)` relative to fair
/// Bernoulli switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveLaw {
    pub rate: f64,
}

impl SieveLaw {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::invalid("sieve_rate", format!("must be non-negative, got {rate}")));
        }
        Ok(Self { rate })
    }

    /// Log density relative to the fair-Bernoulli reference, up to a constant.
    pub fn log_prior(&self, switches: &[bool]) -> f64 {
        let on = switches.iter().filter(|&&b| b).count();
        if on == 0 {
            0.0
        } else {
            -self.rate * on as f64
        }
    }
}
