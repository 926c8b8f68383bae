use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::acf::{iact, Trace};

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub observable: String,
    pub mean: f64,
    pub variance: f64,
    pub mcse: f64,
    pub iact: f64,
    pub n: usize,
    pub burn_in: usize,
}

/// Mean, variance, IACT and Monte Carlo standard error of a trace after burn-in.
pub fn summarize(trace: &Trace, max_lag: usize) -> Result<SummaryRow> {
    let x = trace.kept();
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let tau = iact(x, max_lag.min(n.saturating_sub(1)))?;
    Ok(SummaryRow {
        observable: trace.observable.to_string(),
        mean,
        variance,
        mcse: (variance * tau.max(0.0) / n as f64).sqrt(),
        iact: tau,
        n,
        burn_in: trace.burn_in,
    })
}

pub fn summary(traces: &[Trace], max_lag: usize) -> Result<Vec<SummaryRow>> {
    traces.iter().map(|t| summarize(t, max_lag)).collect()
}
