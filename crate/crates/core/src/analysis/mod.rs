//! Experiment drivers behind the command-line tool.

pub mod fim_rank;
pub mod report;
pub mod scaling;
pub mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrology::Probe;
use crate::models::{make_probe, BlochVec, ProbeSpec};

pub use fim_rank::{fim_rank_experiment, RankExperimentConfig, RankReport};
pub use report::{metrics_report, MetricsReport};
pub use scaling::{scaling_table, ScalingTable};
pub use scan::{scan_t, shrinkage_stat, ScanConfig, ScanGrid};

/// Initial state of a model run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeChoice {
    Family(ProbeSpec),
    Bloch(BlochVec),
}

impl ProbeChoice {
    pub fn dim(&self) -> usize {
        match self {
            ProbeChoice::Family(s) => s.dim,
            ProbeChoice::Bloch(_) => 2,
        }
    }

    pub fn build(&self) -> Result<Probe> {
        match self {
            ProbeChoice::Family(s) => make_probe(s),
            ProbeChoice::Bloch(r) => r.to_probe(),
        }
    }
}

/// Seventeen significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid needs at least 2 points, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidConfig(format!("empty range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// Ordinary least-squares slope of `y` against `x`.
pub(crate) fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
