//! `Γ[Q^(N), Q^(M)]` against probe dimension, with a log-log slope per `α`.

use std::io::Write;
use std::path::Path;

use super::{fmt_f64, fmt_opt, ls_slope};
use crate::encoding::{ModelKind, ModelPoint};
use crate::error::{Error, Result};
use crate::metrology::QfimMatrix;
use crate::models::{gamma_scaling, generator_pair, make_probe, ProbeSpec};
use crate::spin::SpinRep;

/// Baseline dimension `M`: the qubit for two parameters, `N = 4` for three
/// (the three-parameter qubit QFIM is singular).
pub fn baseline_dim(kind: ModelKind) -> usize {
    match kind {
        ModelKind::TwoParam => 2,
        ModelKind::ThreeParam => 4,
    }
}

/// Abscissa of the fit: `ln(N − 1)` for two parameters, `ln N` for three.
pub fn scaling_abscissa(kind: ModelKind, dim: usize) -> f64 {
    match kind {
        ModelKind::TwoParam => (dim as f64 - 1.0).ln(),
        ModelKind::ThreeParam => (dim as f64).ln(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub alpha: f64,
    pub dim: usize,
    /// `None` when the baseline QFIM is singular.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub kind: ModelKind,
    pub baseline_dim: usize,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln Γ` per `α`, in input order.
    pub slopes: Vec<(f64, Option<f64>)>,
}

fn qfim_at(dim: usize, alpha: f64, phi_rel: f64, point: &ModelPoint) -> Result<QfimMatrix> {
    let rep = SpinRep::new(dim)?;
    let probe = make_probe(&ProbeSpec::new(dim, alpha, phi_rel))?;
    Ok(generator_pair(&rep, &probe, point)?.0)
}

pub fn scaling_table(
    alphas: &[f64],
    dims: &[usize],
    point: &ModelPoint,
    phi_rel: f64,
    rel_tol: f64,
) -> Result<ScalingTable> {
    let kind = point.kind();
    if alphas.is_empty() || dims.is_empty() {
        return Err(Error::InvalidConfig(
            "scaling needs at least one alpha and one N".into(),
        ));
    }
    if let Some(&bad) = dims.iter().find(|&&n| n < 4) {
        return Err(Error::InvalidConfig(format!(
            "scaling dimensions must be >= 4, got {bad}"
        )));
    }
    let m = baseline_dim(kind);
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for &alpha in alphas {
        let base = qfim_at(m, alpha, phi_rel, point)?;
        let mut fit = Vec::new();
        for &n in dims {
            let q_n = qfim_at(n, alpha, phi_rel, point)?;
            let gamma = match gamma_scaling(&q_n, &base, rel_tol) {
                Ok(g) => Some(g),
                Err(Error::Singular { .. }) => None,
                Err(e) => return Err(e),
            };
            if let Some(g) = gamma.filter(|&g| g > 0.0) {
                fit.push((scaling_abscissa(kind, n), g.ln()));
            }
            rows.push(ScalingRow {
                alpha,
                dim: n,
                gamma,
            });
        }
        slopes.push((alpha, ls_slope(&fit)));
    }
    Ok(ScalingTable {
        kind,
        baseline_dim: m,
        rows,
        slopes,
    })
}

impl ScalingTable {
    pub fn slope(&self, alpha: f64) -> Option<f64> {
        self.slopes
            .iter()
            .find(|(a, _)| *a == alpha)
            .and_then(|(_, s)| *s)
    }

    /// `alpha,N,Gamma,slope`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["alpha", "N", "Gamma", "slope"])?;
        for r in &self.rows {
            w.write_record([
                fmt_f64(r.alpha),
                r.dim.to_string(),
                fmt_opt(r.gamma),
                fmt_opt(self.slope(r.alpha)),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
