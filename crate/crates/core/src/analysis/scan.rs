//! `T(θ, B) = ℛ − Δ` over a rectangular grid.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::{fmt_f64, fmt_opt, linspace, ProbeChoice};
use crate::encoding::{ModelKind, ModelPoint};
use crate::error::{Error, Result};
use crate::linalg::{RMatrix, SINGULAR_REL_TOL};
use crate::metrology::IncompatReport;
use crate::models::generator_pair;
use crate::spin::SpinRep;

pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_SHRINK_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub kind: ModelKind,
    pub probe: ProbeChoice,
    pub t: f64,
    pub theta_range: (f64, f64),
    pub theta_count: usize,
    pub b_range: (f64, f64),
    pub b_count: usize,
    /// Azimuth `φ` of the three-parameter field direction; ignored for two parameters.
    pub phi_param: f64,
    pub weight: Option<RMatrix>,
    pub rel_tol: f64,
}

impl ScanConfig {
    /// 101 × 101 grid, `θ ∈ [0, 2π]`, `B` over one period `[0, 2π/t]`.
    pub fn new(kind: ModelKind, probe: ProbeChoice, t: f64) -> Self {
        Self {
            kind,
            probe,
            t,
            theta_range: (0.0, 2.0 * PI),
            theta_count: DEFAULT_GRID,
            b_range: (0.0, 2.0 * PI / t),
            b_count: DEFAULT_GRID,
            phi_param: 0.0,
            weight: None,
            rel_tol: SINGULAR_REL_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "time must be > 0, got {}",
                self.t
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be > 0, got {}",
                self.rel_tol
            )));
        }
        linspace(self.theta_range.0, self.theta_range.1, self.theta_count)?;
        linspace(self.b_range.0, self.b_range.1, self.b_count)?;
        if self.probe.dim() < 2 {
            return Err(Error::InvalidDimension(self.probe.dim()));
        }
        if let Some(w) = &self.weight {
            let d = self.kind.num_params();
            if w.nrows() != d || w.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: w.nrows(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub theta: f64,
    pub b: f64,
    pub r: Option<f64>,
    pub delta: Option<f64>,
    pub c_sld: Option<f64>,
    pub c_h: Option<f64>,
    pub det_q: f64,
    pub singular: bool,
}

impl ScanCell {
    /// `ℛ − Δ` on regular cells.
    pub fn t_gap(&self) -> Option<f64> {
        Some(self.r? - self.delta?)
    }
}

/// Cells in row-major order, `θ` outer and `B` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub theta_count: usize,
    pub b_count: usize,
    pub cells: Vec<ScanCell>,
}

pub fn scan_t(config: &ScanConfig) -> Result<ScanGrid> {
    config.validate()?;
    let thetas = linspace(
        config.theta_range.0,
        config.theta_range.1,
        config.theta_count,
    )?;
    let bs = linspace(config.b_range.0, config.b_range.1, config.b_count)?;
    let rep = SpinRep::new(config.probe.dim())?;
    let probe = config.probe.build()?;
    let nb = bs.len();
    let cells = (0..thetas.len() * nb)
        .into_par_iter()
        .map(|idx| {
            let (theta, b) = (thetas[idx / nb], bs[idx % nb]);
            let point = ModelPoint::new(config.kind, b, theta, config.phi_param, config.t)?;
            let (q, d) = generator_pair(&rep, &probe, &point)?;
            let r = IncompatReport::evaluate(q, d, config.weight.clone(), config.rel_tol)?;
            Ok(ScanCell {
                theta,
                b,
                r: r.r_ai,
                delta: r.delta,
                c_sld: r.c_sld,
                c_h: r.c_h,
                det_q: r.det_q,
                singular: r.singular,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid {
        theta_count: thetas.len(),
        b_count: nb,
        cells,
    })
}

impl ScanGrid {
    pub fn regular(&self) -> impl Iterator<Item = &ScanCell> {
        self.cells.iter().filter(|c| !c.singular)
    }

    /// `theta,B,R,Delta,T,det_q,singular`; singular cells leave R, Delta and T empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "B", "R", "Delta", "T", "det_q", "singular"])?;
        for c in &self.cells {
            w.write_record([
                fmt_f64(c.theta),
                fmt_f64(c.b),
                fmt_opt(c.r),
                fmt_opt(c.delta),
                fmt_opt(c.t_gap()),
                fmt_f64(c.det_q),
                c.singular.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// `0 ≤ Δ ≤ ℛ ≤ 1` and `C^H ≥ C^SLD` on every regular cell.
    pub fn check_bounds(&self, tol: f64) -> Result<()> {
        for c in self.regular() {
            let (Some(r), Some(d), Some(cs), Some(ch)) = (c.r, c.delta, c.c_sld, c.c_h) else {
                continue;
            };
            if !(d >= -tol && d <= r + tol && r <= 1.0 + tol && ch >= cs - tol) {
                return Err(Error::NumericConsistency(format!(
                    "bound ordering violated at theta={}, B={}: R={r}, Delta={d}",
                    c.theta, c.b
                )));
            }
        }
        Ok(())
    }

    /// Fraction of regular cells with `T < threshold`; `None` without regular cells.
    pub fn fraction_below(&self, threshold: f64) -> Option<f64> {
        let (mut hit, mut total) = (0usize, 0usize);
        for t in self.regular().filter_map(ScanCell::t_gap) {
            total += 1;
            hit += usize::from(t < threshold);
        }
        (total > 0).then(|| hit as f64 / total as f64)
    }
}

/// Small-`T` fractions of two grids of the same shape.
pub fn shrinkage_stat(
    first: &ScanGrid,
    second: &ScanGrid,
    threshold: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    if first.theta_count != second.theta_count || first.b_count != second.b_count {
        return Err(Error::InvalidConfig(format!(
            "grid shapes differ: {}x{} vs {}x{}",
            first.theta_count, first.b_count, second.theta_count, second.b_count
        )));
    }
    Ok((
        first.fraction_below(threshold),
        second.fraction_below(threshold),
    ))
}
