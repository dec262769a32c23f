//! Single-point metrics document with cross-route residuals.

use serde::Serialize;

use super::ProbeChoice;
use crate::encoding::{
    closed_generators, numeric_generators, series_generators, unitary, GeneratorSet, ModelKind,
    ModelPoint, DEFAULT_FD_STEP, DEFAULT_SERIES_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, RMatrix};
use crate::metrology::{
    qfim_from_generators, qfim_from_state_derivatives, uhlmann_from_generators, IncompatReport,
    Probe, QfimMatrix, UhlmannMatrix,
};
use crate::spin::SpinRep;

/// `max_l ‖A_l − B_l‖₂ / max_l max(‖A_l‖₂, ‖B_l‖₂)`; zero when both sets vanish.
pub fn generator_residual(a: &GeneratorSet, b: &GeneratorSet) -> f64 {
    let diff = a
        .ops()
        .zip(b.ops())
        .map(|(x, y)| spectral_norm(&(x.as_matrix() - y.as_matrix())))
        .fold(0.0, f64::max);
    let scale = a
        .ops()
        .chain(b.ops())
        .map(|x| spectral_norm(x.as_matrix()))
        .fold(0.0, f64::max);
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Largest entrywise difference of `(Q, D)` pairs relative to the largest `|Q|` entry.
///
/// `|D_jk| ≤ sqrt(Q_jj Q_kk)`, so the QFIM sets the scale for both matrices.
pub fn pair_residual(a: (&QfimMatrix, &UhlmannMatrix), b: (&QfimMatrix, &UhlmannMatrix)) -> f64 {
    let diff = (a.0.matrix() - b.0.matrix())
        .amax()
        .max((a.1.matrix() - b.1.matrix()).amax());
    let scale = a.0.matrix().amax().max(b.0.matrix().amax());
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// State-derivative QFIM and Uhlmann matrix for `λ ↦ U(λ)|ψ₀⟩`.
pub fn state_derivative_pair(
    rep: &SpinRep,
    probe: &Probe,
    point: &ModelPoint,
    step: f64,
) -> Result<(QfimMatrix, UhlmannMatrix)> {
    let family = |lam: &[f64]| {
        let mut p = *point;
        for (i, &v) in lam.iter().enumerate() {
            p = p.with_param(i, v)?;
        }
        probe.evolve(&unitary(rep, &p))
    };
    let labels = point
        .kind()
        .params()
        .iter()
        .map(|p| p.label().to_string())
        .collect();
    qfim_from_state_derivatives(family, &point.params(), step, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouteResiduals {
    /// Closed form vs. commutator series; `None` if the series did not converge.
    pub series: Option<f64>,
    /// Closed form vs. finite differences of `U†`.
    pub finite_difference: f64,
    /// Generator-route `(Q, D)` vs. finite differences of the evolved state.
    pub state_derivative: f64,
}

impl RouteResiduals {
    pub fn max(&self) -> f64 {
        self.series
            .unwrap_or(0.0)
            .max(self.finite_difference)
            .max(self.state_derivative)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub model: ModelKind,
    pub dim: usize,
    pub probe: ProbeChoice,
    pub point: ModelPoint,
    pub labels: Vec<String>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub det_q: f64,
    pub c_sld: Option<f64>,
    pub c_h: Option<f64>,
    pub delta: Option<f64>,
    pub r_ai: Option<f64>,
    pub singular: bool,
    pub generator_route_residuals: RouteResiduals,
}

pub fn metrics_report(
    probe_choice: &ProbeChoice,
    point: &ModelPoint,
    weight: Option<RMatrix>,
    rel_tol: f64,
) -> Result<MetricsReport> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be > 0, got {rel_tol}"
        )));
    }
    let rep = SpinRep::new(probe_choice.dim())?;
    let probe = probe_choice.build()?;
    let closed = closed_generators(&rep, point)?;
    let series = match series_generators(&rep, point, DEFAULT_SERIES_TOL) {
        Ok(s) => Some(generator_residual(&closed, &s)),
        Err(Error::NonConvergence { .. }) => None,
        Err(e) => return Err(e),
    };
    let numeric = numeric_generators(&rep, point, DEFAULT_FD_STEP)?;
    let q = qfim_from_generators(&closed, &probe)?;
    let d = uhlmann_from_generators(&closed, &probe)?;
    let (qs, ds) = state_derivative_pair(&rep, &probe, point, DEFAULT_FD_STEP)?;
    let residuals = RouteResiduals {
        series,
        finite_difference: generator_residual(&closed, &numeric.generators),
        state_derivative: pair_residual((&q, &d), (&qs, &ds)),
    };
    let labels = q.labels().to_vec();
    let report = IncompatReport::evaluate(q, d, weight, rel_tol)?;
    Ok(MetricsReport {
        model: point.kind(),
        dim: probe.dim(),
        probe: *probe_choice,
        point: *point,
        labels,
        q: report.qfim_rows(),
        d: report.uhlmann_rows(),
        det_q: report.det_q,
        c_sld: report.c_sld,
        c_h: report.c_h,
        delta: report.delta,
        r_ai: report.r_ai,
        singular: report.singular,
        generator_route_residuals: residuals,
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
