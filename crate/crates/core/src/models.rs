//! Concrete su(2) models: the two-level superposition probe family, closed
//! forms for the qubit, qudit and three-parameter encodings, and the
//! dimension-comparison figure `Γ`.

use serde::{Deserialize, Serialize};

use crate::encoding::{
    closed_generators, direction_vectors_2p, direction_vectors_3p, ModelKind, ModelPoint,
};
use crate::error::{Error, Result};
use crate::linalg::{norm3, sym_inverse, CVector, RMatrix, SymInverse, SINGULAR_REL_TOL};
use crate::metrology::{
    qfim_from_generators, uhlmann_from_generators, Probe, QfimMatrix, UhlmannMatrix,
};
use crate::spin::SpinRep;
use num_complex::Complex64;

/// Threshold on `1 − (n₁·r₀)² − (n_θ·r₀)²` below which the qubit QFIM is singular.
pub const QUBIT_DENOM_TOL: f64 = 1e-12;

/// `cos α |J⟩ + e^{iφ} sin α |−J⟩` in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub dim: usize,
    pub alpha: f64,
    pub phi_rel: f64,
}

impl ProbeSpec {
    pub fn new(dim: usize, alpha: f64, phi_rel: f64) -> Self {
        Self {
            dim,
            alpha,
            phi_rel,
        }
    }
}

pub fn make_probe(spec: &ProbeSpec) -> Result<Probe> {
    if spec.dim < 2 {
        return Err(Error::InvalidDimension(spec.dim));
    }
    let mut v = CVector::zeros(spec.dim);
    v[0] = Complex64::new(spec.alpha.cos(), 0.0);
    v[spec.dim - 1] += Complex64::from_polar(spec.alpha.sin(), spec.phi_rel);
    Probe::normalized(v)
}

/// Qubit Bloch vector `r₀ = 2⟨J⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVec([f64; 3]);

impl BlochVec {
    pub fn new(r0: [f64; 3]) -> Result<Self> {
        let n = norm3(&r0);
        if !(n <= 1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "Bloch vector norm {n} exceeds 1"
            )));
        }
        Ok(Self(r0))
    }

    pub fn from_probe(probe: &Probe) -> Result<Self> {
        if probe.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: probe.dim(),
            });
        }
        let rep = SpinRep::new(2)?;
        let psi = probe.amplitudes();
        Self::new([
            2.0 * rep.jx().expectation(psi),
            2.0 * rep.jy().expectation(psi),
            2.0 * rep.jz().expectation(psi),
        ])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Pure qubit state with this Bloch vector; requires `|r₀| = 1` to 1e-9.
    pub fn to_probe(&self) -> Result<Probe> {
        let n = self.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "Bloch vector norm {n} does not describe a pure state"
            )));
        }
        let [x, y, z] = self.0.map(|v| v / n);
        let polar = z.clamp(-1.0, 1.0).acos();
        let azimuth = y.atan2(x);
        Probe::normalized(CVector::from_vec(vec![
            Complex64::new((polar / 2.0).cos(), 0.0),
            Complex64::from_polar((polar / 2.0).sin(), azimuth),
        ]))
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    fn dot(&self, n: &[f64; 3]) -> f64 {
        self.0[0] * n[0] + self.0[1] * n[1] + self.0[2] * n[2]
    }
}

/// Two-parameter closed forms. `q` and the stored antisymmetric `d` use `(B, θ)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParamClosed {
    pub q: RMatrix,
    pub d_theta_b: f64,
    /// `ℛ`, or `None` when the QFIM is singular.
    pub r: Option<f64>,
}

impl TwoParamClosed {
    /// `D` with `D[(1, 0)] = D_θB`.
    pub fn uhlmann(&self) -> RMatrix {
        RMatrix::from_row_slice(2, 2, &[0.0, -self.d_theta_b, self.d_theta_b, 0.0])
    }
}

fn half_angle(point: &ModelPoint) -> (f64, f64) {
    (point.b() * point.t() / 2.0).sin_cos()
}

fn two_param_r(q: &RMatrix, d_theta_b: f64) -> Option<f64> {
    let det = q.determinant();
    match sym_inverse(q, SINGULAR_REL_TOL) {
        Ok(SymInverse::Inverse(_)) if det > 0.0 => Some((d_theta_b * d_theta_b / det).sqrt()),
        _ => None,
    }
}

/// Qubit closed forms from the Bloch vector.
///
/// `ℛ = sqrt((n₂·r₀)² / (1 − (n₁·r₀)² − (n_θ·r₀)²))`; the common factor
/// `4t² sin²(Bt/2)` cancels in that ratio, so the QFIM itself is also checked.
pub fn qubit2p_closed(r0: &BlochVec, point: &ModelPoint) -> Result<TwoParamClosed> {
    let f = direction_vectors_2p(point)?;
    let t = point.t();
    let (s, _) = half_angle(point);
    let a_theta = r0.dot(&f.n_theta.components());
    let a1 = r0.dot(&f.n1.components());
    let a2 = r0.dot(&f.n2.components());
    let q_bb = t * t * (1.0 - a_theta * a_theta);
    let q_tt = 4.0 * s * s * (1.0 - a1 * a1);
    let q_bt = 2.0 * t * s * a1 * a_theta;
    let q = RMatrix::from_row_slice(2, 2, &[q_bb, q_bt, q_bt, q_tt]);
    let d_theta_b = 2.0 * t * s * a2;
    let denom = 1.0 - a1 * a1 - a_theta * a_theta;
    let r = if denom > QUBIT_DENOM_TOL && two_param_r(&q, d_theta_b).is_some() {
        Some((a2 * a2 / denom).sqrt())
    } else {
        None
    };
    Ok(TwoParamClosed { q, d_theta_b, r })
}

/// Closed forms for `N > 3` with the superposition probe. Independent of `φ`.
pub fn qudit2p_closed(spec: &ProbeSpec, point: &ModelPoint) -> Result<TwoParamClosed> {
    if spec.dim <= 3 {
        return Err(Error::UnsupportedClosedForm(format!(
            "qudit closed forms need N > 3, got N = {}",
            spec.dim
        )));
    }
    if point.kind() != ModelKind::TwoParam {
        return Err(Error::InvalidPoint("expected a two-parameter point".into()));
    }
    let n1 = spec.dim as f64 - 1.0;
    let t = point.t();
    let (s, c) = half_angle(point);
    let (st, ct) = point.theta().sin_cos();
    let a = spec.alpha;
    let sin2a = (2.0 * a).sin();
    let q_bb = n1 * t * t * (ct * ct + n1 * sin2a * sin2a * st * st);
    let q_tt = 4.0 * n1 * (s.powi(4) + s * s * c * c * (n1 * ct * ct * sin2a * sin2a + st * st));
    let q_tb = n1
        * (t / 4.0)
        * (n1 - 2.0 - n1 * (4.0 * a).cos())
        * (point.b() * t).sin()
        * (2.0 * point.theta()).sin();
    let q = RMatrix::from_row_slice(2, 2, &[q_bb, q_tb, q_tb, q_tt]);
    let d_theta_b = -2.0 * t * n1 * (2.0 * a).cos() * ct * s * s;
    let r = two_param_r(&q, d_theta_b);
    Ok(TwoParamClosed { q, d_theta_b, r })
}

/// Three-parameter Uhlmann matrix in `(B, θ, φ)` order:
/// `D_Bθ = 4t s ⟨J_{n₂}⟩`, `D_Bφ = −4t s cosθ ⟨J_{n₁}⟩`, `D_θφ = −8 s² cosθ ⟨J_{n_θ}⟩`
/// with `s = sin(Bt/2)` and `n₁ = n_θ × n₂`.
pub fn threeparam_uhlmann_closed(
    rep: &SpinRep,
    probe: &Probe,
    point: &ModelPoint,
) -> Result<UhlmannMatrix> {
    if rep.dim() != probe.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            got: probe.dim(),
        });
    }
    let f = direction_vectors_3p(point)?;
    let psi = probe.amplitudes();
    let mean = |n| rep.j_direction(n).expectation(psi);
    let t = point.t();
    let (s, _) = half_angle(point);
    let ct = point.theta().cos();
    let d_bt = 4.0 * t * s * mean(&f.n2);
    let d_bp = -4.0 * t * s * ct * mean(&f.n1);
    let d_tp = -8.0 * s * s * ct * mean(&f.n_theta);
    let m = RMatrix::from_row_slice(
        3,
        3,
        &[0.0, d_bt, d_bp, -d_bt, 0.0, d_tp, -d_bp, -d_tp, 0.0],
    );
    UhlmannMatrix::new(m, ["B", "theta", "phi"].map(String::from).to_vec())
}

/// `ℛ = |cos 2α|` for the three-parameter model with `N ≥ 4`.
pub fn ai_threeparam_probe(dim: usize, alpha: f64) -> Result<f64> {
    if dim < 4 {
        return Err(Error::UnsupportedClosedForm(format!(
            "three-parameter AI closed form needs N >= 4, got N = {dim}"
        )));
    }
    Ok((2.0 * alpha).cos().abs())
}

/// `Γ = tr(Q_N Q_M⁻¹)`.
pub fn gamma_scaling(q_n: &QfimMatrix, q_m: &QfimMatrix, rel_tol: f64) -> Result<f64> {
    if q_n.dim() != q_m.dim() {
        return Err(Error::DimensionMismatch {
            expected: q_m.dim(),
            got: q_n.dim(),
        });
    }
    let inv = sym_inverse(q_m.matrix(), rel_tol)?.into_result()?;
    Ok((q_n.matrix() * inv).trace())
}

/// QFIM and Uhlmann matrix through the closed-form generators.
pub fn generator_pair(
    rep: &SpinRep,
    probe: &Probe,
    point: &ModelPoint,
) -> Result<(QfimMatrix, UhlmannMatrix)> {
    let gens = closed_generators(rep, point)?;
    Ok((
        qfim_from_generators(&gens, probe)?,
        uhlmann_from_generators(&gens, probe)?,
    ))
}
