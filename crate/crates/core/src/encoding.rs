//! Parametric su(2) Hamiltonians and their generators `ℋ_l = i (∂_l U†) U`.
//!
//! The generators are available through three routes that do not share code
//! beyond the spin matrices:
//!
//! * [`closed_generators`]: rotated spin operators along a local frame.
//! * [`series_generators`]: the nested-commutator series
//!   `ℋ_l = i Σ_n f_n H^{×n}(∂_l H)` with `f_n = (it)^{n+1}/(n+1)!`.
//! * [`numeric_generators`]: central finite differences of `U†`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, expm_i, CMatrix, HermitianMatrix, UnitVec3, I};
use crate::spin::SpinRep;

/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default truncation threshold for the commutator series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;
/// Maximum number of series terms.
pub const SERIES_MAX_TERMS: usize = 200;
const HERMITIZATION_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `H = B (cosθ J_x + sinθ J_z)`.
    #[serde(rename = "two")]
    TwoParam,
    /// `H = B n_θ^(3)·J` with `n_θ^(3) = (cosθ cosφ, cosθ sinφ, sinθ)`.
    #[serde(rename = "three")]
    ThreeParam,
}

impl ModelKind {
    pub fn num_params(self) -> usize {
        match self {
            ModelKind::TwoParam => 2,
            ModelKind::ThreeParam => 3,
        }
    }

    pub fn params(self) -> &'static [Param] {
        match self {
            ModelKind::TwoParam => &[Param::B, Param::Theta],
            ModelKind::ThreeParam => &[Param::B, Param::Theta, Param::Phi],
        }
    }
}

/// Estimated parameter. Ordering is always `(B, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    B,
    Theta,
    Phi,
}

impl Param {
    pub fn label(self) -> &'static str {
        match self {
            Param::B => "B",
            Param::Theta => "theta",
            Param::Phi => "phi",
        }
    }
}

/// Parameter values plus evolution time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    b: f64,
    theta: f64,
    phi: Option<f64>,
    t: f64,
}

impl ModelPoint {
    pub fn two(b: f64, theta: f64, t: f64) -> Result<Self> {
        Self::validate(b, theta, None, t)
    }

    pub fn three(b: f64, theta: f64, phi: f64, t: f64) -> Result<Self> {
        Self::validate(b, theta, Some(phi), t)
    }

    pub fn new(kind: ModelKind, b: f64, theta: f64, phi: f64, t: f64) -> Result<Self> {
        match kind {
            ModelKind::TwoParam => Self::two(b, theta, t),
            ModelKind::ThreeParam => Self::three(b, theta, phi, t),
        }
    }

    fn validate(b: f64, theta: f64, phi: Option<f64>, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidPoint(format!(
                "evolution time must be > 0, got {t}"
            )));
        }
        if !b.is_finite() || !theta.is_finite() || !phi.unwrap_or(0.0).is_finite() {
            return Err(Error::InvalidPoint("non-finite parameter".into()));
        }
        Ok(Self { b, theta, phi, t })
    }

    pub fn kind(&self) -> ModelKind {
        if self.phi.is_some() {
            ModelKind::ThreeParam
        } else {
            ModelKind::TwoParam
        }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> Option<f64> {
        self.phi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Parameter vector in `(B, θ[, φ])` order.
    pub fn params(&self) -> Vec<f64> {
        let mut v = vec![self.b, self.theta];
        v.extend(self.phi);
        v
    }

    /// Copy with parameter `index` replaced.
    pub fn with_param(&self, index: usize, value: f64) -> Result<Self> {
        let mut p = *self;
        match (index, &mut p.phi) {
            (0, _) => p.b = value,
            (1, _) => p.theta = value,
            (2, Some(phi)) => *phi = value,
            _ => {
                return Err(Error::InvalidPoint(format!(
                    "parameter index {index} out of range for {:?}",
                    self.kind()
                )))
            }
        }
        Ok(p)
    }

    fn half_angle(&self) -> (f64, f64) {
        let h = self.b * self.t / 2.0;
        (h.sin(), h.cos())
    }
}

/// Local frame of the two-parameter model.
#[derive(Debug, Clone, Copy)]
pub struct Frame2 {
    pub n_theta: UnitVec3,
    pub n_theta_prime: UnitVec3,
    pub n1: UnitVec3,
    pub n2: UnitVec3,
}

/// Local frame of the three-parameter model. `n1 = n_theta × n2`.
#[derive(Debug, Clone, Copy)]
pub struct Frame3 {
    pub n_theta: UnitVec3,
    pub n1: UnitVec3,
    pub n2: UnitVec3,
}

pub fn direction_vectors_2p(point: &ModelPoint) -> Result<Frame2> {
    if point.kind() != ModelKind::TwoParam {
        return Err(Error::InvalidPoint("expected a two-parameter point".into()));
    }
    let (st, ct) = point.theta.sin_cos();
    let (s, c) = point.half_angle();
    Ok(Frame2 {
        n_theta: UnitVec3::from_trig([ct, 0.0, st]),
        n_theta_prime: UnitVec3::from_trig([-st, 0.0, ct]),
        n1: UnitVec3::from_trig([c * st, -s, -c * ct]),
        n2: UnitVec3::from_trig([s * st, c, -s * ct]),
    })
}

pub fn direction_vectors_3p(point: &ModelPoint) -> Result<Frame3> {
    let phi = point
        .phi
        .ok_or_else(|| Error::InvalidPoint("expected a three-parameter point".into()))?;
    let (st, ct) = point.theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (s, c) = point.half_angle();
    Ok(Frame3 {
        n_theta: UnitVec3::from_trig([ct * cp, ct * sp, st]),
        n1: UnitVec3::from_trig([s * sp + c * st * cp, -s * cp + c * st * sp, -c * ct]),
        n2: UnitVec3::from_trig([c * sp - s * st * cp, -c * cp - s * st * sp, s * ct]),
    })
}

fn field_direction(point: &ModelPoint) -> [f64; 3] {
    let (st, ct) = point.theta.sin_cos();
    match point.phi {
        None => [ct, 0.0, st],
        Some(phi) => {
            let (sp, cp) = phi.sin_cos();
            [ct * cp, ct * sp, st]
        }
    }
}

/// `H = B n_θ · J`.
pub fn hamiltonian(rep: &SpinRep, point: &ModelPoint) -> HermitianMatrix {
    rep.j_vector(&field_direction(point)).scale(point.b)
}

/// `U = exp(−i t H)`.
pub fn unitary(rep: &SpinRep, point: &ModelPoint) -> CMatrix {
    expm_i(&hamiltonian(rep, point), point.t)
}

/// `∂_l H` in `(B, θ[, φ])` order.
pub fn hamiltonian_derivatives(rep: &SpinRep, point: &ModelPoint) -> Vec<HermitianMatrix> {
    let (st, ct) = point.theta.sin_cos();
    let b = point.b;
    match point.phi {
        None => vec![
            rep.j_vector(&[ct, 0.0, st]),
            rep.j_vector(&[-b * st, 0.0, b * ct]),
        ],
        Some(phi) => {
            let (sp, cp) = phi.sin_cos();
            vec![
                rep.j_vector(&[ct * cp, ct * sp, st]),
                rep.j_vector(&[-b * st * cp, -b * st * sp, b * ct]),
                rep.j_vector(&[-b * ct * sp, b * ct * cp, 0.0]),
            ]
        }
    }
}

/// Generators `ℋ_l`, one per parameter, in `(B, θ[, φ])` order.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    entries: Vec<(Param, HermitianMatrix)>,
}

impl GeneratorSet {
    pub fn new(entries: Vec<(Param, HermitianMatrix)>) -> Result<Self> {
        if let Some((_, first)) = entries.first() {
            let dim = first.dim();
            if let Some((_, bad)) = entries.iter().find(|(_, h)| h.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bad.dim(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map_or(0, |(_, h)| h.dim())
    }

    pub fn labels(&self) -> Vec<Param> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    pub fn get(&self, index: usize) -> &HermitianMatrix {
        &self.entries[index].1
    }

    pub fn ops(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.entries.iter().map(|(_, h)| h)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Param, HermitianMatrix)> {
        self.entries.iter()
    }
}

/// Closed-form generators for either model.
pub fn closed_generators(rep: &SpinRep, point: &ModelPoint) -> Result<GeneratorSet> {
    match point.kind() {
        ModelKind::TwoParam => closed_generators_2p(rep, point),
        ModelKind::ThreeParam => closed_generators_3p(rep, point),
    }
}

/// `ℋ_B = −t J_{n_θ}`, `ℋ_θ = 2 sin(Bt/2) J_{n_1}`.
pub fn closed_generators_2p(rep: &SpinRep, point: &ModelPoint) -> Result<GeneratorSet> {
    let frame = direction_vectors_2p(point)?;
    let (s, _) = point.half_angle();
    GeneratorSet::new(vec![
        (Param::B, rep.j_direction(&frame.n_theta).scale(-point.t)),
        (Param::Theta, rep.j_direction(&frame.n1).scale(2.0 * s)),
    ])
}

/// `ℋ_B = −t J_{n_θ}`, `ℋ_θ = 2 sin(Bt/2) J_{n_1}`, `ℋ_φ = 2 sin(Bt/2) cosθ J_{n_2}`.
///
/// The `cosθ` in `ℋ_φ` comes from `∂_φ H = B cosθ J_{n_φ'}`; at `θ = ±π/2`
/// the Hamiltonian does not depend on `φ` at all.
pub fn closed_generators_3p(rep: &SpinRep, point: &ModelPoint) -> Result<GeneratorSet> {
    let frame = direction_vectors_3p(point)?;
    let (s, _) = point.half_angle();
    let ct = point.theta.cos();
    GeneratorSet::new(vec![
        (Param::B, rep.j_direction(&frame.n_theta).scale(-point.t)),
        (Param::Theta, rep.j_direction(&frame.n1).scale(2.0 * s)),
        (Param::Phi, rep.j_direction(&frame.n2).scale(2.0 * s * ct)),
    ])
}

/// Finite-difference generators and the Hermitization residual of each.
#[derive(Debug, Clone)]
pub struct NumericGenerators {
    pub generators: GeneratorSet,
    /// `‖A − A†‖_F / (2 max(1, ‖A‖_F))` before Hermitization, per parameter.
    pub hermitization_residual: Vec<f64>,
}

/// Central differences of `U†` with step `step · max(1, |λ_l|)`.
pub fn numeric_generators(
    rep: &SpinRep,
    point: &ModelPoint,
    step: f64,
) -> Result<NumericGenerators> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    let u = unitary(rep, point);
    let params = point.params();
    let mut entries = Vec::with_capacity(params.len());
    let mut residuals = Vec::with_capacity(params.len());
    for (l, (&value, &label)) in params.iter().zip(point.kind().params()).enumerate() {
        let h = step * value.abs().max(1.0);
        let plus = unitary(rep, &point.with_param(l, value + h)?).adjoint();
        let minus = unitary(rep, &point.with_param(l, value - h)?).adjoint();
        let d_udag = (plus - minus) * c(1.0 / (2.0 * h));
        let raw = d_udag * &u * I;
        let residual = (&raw - raw.adjoint()).norm() / (2.0 * raw.norm().max(1.0));
        if residual > HERMITIZATION_LIMIT {
            return Err(Error::StepInstability(format!(
                "{} generator Hermitization residual {residual:e}",
                label.label()
            )));
        }
        residuals.push(residual);
        entries.push((label, HermitianMatrix::from_hermitian_part(&raw)));
    }
    Ok(NumericGenerators {
        generators: GeneratorSet::new(entries)?,
        hermitization_residual: residuals,
    })
}

/// Truncated series `ℋ_l = i Σ_n (it)^{n+1}/(n+1)! H^{×n}(∂_l H)`.
///
/// Stops once a term's Frobenius norm (an upper bound on its spectral norm)
/// drops below `tol`. Terms grow like `(2 t ‖H‖)^n / n!` before decaying, so
/// cancellation limits accuracy once `2 t ‖H‖` exceeds roughly 25.
pub fn series_generators(rep: &SpinRep, point: &ModelPoint, tol: f64) -> Result<GeneratorSet> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "series tolerance must be > 0, got {tol}"
        )));
    }
    let h = hamiltonian(rep, point);
    let h = h.as_matrix();
    let t = point.t;
    let mut entries = Vec::new();
    for (dh, &label) in hamiltonian_derivatives(rep, point)
        .iter()
        .zip(point.kind().params())
    {
        // coeff_n = i · (it)^{n+1} / (n+1)!
        let mut coeff = I * (I * t);
        let mut nested = dh.as_matrix().clone();
        let mut sum = &nested * coeff;
        let mut converged = false;
        let mut last = f64::INFINITY;
        for n in 1..SERIES_MAX_TERMS {
            nested = commutator(h, &nested);
            coeff *= I * (t / (n as f64 + 1.0));
            let term = &nested * coeff;
            last = term.norm();
            sum += term;
            if last < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                terms: SERIES_MAX_TERMS,
                last,
            });
        }
        entries.push((label, HermitianMatrix::from_hermitian_part(&sum)));
    }
    GeneratorSet::new(entries)
}
