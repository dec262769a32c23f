//! Pure-state multiparameter estimation: QFIM, Uhlmann matrix, SLDs,
//! classical Fisher information and the incompatibility figures built on them.

use num_complex::Complex64;
use serde::Serialize;

use crate::encoding::GeneratorSet;
use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, c, commutator, eigen_ratio, expect_c, herm_eig, spectral_absmax, sym_eig,
    sym_inverse, sym_sqrt, symmetric_residual, to_rows, trace_norm_real, CMatrix, CVector,
    HermitianMatrix, RMatrix, SymInverse, I, SINGULAR_REL_TOL,
};

/// Tolerance on the probe norm.
pub const PROBE_NORM_TOL: f64 = 1e-12;
/// Pairs of density-matrix eigenvalues summing below this are outside the SLD support.
pub const SLD_SUPPORT_TOL: f64 = 1e-12;
/// Outcomes with probability below this are dropped from the classical FIM.
pub const PROB_FLOOR: f64 = 1e-14;

const MATRIX_SHAPE_TOL: f64 = 1e-10;
const PSD_REL_TOL: f64 = 1e-9;
const PSD_ABS_FLOOR: f64 = 1e-12;
const IMAG_RESIDUAL_TOL: f64 = 1e-9;
const NORM_DRIFT_TOL: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-10;
const POVM_TOL: f64 = 1e-10;
const GRADIENT_SUM_TOL: f64 = 1e-10;
const SLD_RESIDUAL_TOL: f64 = 1e-8;

/// Unit-norm pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe(CVector);

impl Probe {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > PROBE_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(amplitudes.unscale(norm)))
    }

    /// Basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index + 1,
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0);
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> HermitianMatrix {
        HermitianMatrix::from_hermitian_part(&(&self.0 * self.0.adjoint()))
    }

    /// `U|ψ⟩`, renormalized against rounding.
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.nrows(),
            });
        }
        Self::normalized(u * &self.0)
    }
}

fn check_labels(dim: usize, labels: &[String]) -> Result<()> {
    if labels.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: labels.len(),
        });
    }
    Ok(())
}

/// `p0, p1, …` for matrices without named parameters.
pub fn default_labels(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("p{i}")).collect()
}

/// Symmetric positive semidefinite QFIM.
#[derive(Debug, Clone, PartialEq)]
pub struct QfimMatrix {
    matrix: RMatrix,
    labels: Vec<String>,
}

impl QfimMatrix {
    /// Validates symmetry (1e-10 relative) and `λ_min ≥ −1e-9 λ_max`.
    pub fn new(matrix: RMatrix, labels: Vec<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        check_labels(matrix.nrows(), &labels)?;
        let residual = symmetric_residual(&matrix);
        if residual > MATRIX_SHAPE_TOL {
            return Err(Error::NotSymmetric(residual));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        if sym.nrows() > 0 {
            let (values, _) = sym_eig(&sym);
            let min = values[0];
            let max = values[values.len() - 1];
            if min < -PSD_REL_TOL * max.max(PSD_ABS_FLOOR) {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(Self {
            matrix: sym,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    /// `λ_min / λ_max`.
    pub fn eigen_ratio(&self) -> f64 {
        eigen_ratio(&self.matrix)
    }
}

/// Real antisymmetric Uhlmann matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UhlmannMatrix {
    matrix: RMatrix,
    labels: Vec<String>,
}

impl UhlmannMatrix {
    pub fn new(matrix: RMatrix, labels: Vec<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        check_labels(matrix.nrows(), &labels)?;
        let residual = (&matrix + matrix.transpose()).norm() / matrix.norm().max(1.0);
        if residual > MATRIX_SHAPE_TOL {
            return Err(Error::NotAntisymmetric(residual));
        }
        let anti = (&matrix - matrix.transpose()) * 0.5;
        Ok(Self {
            matrix: anti,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn generator_labels(gens: &GeneratorSet) -> Vec<String> {
    gens.labels()
        .iter()
        .map(|p| p.label().to_string())
        .collect()
}

fn check_probe_dim(gens: &GeneratorSet, probe: &Probe) -> Result<()> {
    if gens.dim() != probe.dim() {
        return Err(Error::DimensionMismatch {
            expected: gens.dim(),
            got: probe.dim(),
        });
    }
    Ok(())
}

/// `Q_ll' = 2⟨{ℋ_l, ℋ_l'}⟩ − 4⟨ℋ_l⟩⟨ℋ_l'⟩` on the initial probe.
pub fn qfim_from_generators(gens: &GeneratorSet, probe: &Probe) -> Result<QfimMatrix> {
    check_probe_dim(gens, probe)?;
    let psi = probe.amplitudes();
    let d = gens.len();
    let means: Vec<f64> = gens.ops().map(|h| h.expectation(psi)).collect();
    let mut q = RMatrix::zeros(d, d);
    for l in 0..d {
        for k in l..d {
            let anti = anticommutator(gens.get(l).as_matrix(), gens.get(k).as_matrix());
            let v = 2.0 * expect_c(&anti, psi).re - 4.0 * means[l] * means[k];
            q[(l, k)] = v;
            q[(k, l)] = v;
        }
    }
    QfimMatrix::new(q, generator_labels(gens))
}

/// `D_ll' = −2i⟨[ℋ_l, ℋ_l']⟩` on the initial probe.
pub fn uhlmann_from_generators(gens: &GeneratorSet, probe: &Probe) -> Result<UhlmannMatrix> {
    check_probe_dim(gens, probe)?;
    let psi = probe.amplitudes();
    let d = gens.len();
    let mut m = RMatrix::zeros(d, d);
    for l in 0..d {
        for k in (l + 1)..d {
            let comm = commutator(gens.get(l).as_matrix(), gens.get(k).as_matrix());
            let v = expect_c(&comm, psi) * Complex64::new(0.0, -2.0);
            if v.im.abs() > IMAG_RESIDUAL_TOL * v.norm().max(1.0) {
                return Err(Error::NumericConsistency(format!(
                    "Uhlmann entry ({l},{k}) has imaginary part {:e}",
                    v.im
                )));
            }
            m[(l, k)] = v.re;
            m[(k, l)] = -v.re;
        }
    }
    UhlmannMatrix::new(m, generator_labels(gens))
}

/// QFIM and Uhlmann matrix from central differences of a pure-state family.
///
/// With `B_jk = ⟨∂_jψ|∂_kψ⟩ − ⟨∂_jψ|ψ⟩⟨ψ|∂_kψ⟩`, returns `Q = 4 Re B` and
/// `D = 4 Im B`. Step for parameter `j` is `step · max(1, |λ_j|)`.
pub fn qfim_from_state_derivatives<F>(
    family: F,
    params: &[f64],
    step: f64,
    labels: Vec<String>,
) -> Result<(QfimMatrix, UhlmannMatrix)>
where
    F: Fn(&[f64]) -> Result<Probe>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    let d = params.len();
    check_labels(d, &labels)?;
    let psi = family(params)?;
    let mut derivs = Vec::with_capacity(d);
    for j in 0..d {
        let h = step * params[j].abs().max(1.0);
        let mut shifted = params.to_vec();
        shifted[j] = params[j] + h;
        let plus = family(&shifted)?;
        shifted[j] = params[j] - h;
        let minus = family(&shifted)?;
        if plus.dim() != psi.dim() || minus.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim(),
                got: plus.dim(),
            });
        }
        let dpsi = (plus.amplitudes() - minus.amplitudes()).unscale(2.0 * h);
        // d/dλ ⟨ψ|ψ⟩ = 2 Re⟨ψ|∂ψ⟩ must vanish
        let drift = psi.amplitudes().dotc(&dpsi).re.abs();
        if drift > NORM_DRIFT_TOL * dpsi.norm().max(1.0) {
            return Err(Error::StepInstability(format!(
                "norm drift {drift:e} in derivative of parameter {j}"
            )));
        }
        derivs.push(dpsi);
    }
    let overlaps: Vec<Complex64> = derivs.iter().map(|dp| psi.amplitudes().dotc(dp)).collect();
    let mut q = RMatrix::zeros(d, d);
    let mut u = RMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let b = derivs[j].dotc(&derivs[k]) - overlaps[j].conj() * overlaps[k];
            q[(j, k)] = 4.0 * b.re;
            u[(j, k)] = 4.0 * b.im;
        }
    }
    Ok((
        QfimMatrix::new(q, labels.clone())?,
        UhlmannMatrix::new(u, labels)?,
    ))
}

fn check_density(rho: &HermitianMatrix) -> Result<()> {
    let tr = rho.as_matrix().trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidTrace(tr.re));
    }
    let e = herm_eig(rho);
    if !e.values.is_empty() && e.values[0] < -TRACE_TOL {
        return Err(Error::NotPositive(e.values[0]));
    }
    Ok(())
}

/// Solves `2∂ρ = {L, ρ}` in the eigenbasis of `ρ`.
///
/// Entries with `p_j + p_k ≤ 1e-12` are set to zero.
pub fn sld_solve(rho: &HermitianMatrix, drho: &HermitianMatrix) -> Result<HermitianMatrix> {
    if rho.dim() != drho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: drho.dim(),
        });
    }
    check_density(rho)?;
    let e = herm_eig(rho);
    let v = &e.vectors;
    let p = &e.values;
    let n = rho.dim();
    let d_eig = v.adjoint() * drho.as_matrix() * v;
    let mut l_eig = CMatrix::zeros(n, n);
    let mut d_support = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let s = p[j] + p[k];
            if s > SLD_SUPPORT_TOL {
                l_eig[(j, k)] = d_eig[(j, k)] * (2.0 / s);
                d_support[(j, k)] = d_eig[(j, k)];
            }
        }
    }
    let l = v * l_eig * v.adjoint();
    let target = v * d_support * v.adjoint() * c(2.0);
    let residual =
        (anticommutator(&l, rho.as_matrix()) - target).norm() / drho.as_matrix().norm().max(1.0);
    if residual > SLD_RESIDUAL_TOL {
        return Err(Error::NumericConsistency(format!(
            "SLD residual {residual:e}"
        )));
    }
    Ok(HermitianMatrix::from_hermitian_part(&l))
}

fn sld_products(rho: &HermitianMatrix, slds: &[HermitianMatrix]) -> Result<Vec<Vec<Complex64>>> {
    if let Some(bad) = slds.iter().find(|l| l.dim() != rho.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: bad.dim(),
        });
    }
    Ok(slds
        .iter()
        .map(|a| {
            slds.iter()
                .map(|b| (rho.as_matrix() * a.as_matrix() * b.as_matrix()).trace())
                .collect()
        })
        .collect())
}

/// `Q_jk = Re Tr(ρ L_j L_k)`.
pub fn qfim_from_slds(
    rho: &HermitianMatrix,
    slds: &[HermitianMatrix],
    labels: Vec<String>,
) -> Result<QfimMatrix> {
    let t = sld_products(rho, slds)?;
    let d = slds.len();
    QfimMatrix::new(RMatrix::from_fn(d, d, |j, k| t[j][k].re), labels)
}

/// `D_jk = Tr(ρ [L_j, L_k]) / 2i = Im Tr(ρ L_j L_k)`.
pub fn uhlmann_from_slds(
    rho: &HermitianMatrix,
    slds: &[HermitianMatrix],
    labels: Vec<String>,
) -> Result<UhlmannMatrix> {
    let t = sld_products(rho, slds)?;
    let d = slds.len();
    let m = RMatrix::from_fn(d, d, |j, k| ((t[j][k] - t[k][j]) / (2.0 * I)).re);
    UhlmannMatrix::new(m, labels)
}

/// `p_i = Tr(ρ Π_i)` for a complete POVM.
pub fn born_probabilities(rho: &HermitianMatrix, povm: &[HermitianMatrix]) -> Result<Vec<f64>> {
    check_density(rho)?;
    let n = rho.dim();
    let mut sum = CMatrix::zeros(n, n);
    for e in povm {
        if e.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: e.dim(),
            });
        }
        let min = herm_eig(e).values[0];
        if min < -POVM_TOL {
            return Err(Error::NotPositive(min));
        }
        sum += e.as_matrix();
    }
    let residual = (sum - CMatrix::identity(n, n)).norm();
    if residual > POVM_TOL {
        return Err(Error::IncompletePovm(residual));
    }
    Ok(povm
        .iter()
        .map(|e| (rho.as_matrix() * e.as_matrix()).trace().re)
        .collect())
}

/// `F_jk = Σ_i ∂_j p_i ∂_k p_i / p_i`; `grads` is `d × n` with `grads[(j, i)] = ∂_j p_i`.
pub fn classical_fim(probs: &[f64], grads: &RMatrix) -> Result<RMatrix> {
    let n = probs.len();
    if grads.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: grads.ncols(),
        });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL || probs.iter().any(|&p| p < -1e-12) {
        return Err(Error::NotNormalized(total));
    }
    for (row, r) in grads.row_iter().enumerate() {
        let sum: f64 = r.iter().sum();
        let scale = r.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        if sum.abs() > GRADIENT_SUM_TOL * scale {
            return Err(Error::GradientNormalization { row, sum });
        }
    }
    let d = grads.nrows();
    let mut f = RMatrix::zeros(d, d);
    for (i, &p) in probs.iter().enumerate() {
        if p < PROB_FLOOR {
            continue;
        }
        let g = grads.column(i);
        f += (g * g.transpose()) / p;
    }
    Ok(f)
}

fn check_pair(q: &QfimMatrix, d: &UhlmannMatrix) -> Result<()> {
    if q.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: d.dim(),
        });
    }
    Ok(())
}

/// `S = diag(Q_ll^{-1/2})`; entries with `Q_ll = 0` get scale 1.
fn equilibration(q: &RMatrix) -> Vec<f64> {
    q.diagonal()
        .iter()
        .map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 })
        .collect()
}

fn scale_both(m: &RMatrix, s: &[f64]) -> RMatrix {
    RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| s[i] * m[(i, j)] * s[j])
}

/// `(SQS)⁻¹` together with `S`.
///
/// Singularity is judged on `Q` itself. The inverse is formed from the
/// unit-diagonal `SQS`, since QFIM diagonals routinely differ by many orders
/// of magnitude (`Q_BB ∝ t²` against `Q_θθ ∝ sin²(Bt/2)`).
fn equilibrated_inverse(q: &QfimMatrix, rel_tol: f64) -> Result<(RMatrix, Vec<f64>)> {
    if let SymInverse::Singular { ratio } = sym_inverse(q.matrix(), rel_tol)? {
        return Err(Error::Singular { ratio });
    }
    let s = equilibration(q.matrix());
    match sym_inverse(&scale_both(q.matrix(), &s), f64::MIN_POSITIVE)? {
        SymInverse::Inverse(m) => Ok((m, s)),
        SymInverse::Singular { ratio } => Err(Error::Singular { ratio }),
    }
}

/// `Q⁻¹ = S (SQS)⁻¹ S`.
fn invert(q: &QfimMatrix, rel_tol: f64) -> Result<RMatrix> {
    let (inv, s) = equilibrated_inverse(q, rel_tol)?;
    Ok(scale_both(&inv, &s))
}

/// `ℛ = ‖Q⁻¹D‖_∞`, the largest `|λ|` of `i Q⁻¹ D`. One parameter gives 0.
///
/// Evaluated as `(SQS)⁻¹(SDS)`, which is similar to `Q⁻¹D`.
pub fn ai_measure(q: &QfimMatrix, d: &UhlmannMatrix, rel_tol: f64) -> Result<f64> {
    check_pair(q, d)?;
    let (inv, s) = equilibrated_inverse(q, rel_tol)?;
    if q.dim() < 2 {
        return Ok(0.0);
    }
    let m = (inv * scale_both(d.matrix(), &s)).map(|x| Complex64::new(0.0, x));
    spectral_absmax(&m)
}

/// `ℛ = sqrt(det D / det Q)` for two parameters.
pub fn ai_two_param(q: &QfimMatrix, d: &UhlmannMatrix) -> Result<f64> {
    check_pair(q, d)?;
    if q.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: q.dim(),
        });
    }
    let det_q = q.det();
    let ratio = q.eigen_ratio();
    if !(det_q > 0.0) || !(ratio >= SINGULAR_REL_TOL) {
        return Err(Error::Singular { ratio });
    }
    // the ratio is invariant under diagonal rescaling
    let s = equilibration(q.matrix());
    let (qs, ds) = (scale_both(q.matrix(), &s), scale_both(d.matrix(), &s));
    Ok((ds.determinant() / qs.determinant()).max(0.0).sqrt())
}

/// Scalar bounds for a pure model with weight `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolevoBound {
    /// `tr(W Q⁻¹)`.
    pub c_sld: f64,
    /// `c_sld + ‖√W Q⁻¹ D Q⁻¹ √W‖₁`.
    pub c_h: f64,
    /// `(c_h − c_sld) / c_sld`.
    pub delta: f64,
}

fn check_weight(w: &RMatrix, d: usize) -> Result<()> {
    if w.nrows() != d || w.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: w.nrows(),
        });
    }
    let residual = symmetric_residual(w);
    if residual > MATRIX_SHAPE_TOL {
        return Err(Error::NotSymmetric(residual));
    }
    Ok(())
}

/// Holevo bound of a pure model; `weight = None` means identity.
pub fn holevo_pure(
    q: &QfimMatrix,
    d: &UhlmannMatrix,
    weight: Option<&RMatrix>,
    rel_tol: f64,
) -> Result<HolevoBound> {
    check_pair(q, d)?;
    let n = q.dim();
    let identity = RMatrix::identity(n, n);
    let w = weight.unwrap_or(&identity);
    check_weight(w, n)?;
    let sqrt_w = sym_sqrt(w)?;
    let q_inv = invert(q, rel_tol)?;
    let c_sld = (w * &q_inv).trace();
    let sandwich = &sqrt_w * &q_inv * d.matrix() * &q_inv * &sqrt_w;
    let c_h = c_sld + trace_norm_real(&sandwich);
    Ok(HolevoBound {
        c_sld,
        c_h,
        delta: (c_h - c_sld) / c_sld,
    })
}

/// Principal blocks of `Q` and `D` on a nonempty proper parameter subset.
pub fn submodel(
    q: &QfimMatrix,
    d: &UhlmannMatrix,
    indices: &[usize],
) -> Result<(QfimMatrix, UhlmannMatrix)> {
    check_pair(q, d)?;
    let n = q.dim();
    if indices.is_empty() || indices.len() >= n {
        return Err(Error::InvalidConfig(format!(
            "submodel needs a nonempty proper subset of {n} parameters, got {indices:?}"
        )));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return Err(Error::InvalidConfig(format!(
                "bad submodel index set {indices:?}"
            )));
        }
        seen[i] = true;
    }
    let k = indices.len();
    let pick = |m: &RMatrix| RMatrix::from_fn(k, k, |a, b| m[(indices[a], indices[b])]);
    let labels = |l: &[String]| indices.iter().map(|&i| l[i].clone()).collect::<Vec<_>>();
    Ok((
        QfimMatrix::new(pick(q.matrix()), labels(q.labels()))?,
        UhlmannMatrix::new(pick(d.matrix()), labels(d.labels()))?,
    ))
}

/// All incompatibility figures at one model point.
///
/// When `Q` is singular at the chosen tolerance the bound fields are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompatReport {
    pub qfim: QfimMatrix,
    pub uhlmann: UhlmannMatrix,
    pub weight: RMatrix,
    pub det_q: f64,
    pub singular: bool,
    pub c_sld: Option<f64>,
    pub c_h: Option<f64>,
    pub delta: Option<f64>,
    pub r_ai: Option<f64>,
}

impl IncompatReport {
    pub fn evaluate(
        qfim: QfimMatrix,
        uhlmann: UhlmannMatrix,
        weight: Option<RMatrix>,
        rel_tol: f64,
    ) -> Result<Self> {
        check_pair(&qfim, &uhlmann)?;
        let n = qfim.dim();
        let weight = weight.unwrap_or_else(|| RMatrix::identity(n, n));
        check_weight(&weight, n)?;
        let det_q = qfim.det();
        let (singular, bound, r_ai) = match holevo_pure(&qfim, &uhlmann, Some(&weight), rel_tol) {
            Ok(b) => (false, Some(b), Some(ai_measure(&qfim, &uhlmann, rel_tol)?)),
            Err(Error::Singular { .. }) => (true, None, None),
            Err(e) => return Err(e),
        };
        Ok(Self {
            qfim,
            uhlmann,
            weight,
            det_q,
            singular,
            c_sld: bound.map(|b| b.c_sld),
            c_h: bound.map(|b| b.c_h),
            delta: bound.map(|b| b.delta),
            r_ai,
        })
    }

    /// `ℛ − Δ`, when defined.
    pub fn faithfulness_gap(&self) -> Option<f64> {
        Some(self.r_ai? - self.delta?)
    }

    /// Checks `0 ≤ Δ ≤ ℛ ≤ 1` and `C^H ≥ C^SLD` within `tol`.
    pub fn check_bounds(&self, tol: f64) -> Result<()> {
        let (Some(r), Some(delta), Some(c_sld), Some(c_h)) =
            (self.r_ai, self.delta, self.c_sld, self.c_h)
        else {
            return Ok(());
        };
        let ok = delta >= -tol && delta <= r + tol && r <= 1.0 + tol && c_h >= c_sld - tol;
        if ok {
            Ok(())
        } else {
            Err(Error::NumericConsistency(format!(
                "bound ordering violated: delta={delta}, R={r}, c_sld={c_sld}, c_h={c_h}"
            )))
        }
    }

    pub fn qfim_rows(&self) -> Vec<Vec<f64>> {
        to_rows(self.qfim.matrix())
    }

    pub fn uhlmann_rows(&self) -> Vec<Vec<f64>> {
        to_rows(self.uhlmann.matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{closed_generators, unitary, ModelPoint, Param};
    use crate::linalg::testutil::{random_complex, random_hermitian};
    use crate::linalg::HermEig;
    use crate::spin::SpinRep;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_probe<R: Rng>(rng: &mut R, n: usize) -> Probe {
        let v = CVector::from_fn(n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        Probe::normalized(v).unwrap()
    }

    fn gens_of(ops: Vec<HermitianMatrix>) -> GeneratorSet {
        let labels = [Param::B, Param::Theta, Param::Phi];
        GeneratorSet::new(labels.iter().copied().zip(ops).collect()).unwrap()
    }

    fn model_family<'a>(
        rep: &'a SpinRep,
        probe: &Probe,
        point: ModelPoint,
    ) -> impl Fn(&[f64]) -> Result<Probe> + 'a {
        let probe = probe.clone();
        move |lam: &[f64]| {
            let mut p = point;
            for (i, &v) in lam.iter().enumerate() {
                p = p.with_param(i, v)?;
            }
            probe.evolve(&unitary(rep, &p))
        }
    }

    fn max_abs_r(m: &RMatrix) -> f64 {
        m.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    fn rel_r(a: &RMatrix, b: &RMatrix) -> f64 {
        max_abs_r(&(a - b)) / max_abs_r(a).max(max_abs_r(b)).max(1.0)
    }

    fn random_povm<R: Rng>(rng: &mut R, n: usize, outcomes: usize) -> Vec<HermitianMatrix> {
        let raw: Vec<CMatrix> = (0..outcomes)
            .map(|_| {
                let a = random_complex(rng, n);
                a.adjoint() * a
            })
            .collect();
        let total = raw.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m);
        let HermEig { values, vectors } = herm_eig(&HermitianMatrix::from_hermitian_part(&total));
        let mut scaled = vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col /= c(values[j].sqrt());
        }
        let inv_sqrt = &scaled * vectors.adjoint();
        raw.iter()
            .map(|m| HermitianMatrix::from_hermitian_part(&(&inv_sqrt * m * &inv_sqrt)))
            .collect()
    }

    fn qm(rows: &[f64], d: usize) -> QfimMatrix {
        QfimMatrix::new(RMatrix::from_row_slice(d, d, rows), default_labels(d)).unwrap()
    }

    fn um(rows: &[f64], d: usize) -> UhlmannMatrix {
        UhlmannMatrix::new(RMatrix::from_row_slice(d, d, rows), default_labels(d)).unwrap()
    }

    #[test]
    fn probe_validation() {
        assert!(Probe::new(CVector::from_vec(vec![c(1.0), c(1.0)])).is_err());
        assert!(Probe::normalized(CVector::zeros(3)).is_err());
        assert!(Probe::new(CVector::zeros(0)).is_err());
        let p = Probe::normalized(CVector::from_vec(vec![c(3.0), c(4.0)])).unwrap();
        assert!((p.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(Probe::basis(3, 3).is_err());
    }

    #[test]
    fn matrix_validation() {
        let l = default_labels(2);
        assert!(QfimMatrix::new(
            RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]),
            l.clone()
        )
        .is_err());
        assert!(QfimMatrix::new(
            RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
            l.clone()
        )
        .is_err());
        assert!(QfimMatrix::new(RMatrix::identity(2, 2), default_labels(3)).is_err());
        assert!(UhlmannMatrix::new(RMatrix::identity(2, 2), l.clone()).is_err());
        assert!(
            UhlmannMatrix::new(RMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), l).is_ok()
        );
    }

    #[test]
    fn zero_generators_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let probe = random_probe(&mut rng, 3);
        let g = gens_of(vec![HermitianMatrix::zeros(3), HermitianMatrix::zeros(3)]);
        assert_eq!(
            max_abs_r(qfim_from_generators(&g, &probe).unwrap().matrix()),
            0.0
        );
        assert_eq!(
            max_abs_r(uhlmann_from_generators(&g, &probe).unwrap().matrix()),
            0.0
        );
    }

    #[test]
    fn eigenstate_has_zero_variance() {
        let rep = SpinRep::new(4).unwrap();
        let probe = Probe::basis(4, 1).unwrap();
        let g = gens_of(vec![rep.jz().clone()]);
        assert!(qfim_from_generators(&g, &probe).unwrap().matrix()[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn commuting_generators_zero_uhlmann() {
        let rep = SpinRep::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let probe = random_probe(&mut rng, 3);
        let g = gens_of(vec![rep.jz().clone(), rep.jz().scale(2.0)]);
        assert!(max_abs_r(uhlmann_from_generators(&g, &probe).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let rep = SpinRep::new(3).unwrap();
        let probe = Probe::basis(2, 0).unwrap();
        let g = gens_of(vec![rep.jz().clone()]);
        assert!(qfim_from_generators(&g, &probe).is_err());
    }

    #[test]
    fn qubit_spin_variance() {
        // |+⟩ with ℋ = J_z: Var = 1/4, Q = 4 Var = 1
        let rep = SpinRep::new(2).unwrap();
        let plus = Probe::normalized(CVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
        let g = gens_of(vec![rep.jz().clone(), rep.jy().clone()]);
        let q = qfim_from_generators(&g, &plus).unwrap();
        assert!((q.matrix()[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((q.matrix()[(1, 1)] - 1.0).abs() < 1e-14);
        // D_01 = −2i⟨[J_z,J_y]⟩ = −2i·(−i)⟨J_x⟩ = −2⟨J_x⟩ = −1
        let d = uhlmann_from_generators(&g, &plus).unwrap();
        assert!((d.matrix()[(0, 1)] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_family_gives_zero() {
        let probe = Probe::basis(3, 0).unwrap();
        let (q, d) = qfim_from_state_derivatives(
            |_| Ok(probe.clone()),
            &[0.3, 1.0],
            1e-5,
            default_labels(2),
        )
        .unwrap();
        assert_eq!(max_abs_r(q.matrix()), 0.0);
        assert_eq!(max_abs_r(d.matrix()), 0.0);
    }

    #[test]
    fn state_route_matches_generators_2p() {
        let rep = SpinRep::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let probe = random_probe(&mut rng, 3);
        let point = ModelPoint::two(1.1, 0.6, 5.0).unwrap();
        let g = closed_generators(&rep, &point).unwrap();
        let q = qfim_from_generators(&g, &probe).unwrap();
        let d = uhlmann_from_generators(&g, &probe).unwrap();
        let (q2, d2) = qfim_from_state_derivatives(
            model_family(&rep, &probe, point),
            &point.params(),
            1e-5,
            default_labels(2),
        )
        .unwrap();
        assert!(rel_r(q.matrix(), q2.matrix()) < 1e-5);
        assert!(rel_r(d.matrix(), d2.matrix()) < 1e-5);
    }

    #[test]
    fn norm_drift_detected() {
        // a family whose phase is fine but whose direction jumps discontinuously
        let fam = |lam: &[f64]| {
            let a = if lam[0] > 0.0 { 1.0 } else { -1.0 };
            Probe::normalized(CVector::from_vec(vec![c(1.0), c(a)]))
        };
        assert!(matches!(
            qfim_from_state_derivatives(fam, &[0.0], 1e-5, default_labels(1)),
            Err(Error::StepInstability(_))
        ));
    }

    #[test]
    fn sld_zero_derivative() {
        let rho = Probe::basis(3, 0).unwrap().density();
        let l = sld_solve(&rho, &HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(l.as_matrix().norm(), 0.0);
    }

    #[test]
    fn sld_maximally_mixed_qubit() {
        let rep = SpinRep::new(2).unwrap();
        let rho = HermitianMatrix::identity(2).scale(0.5);
        let eps = 0.3;
        // σ_x = 2 J_x
        let drho = rep.jx().scale(eps);
        let l = sld_solve(&rho, &drho).unwrap();
        assert!((l.as_matrix() - rep.jx().as_matrix() * c(2.0 * eps)).norm() < 1e-14);
    }

    #[test]
    fn sld_rejects_bad_trace() {
        let rho = HermitianMatrix::identity(2);
        assert!(matches!(
            sld_solve(&rho, &HermitianMatrix::zeros(2)),
            Err(Error::InvalidTrace(_))
        ));
    }

    #[test]
    fn sld_pure_state_is_twice_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let probe = random_probe(&mut rng, 4);
        let h = random_hermitian(&mut rng, 4);
        // ∂ρ = −i[H, ρ]
        let rho = probe.density();
        let drho = HermitianMatrix::from_hermitian_part(
            &(commutator(h.as_matrix(), rho.as_matrix()) * (-I)),
        );
        let l = sld_solve(&rho, &drho).unwrap();
        assert!((l.as_matrix() - drho.as_matrix() * c(2.0)).norm() < 1e-10);
        // Tr(ρL²) = 4 Var(H)
        let q = qfim_from_slds(&rho, &[l], default_labels(1)).unwrap();
        let g = gens_of(vec![h]);
        let q_gen = qfim_from_generators(&g, &probe).unwrap();
        assert!((q.matrix()[(0, 0)] - q_gen.matrix()[(0, 0)]).abs() < 1e-9);
    }

    #[test]
    fn sld_mixed_state_lyapunov() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex(&mut rng, 3);
        let m = a.adjoint() * a;
        let tr = m.trace().re;
        let rho = HermitianMatrix::from_hermitian_part(&(m / c(tr)));
        let h = random_hermitian(&mut rng, 3);
        let drho = HermitianMatrix::from_hermitian_part(
            &(commutator(h.as_matrix(), rho.as_matrix()) * (-I)),
        );
        let l = sld_solve(&rho, &drho).unwrap();
        let lhs = anticommutator(l.as_matrix(), rho.as_matrix());
        assert!((lhs - drho.as_matrix() * c(2.0)).norm() < 1e-10);
    }

    #[test]
    fn born_basic() {
        let rho = Probe::normalized(CVector::from_vec(vec![c(1.0), c(1.0)]))
            .unwrap()
            .density();
        let z = [
            Probe::basis(2, 0).unwrap().density(),
            Probe::basis(2, 1).unwrap().density(),
        ];
        let p = born_probabilities(&rho, &z).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = born_probabilities(&rho, &[HermitianMatrix::identity(2)]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(matches!(
            born_probabilities(&rho, &z[..1]),
            Err(Error::IncompletePovm(_))
        ));
    }

    #[test]
    fn born_eigenbasis_gives_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_complex(&mut rng, 3);
        let m = a.adjoint() * a;
        let tr = m.trace().re;
        let rho = HermitianMatrix::from_hermitian_part(&(m / c(tr)));
        let e = herm_eig(&rho);
        let povm: Vec<_> = (0..3)
            .map(|k| {
                let v = e.vectors.column(k).into_owned();
                HermitianMatrix::from_hermitian_part(&(&v * v.adjoint()))
            })
            .collect();
        let p = born_probabilities(&rho, &povm).unwrap();
        for (pk, ek) in p.iter().zip(e.values.iter()) {
            assert!((pk - ek).abs() < 1e-12);
        }
    }

    #[test]
    fn bernoulli_fisher() {
        let lam = 0.3;
        let f = classical_fim(
            &[lam, 1.0 - lam],
            &RMatrix::from_row_slice(1, 2, &[1.0, -1.0]),
        )
        .unwrap();
        assert!((f[(0, 0)] - 1.0 / (lam * (1.0 - lam))).abs() < 1e-12);
    }

    #[test]
    fn two_outcomes_two_params_singular() {
        let f = classical_fim(
            &[0.4, 0.6],
            &RMatrix::from_row_slice(2, 2, &[0.3, -0.3, -1.2, 1.2]),
        )
        .unwrap();
        assert!(f.determinant().abs() <= 1e-12 * f.norm().powi(2));
    }

    #[test]
    fn gradient_normalization_enforced() {
        let bad = classical_fim(&[0.5, 0.5], &RMatrix::from_row_slice(1, 2, &[1.0, -0.5]));
        assert!(matches!(
            bad,
            Err(Error::GradientNormalization { row: 0, .. })
        ));
        assert!(classical_fim(&[0.5, 0.6], &RMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn zero_probability_outcome_skipped() {
        let f = classical_fim(&[1.0, 0.0], &RMatrix::from_row_slice(1, 2, &[0.0, 0.0])).unwrap();
        assert_eq!(f[(0, 0)], 0.0);
    }

    #[test]
    fn ai_trivial_cases() {
        let q = qm(&[2.0, 0.3, 0.3, 1.0], 2);
        let zero = um(&[0.0, 0.0, 0.0, 0.0], 2);
        assert_eq!(ai_measure(&q, &zero, SINGULAR_REL_TOL).unwrap(), 0.0);
        assert_eq!(ai_two_param(&q, &zero).unwrap(), 0.0);
        let single = qm(&[2.0], 1);
        assert_eq!(
            ai_measure(&single, &um(&[0.0], 1), SINGULAR_REL_TOL).unwrap(),
            0.0
        );
        let sing = qm(&[1.0, 1.0, 1.0, 1.0], 2);
        assert!(matches!(
            ai_measure(&sing, &zero, SINGULAR_REL_TOL),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            ai_two_param(&sing, &zero),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn ai_maximal_pair() {
        // Q = I, D = [[0,1],[-1,0]] → ℛ = 1
        let q = qm(&[1.0, 0.0, 0.0, 1.0], 2);
        let d = um(&[0.0, 1.0, -1.0, 0.0], 2);
        assert!((ai_measure(&q, &d, SINGULAR_REL_TOL).unwrap() - 1.0).abs() < 1e-12);
        assert!((ai_two_param(&q, &d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_zero_uhlmann() {
        let q = qm(&[2.0, 0.3, 0.3, 1.0], 2);
        let b = holevo_pure(&q, &um(&[0.0; 4], 2), None, SINGULAR_REL_TOL).unwrap();
        assert_eq!(b.c_h, b.c_sld);
        assert_eq!(b.delta, 0.0);
    }

    #[test]
    fn holevo_identity_weight_gap() {
        let q = qm(&[2.0, 0.3, 0.3, 1.0], 2);
        let d = um(&[0.0, 0.7, -0.7, 0.0], 2);
        let b = holevo_pure(&q, &d, None, SINGULAR_REL_TOL).unwrap();
        let qi = q.matrix().clone().try_inverse().unwrap();
        let expected = trace_norm_real(&(&qi * d.matrix() * &qi)) / qi.trace();
        assert!((b.delta - expected).abs() < 1e-12);
        // 2×2 antisymmetric A: ‖A‖₁ = 2|A_01|; Q⁻¹DQ⁻¹ has A_01 = 0.7 / det Q
        let det = q.det();
        assert!((b.c_h - b.c_sld - 2.0 * 0.7 / det).abs() < 1e-12);
    }

    #[test]
    fn holevo_weight_validation() {
        let q = qm(&[2.0, 0.3, 0.3, 1.0], 2);
        let d = um(&[0.0; 4], 2);
        let bad = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(holevo_pure(&q, &d, Some(&bad), SINGULAR_REL_TOL).is_err());
        let w = RMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let b = holevo_pure(&q, &d, Some(&w), SINGULAR_REL_TOL).unwrap();
        let qi = q.matrix().clone().try_inverse().unwrap();
        assert!((b.c_sld - (w * qi).trace()).abs() < 1e-12);
    }

    #[test]
    fn submodel_blocks() {
        let q = qm(&[3.0, 0.1, 0.2, 0.1, 2.0, 0.3, 0.2, 0.3, 1.0], 3);
        let d = um(&[0.0, 0.4, 0.5, -0.4, 0.0, 0.6, -0.5, -0.6, 0.0], 3);
        let (qs, ds) = submodel(&q, &d, &[0, 2]).unwrap();
        assert_eq!(
            qs.matrix(),
            &RMatrix::from_row_slice(2, 2, &[3.0, 0.2, 0.2, 1.0])
        );
        assert_eq!(ds.matrix()[(0, 1)], 0.5);
        assert_eq!(qs.labels(), &["p0".to_string(), "p2".to_string()]);
        let (q1, d1) = submodel(&q, &d, &[1]).unwrap();
        assert_eq!(d1.matrix()[(0, 0)], 0.0);
        assert_eq!(ai_measure(&q1, &d1, SINGULAR_REL_TOL).unwrap(), 0.0);
        assert!(submodel(&q, &d, &[]).is_err());
        assert!(submodel(&q, &d, &[0, 1, 2]).is_err());
        assert!(submodel(&q, &d, &[0, 0]).is_err());
        assert!(submodel(&q, &d, &[3]).is_err());
    }

    #[test]
    fn report_singular_and_regular() {
        let sing = IncompatReport::evaluate(
            qm(&[1.0, 1.0, 1.0, 1.0], 2),
            um(&[0.0; 4], 2),
            None,
            SINGULAR_REL_TOL,
        )
        .unwrap();
        assert!(sing.singular && sing.r_ai.is_none() && sing.delta.is_none());
        assert!(sing.faithfulness_gap().is_none());
        assert!(sing.check_bounds(1e-9).is_ok());

        let r = IncompatReport::evaluate(
            qm(&[1.0, 0.0, 0.0, 1.0], 2),
            um(&[0.0, 0.5, -0.5, 0.0], 2),
            None,
            SINGULAR_REL_TOL,
        )
        .unwrap();
        assert!(!r.singular);
        assert!((r.r_ai.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.delta.unwrap() - 0.5).abs() < 1e-12);
        assert!(r.check_bounds(1e-9).is_ok());
    }

    fn two_param_instance(seed: u64) -> (QfimMatrix, UhlmannMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..6);
        let probe = random_probe(&mut rng, n);
        let g = gens_of(vec![
            random_hermitian(&mut rng, n),
            random_hermitian(&mut rng, n),
        ]);
        (
            qfim_from_generators(&g, &probe).unwrap(),
            uhlmann_from_generators(&g, &probe).unwrap(),
        )
    }

    #[test]
    fn two_param_formula_matches_spectral_route() {
        let mut checked = 0;
        for seed in 0..100 {
            let (q, d) = two_param_instance(seed);
            let (Ok(a), Ok(b)) = (ai_measure(&q, &d, SINGULAR_REL_TOL), ai_two_param(&q, &d))
            else {
                continue;
            };
            assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
            checked += 1;
        }
        assert!(checked >= 95);
    }

    #[test]
    fn classical_below_quantum_random_povm() {
        let rep = SpinRep::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let probe = random_probe(&mut rng, 2);
            let point =
                ModelPoint::two(rng.gen_range(0.2..2.0), rng.gen_range(0.0..6.0), 5.0).unwrap();
            let outcomes = rng.gen_range(2..5);
            let povm = random_povm(&mut rng, 2, outcomes);
            let g = closed_generators(&rep, &point).unwrap();
            let q = qfim_from_generators(&g, &probe).unwrap();
            let rho_at = |lam: &[f64]| {
                let p = point
                    .with_param(0, lam[0])
                    .unwrap()
                    .with_param(1, lam[1])
                    .unwrap();
                probe.evolve(&unitary(&rep, &p)).unwrap().density()
            };
            let lam = point.params();
            let probs = born_probabilities(&rho_at(&lam), &povm).unwrap();
            let h = 1e-6;
            let mut grads = RMatrix::zeros(2, povm.len());
            for j in 0..2 {
                let mut up = lam.clone();
                let mut dn = lam.clone();
                up[j] += h;
                dn[j] -= h;
                let pu = born_probabilities(&rho_at(&up), &povm).unwrap();
                let pd = born_probabilities(&rho_at(&dn), &povm).unwrap();
                for i in 0..povm.len() {
                    grads[(j, i)] = (pu[i] - pd[i]) / (2.0 * h);
                }
            }
            // remove the O(h²) row-sum drift before the normalization check
            for j in 0..2 {
                let mean = grads.row(j).sum() / povm.len() as f64;
                for i in 0..povm.len() {
                    grads[(j, i)] -= mean;
                }
            }
            let f = classical_fim(&probs, &grads).unwrap();
            let (vals, _) = sym_eig(&(q.matrix() - f));
            assert!(vals[0] >= -1e-8, "min eig {}", vals[0]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn generator_route_invariants(seed in 0u64..10_000, n in 2usize..7, d in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let probe = random_probe(&mut rng, n);
            let g = gens_of((0..d).map(|_| random_hermitian(&mut rng, n)).collect());
            let q = qfim_from_generators(&g, &probe).unwrap();
            let u = uhlmann_from_generators(&g, &probe).unwrap();
            if let Ok(r) = ai_measure(&q, &u, SINGULAR_REL_TOL) {
                prop_assert!((-1e-12..=1.0 + 1e-9).contains(&r));
                let b = holevo_pure(&q, &u, None, SINGULAR_REL_TOL).unwrap();
                prop_assert!(b.delta >= -1e-12);
                prop_assert!(b.delta <= r + 1e-9);
                prop_assert!(b.c_h >= b.c_sld - 1e-9);
            }
        }

        #[test]
        fn sld_route_matches_generator_route(seed in 0u64..10_000, n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let probe = random_probe(&mut rng, n);
            let gens: Vec<_> = (0..2).map(|_| random_hermitian(&mut rng, n)).collect();
            let rho = probe.density();
            // ∂_l ρ = i[ℋ_l, ρ] for ψ = U ψ₀ evaluated in the ψ₀ frame
            let slds: Vec<_> = gens
                .iter()
                .map(|h| {
                    let drho = HermitianMatrix::from_hermitian_part(&(commutator(h.as_matrix(), rho.as_matrix()) * I));
                    sld_solve(&rho, &drho).unwrap()
                })
                .collect();
            let g = gens_of(gens);
            let q_gen = qfim_from_generators(&g, &probe).unwrap();
            let d_gen = uhlmann_from_generators(&g, &probe).unwrap();
            let q_sld = qfim_from_slds(&rho, &slds, default_labels(2)).unwrap();
            let d_sld = uhlmann_from_slds(&rho, &slds, default_labels(2)).unwrap();
            prop_assert!(rel_r(q_gen.matrix(), q_sld.matrix()) < 1e-6);
            prop_assert!(rel_r(d_gen.matrix(), d_sld.matrix()) < 1e-6);
            for k in 0..2 {
                prop_assert!((q_gen.matrix()[(k, k)] - q_sld.matrix()[(k, k)]).abs() < 1e-7);
            }
        }
    }
}
