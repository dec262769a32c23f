//! Dense Hermitian kernels shared by every other module.
//!
//! Matrices are small (a few hundred rows at most), so everything here is
//! plain dense `nalgebra` storage with `f64` / `Complex64` entries.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

/// Relative Hermiticity tolerance accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative threshold `λ_min / λ_max` below which a symmetric matrix is
/// reported singular.
pub const SINGULAR_REL_TOL: f64 = 1e-10;

const SPECTRUM_IMAG_TOL: f64 = 1e-8;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A complex square matrix with `A = A†`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] relative to the Frobenius norm.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let residual = hermitian_residual(&m);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        Ok(Self(m))
    }

    /// Takes the Hermitian part `(A + A†)/2`.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self((m + m.adjoint()) * c(0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    /// Wraps a real symmetric matrix.
    pub fn from_real(m: &RMatrix) -> Result<Self> {
        Self::new(m.map(c))
    }

    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        debug_assert!(hermitian_residual(&m) <= 1e-9);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Real linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self(&self.0 * c(a) + &other.0 * c(b))
    }

    pub fn scale(&self, a: f64) -> Self {
        Self(&self.0 * c(a))
    }

    /// `⟨ψ|A|ψ⟩`, real for Hermitian `A`.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.0 * psi)).re
    }
}

/// `‖A − A†‖_F / max(1, ‖A‖_F)`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm() / m.norm().max(1.0)
}

pub(crate) fn symmetric_residual(m: &RMatrix) -> f64 {
    (m - m.transpose()).norm() / m.norm().max(1.0)
}

/// Unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3([f64; 3]);

impl UnitVec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self([x, y, z]))
    }

    /// Built from trigonometric expressions that are unit by construction.
    pub(crate) fn from_trig(v: [f64; 3]) -> Self {
        debug_assert!((norm3(&v) - 1.0).abs() < 1e-12);
        Self(v)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &[f64; 3]) -> f64 {
        dot3(&self.0, other)
    }

    pub fn cross(&self, other: &Self) -> [f64; 3] {
        cross3(&self.0, &other.0)
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Eigendecomposition `A = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

pub fn herm_eig(a: &HermitianMatrix) -> HermEig {
    let eig = SymmetricEigen::new(a.0.clone());
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermEig { values, vectors }
}

/// Real symmetric eigendecomposition, ascending.
pub(crate) fn sym_eig(a: &RMatrix) -> (DVector<f64>, RMatrix) {
    let eig = SymmetricEigen::new(a.clone());
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = RMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `exp(−i c A)` through the eigendecomposition of `A`.
pub fn expm_i(a: &HermitianMatrix, coeff: f64) -> CMatrix {
    let HermEig { values, vectors } = herm_eig(a);
    let phases = DVector::from_iterator(
        values.len(),
        values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -coeff * l)),
    );
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * vectors.adjoint()
}

/// Largest absolute eigenvalue of a matrix whose spectrum is real.
///
/// Eigenvalues come from the complex Schur form. An imaginary part above
/// `1e-8` relative to the largest modulus is rejected.
pub fn spectral_absmax(a: &CMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    if a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let eigs = complex_eigenvalues(a)?;
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let imag = eigs.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale;
    if imag > SPECTRUM_IMAG_TOL {
        return Err(Error::SpectrumNotReal(imag));
    }
    Ok(eigs.iter().map(|z| z.re.abs()).fold(0.0, f64::max))
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a general complex matrix (diagonal of the Schur form).
pub fn complex_eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(
        Error::NonConvergence {
            terms: SCHUR_MAX_ITER,
            last: f64::NAN,
        },
    )?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Sum of singular values.
pub fn trace_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.sum()
}

pub fn trace_norm_real(a: &RMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.sum()
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// Outcome of a guarded symmetric inversion.
#[derive(Debug, Clone, PartialEq)]
pub enum SymInverse {
    Inverse(RMatrix),
    Singular { ratio: f64 },
}

impl SymInverse {
    pub fn into_result(self) -> Result<RMatrix> {
        match self {
            SymInverse::Inverse(m) => Ok(m),
            SymInverse::Singular { ratio } => Err(Error::Singular { ratio }),
        }
    }
}

/// Inverts a symmetric matrix unless `λ_min / λ_max < rel_tol`.
///
/// Intended for positive semidefinite input; an indefinite matrix has a
/// negative ratio and is therefore reported singular.
pub fn sym_inverse(q: &RMatrix, rel_tol: f64) -> Result<SymInverse> {
    if !q.is_square() {
        return Err(Error::NotSquare(q.nrows(), q.ncols()));
    }
    let residual = symmetric_residual(q);
    if residual > 1e-10 {
        return Err(Error::NotSymmetric(residual));
    }
    let n = q.nrows();
    if n == 0 {
        return Ok(SymInverse::Inverse(RMatrix::zeros(0, 0)));
    }
    let sym = (q + q.transpose()) * 0.5;
    let (values, vectors) = sym_eig(&sym);
    let max = values[n - 1];
    let ratio = if max > 0.0 {
        values[0] / max
    } else {
        f64::NEG_INFINITY
    };
    if !(ratio >= rel_tol) {
        return Ok(SymInverse::Singular { ratio });
    }
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= values[j];
    }
    Ok(SymInverse::Inverse(scaled * vectors.transpose()))
}

/// `λ_min / λ_max` of a symmetric matrix.
pub fn eigen_ratio(q: &RMatrix) -> f64 {
    let n = q.nrows();
    if n == 0 {
        return 1.0;
    }
    let (values, _) = sym_eig(&((q + q.transpose()) * 0.5));
    let max = values[n - 1];
    if max > 0.0 {
        values[0] / max
    } else {
        f64::NEG_INFINITY
    }
}

/// Principal square root of a symmetric positive definite matrix.
pub(crate) fn sym_sqrt(w: &RMatrix) -> Result<RMatrix> {
    let (values, vectors) = sym_eig(&((w + w.transpose()) * 0.5));
    if values.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositive(values[0]));
    }
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= values[j].sqrt();
    }
    Ok(scaled * vectors.transpose())
}

/// Row-major copy, for serialization.
pub fn to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `⟨ψ|A|ψ⟩` without assuming Hermiticity.
pub(crate) fn expect_c(a: &CMatrix, psi: &CVector) -> Complex64 {
    psi.dotc(&(a * psi))
}

pub(crate) fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub(crate) fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn herm_eig_diagonal() {
        let a = HermitianMatrix::from_real(&RMatrix::from_diagonal(&DVector::from_vec(vec![
            3.0, 1.0, 2.0,
        ])))
        .unwrap();
        let e = herm_eig(&a);
        assert_eq!(e.values.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn herm_eig_reconstructs_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 5, 9] {
            let a = random_hermitian(&mut rng, n);
            let e = herm_eig(&a);
            let d = CMatrix::from_diagonal(&e.values.map(c));
            let rebuilt = &e.vectors * d * e.vectors.adjoint();
            assert!((rebuilt - a.as_matrix()).norm() <= 1e-10 * a.as_matrix().norm());
            let vvh = &e.vectors * e.vectors.adjoint();
            assert!((vvh - CMatrix::identity(n, n)).norm() < 1e-10);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn expm_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_hermitian(&mut rng, 4);
        let u = expm_i(&a, 0.0);
        assert!((u - CMatrix::identity(4, 4)).norm() < 1e-14);
    }

    #[test]
    fn expm_half_spin_period() {
        let jz = HermitianMatrix::from_real(&RMatrix::from_diagonal(&DVector::from_vec(vec![
            0.5, -0.5,
        ])))
        .unwrap();
        let full = expm_i(&jz, 4.0 * PI);
        assert!((full - CMatrix::identity(2, 2)).norm() < 1e-12);
        let half = expm_i(&jz, 2.0 * PI);
        assert!((half + CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn expm_unitary_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 6] {
            let a = random_hermitian(&mut rng, n);
            let u = expm_i(&a, 1.7);
            assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-10);
        }
    }

    #[test]
    fn spectral_absmax_basic() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(-3.0), c(2.0)]));
        assert_eq!(spectral_absmax(&d).unwrap(), 3.0);
        assert_eq!(spectral_absmax(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_absmax_antisymmetric_pair() {
        for a in [0.3, -2.0, 7.5] {
            let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(a), c(-a), c(0.0)]);
            let r = spectral_absmax(&(m.clone() * I)).unwrap();
            assert!((r - a.abs()).abs() < 1e-12);
            assert!((trace_norm(&m) / 2.0 - r).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_absmax_rejects_complex_spectrum() {
        // real rotation generator: eigenvalues ±i
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        assert!(matches!(
            spectral_absmax(&m),
            Err(Error::SpectrumNotReal(_))
        ));
    }

    #[test]
    fn spectral_absmax_non_normal_real_spectrum() {
        // upper triangular, eigenvalues 1 and -4
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(10.0), c(0.0), c(-4.0)]);
        assert!((spectral_absmax(&m).unwrap() - 4.0).abs() < 1e-12);
        // generic real matrix with real spectrum: similarity transform of diag(2,-5,1)
        let s = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0),
                c(2.0),
                c(0.5),
                c(0.0),
                c(1.0),
                c(3.0),
                c(1.0),
                c(0.0),
                c(1.0),
            ],
        );
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), c(-5.0), c(1.0)]));
        let m = &s * d * s.clone().try_inverse().unwrap();
        assert!((spectral_absmax(&m).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn trace_norm_basic() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-2.0)]));
        assert!((trace_norm(&d) - 3.0).abs() < 1e-14);
        let a = 1.25;
        let m = RMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0]);
        assert!((trace_norm_real(&m) - 2.0 * a).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_matches_gram_eigen_oracle() {
        // oracle: singular values are sqrt(eig(A†A)), computed without SVD
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 7] {
            let a = random_complex(&mut rng, n);
            let gram = HermitianMatrix::from_hermitian_part(&(a.adjoint() * &a));
            let oracle: f64 = herm_eig(&gram)
                .values
                .iter()
                .map(|&l| l.max(0.0).sqrt())
                .sum();
            assert!((trace_norm(&a) - oracle).abs() < 1e-10 * oracle);
        }
    }

    #[test]
    fn sym_inverse_cases() {
        let id = RMatrix::identity(3, 3);
        assert_eq!(
            sym_inverse(&id, SINGULAR_REL_TOL).unwrap(),
            SymInverse::Inverse(id.clone())
        );
        let nearly = RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-14]));
        assert!(matches!(
            sym_inverse(&nearly, 1e-10).unwrap(),
            SymInverse::Singular { .. }
        ));
        let asym = RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            sym_inverse(&asym, 1e-10),
            Err(Error::NotSymmetric(_))
        ));
        let q = RMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let inv = sym_inverse(&q, 1e-10).unwrap().into_result().unwrap();
        assert!((&q * inv - RMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn unit_vec_validation() {
        assert!(UnitVec3::new(0.6, 0.8, 0.0).is_ok());
        assert!(matches!(
            UnitVec3::new(1.0, 1.0, 0.0),
            Err(Error::NotNormalized(_))
        ));
    }

    proptest! {
        #[test]
        fn expm_group_law(seed in 0u64..500, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(&mut rng, n);
            let lhs = expm_i(&a, c1) * expm_i(&a, c2);
            let rhs = expm_i(&a, c1 + c2);
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-9);
        }

        #[test]
        fn sym_sqrt_squares_back(seed in 0u64..500, n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_complex(&mut rng, n).map(|z| z.re);
            let w = &b * b.transpose() + RMatrix::identity(n, n);
            let s = sym_sqrt(&w).unwrap();
            prop_assert!((&s * &s - &w).norm() < 1e-10 * w.norm());
        }
    }
}
