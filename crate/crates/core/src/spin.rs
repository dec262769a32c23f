//! Irreducible su(2) representations.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, HermitianMatrix, UnitVec3, I};

/// Spin operators `J_x, J_y, J_z` in the `N = 2s + 1` dimensional irrep.
///
/// Basis ordering is the `J_z` eigenbasis with `m = s, s−1, …, −s`, so index
/// `0` is `|J⟩` and index `N−1` is `|−J⟩`.
#[derive(Debug, Clone)]
pub struct SpinRep {
    dim: usize,
    jx: HermitianMatrix,
    jy: HermitianMatrix,
    jz: HermitianMatrix,
}

impl SpinRep {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let s = (dim as f64 - 1.0) / 2.0;
        let m = |k: usize| s - k as f64;
        let jz = CMatrix::from_fn(dim, dim, |r, col| if r == col { c(m(r)) } else { c(0.0) });
        // ⟨m+1|J₊|m⟩ = sqrt(s(s+1) − m(m+1)); row k−1 holds m(k)+1.
        let mut jp = CMatrix::zeros(dim, dim);
        for k in 1..dim {
            let mk = m(k);
            jp[(k - 1, k)] = c((s * (s + 1.0) - mk * (mk + 1.0)).sqrt());
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * c(0.5);
        let jy = (&jp - &jm) * (-I * 0.5);
        Ok(Self {
            dim,
            jx: HermitianMatrix::from_trusted(jx),
            jy: HermitianMatrix::from_trusted(jy),
            jz: HermitianMatrix::from_trusted(jz),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spin(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    pub fn jx(&self) -> &HermitianMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &HermitianMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &HermitianMatrix {
        &self.jz
    }

    /// `n · J` for a unit direction.
    pub fn j_direction(&self, n: &UnitVec3) -> HermitianMatrix {
        self.j_vector(&n.components())
    }

    /// `v · J` for an arbitrary real vector.
    pub fn j_vector(&self, v: &[f64; 3]) -> HermitianMatrix {
        let m = self.jx.as_matrix() * c(v[0])
            + self.jy.as_matrix() * c(v[1])
            + self.jz.as_matrix() * c(v[2]);
        HermitianMatrix::from_trusted(m)
    }
}
