//! Antilinear maps between finite-dimensional spaces.
//!
//! A map `s` with `s(λφ + χ) = λ̄ s(φ) + s(χ)` is stored as the matrix `K` of
//! `s ∘ conj`, so that `s(φ) = K · conj(φ)`. With this representation the
//! antilinear adjoint, defined by `⟨χ, sφ⟩ = ⟨φ, s*χ⟩`, is the plain
//! transpose of `K`.
//!
//! There is deliberately no way to tensor an antilinear map with a linear
//! one; product-space antilinear maps come only from the twisted construction
//! in [`crate::modular`].

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    kmatrix: ComplexMatrix,
}

impl AntilinearMap {
    /// Wraps `K` (`dst_dim × src_dim`) as the map `φ ↦ K · conj(φ)`.
    pub fn from_kmatrix(kmatrix: ComplexMatrix) -> Result<Self> {
        linalg::ensure_finite(&kmatrix, "antilinear map")?;
        Ok(Self { kmatrix })
    }

    /// Complex conjugation in the computational basis of `C^d`.
    pub fn conjugation(d: usize) -> Self {
        Self {
            kmatrix: linalg::identity(d),
        }
    }

    pub fn src_dim(&self) -> usize {
        self.kmatrix.ncols()
    }

    pub fn dst_dim(&self) -> usize {
        self.kmatrix.nrows()
    }

    pub fn kmatrix(&self) -> &ComplexMatrix {
        &self.kmatrix
    }

    pub fn into_kmatrix(self) -> ComplexMatrix {
        self.kmatrix
    }

    pub fn apply(&self, phi: &ComplexVector) -> Result<ComplexVector> {
        if phi.len() != self.src_dim() {
            return Err(Error::dims("antilinear apply", self.src_dim(), phi.len()));
        }
        Ok(&self.kmatrix * phi.conjugate())
    }

    /// Antilinear adjoint; `K ↦ Kᵀ`.
    pub fn adjoint(&self) -> Self {
        Self {
            kmatrix: self.kmatrix.transpose(),
        }
    }

    /// Hilbert–Schmidt norm, the Frobenius norm of `K`.
    pub fn hs_norm(&self) -> f64 {
        self.kmatrix.norm()
    }

    pub fn max_abs_diff(&self, other: &AntilinearMap) -> f64 {
        linalg::max_abs_diff(&self.kmatrix, &other.kmatrix)
    }
}

/// `s2 ∘ s1`, which is linear with matrix `K2 · conj(K1)`.
pub fn compose_anti_anti(s2: &AntilinearMap, s1: &AntilinearMap) -> Result<ComplexMatrix> {
    if s1.dst_dim() != s2.src_dim() {
        return Err(Error::dims("antilinear composition", s2.src_dim(), s1.dst_dim()));
    }
    Ok(&s2.kmatrix * s1.kmatrix.conjugate())
}

/// `s ∘ L`, antilinear with matrix `K · conj(L)`.
pub fn compose_anti_linear(s: &AntilinearMap, l: &ComplexMatrix) -> Result<AntilinearMap> {
    if l.nrows() != s.src_dim() {
        return Err(Error::dims("antilinear∘linear", s.src_dim(), l.nrows()));
    }
    Ok(AntilinearMap {
        kmatrix: &s.kmatrix * l.conjugate(),
    })
}

/// `L ∘ s`, antilinear with matrix `L · K`.
pub fn compose_linear_anti(l: &ComplexMatrix, s: &AntilinearMap) -> Result<AntilinearMap> {
    if l.ncols() != s.dst_dim() {
        return Err(Error::dims("linear∘antilinear", s.dst_dim(), l.ncols()));
    }
    Ok(AntilinearMap {
        kmatrix: l * &s.kmatrix,
    })
}

/// `s2 ∘ L ∘ s1` for antilinear `s1, s2`; the result is linear.
pub fn sandwich(s2: &AntilinearMap, l: &ComplexMatrix, s1: &AntilinearMap) -> Result<ComplexMatrix> {
    compose_anti_anti(s2, &compose_linear_anti(l, s1)?)
}
