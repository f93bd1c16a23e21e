//! Twisted products of antilinear maps and the modular objects `J`, `Δ`, `S`.
//!
//! `m_AB ⊗̃ m_BA` sends `φ^A ⊗ φ^B` to `m_AB(φ^B) ⊗ m_BA(φ^A)`. In K-matrix form
//! this is `(K_AB ⊗ K_BA) · SWAP`, where `SWAP` reorders `A⊗B` into `B⊗A`.

use crate::antilinear::{self, AntilinearMap};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, ComplexVector};
use crate::smap::{self, Direction, JMaps, SchmidtDecomposition};
use crate::state::PureState;
use crate::tol::RANK_TOL;

/// Antilinear operator on `C^dA ⊗ C^dB`, `Φ ↦ kmatrix · conj(Φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedAntilinearOperator {
    dims: (usize, usize),
    kmatrix: ComplexMatrix,
}

impl TwistedAntilinearOperator {
    pub fn from_kmatrix(dims: (usize, usize), kmatrix: ComplexMatrix) -> Result<Self> {
        let n = dims.0 * dims.1;
        if kmatrix.shape() != (n, n) {
            return Err(Error::dims("twisted operator", format!("{n}x{n}"), format!("{:?}", kmatrix.shape())));
        }
        linalg::ensure_finite(&kmatrix, "twisted operator")?;
        Ok(Self { dims, kmatrix })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn kmatrix(&self) -> &ComplexMatrix {
        &self.kmatrix
    }

    pub fn apply(&self, phi: &ComplexVector) -> Result<ComplexVector> {
        if phi.len() != self.kmatrix.ncols() {
            return Err(Error::dims("twisted apply", self.kmatrix.ncols(), phi.len()));
        }
        Ok(&self.kmatrix * phi.conjugate())
    }

    pub fn as_antilinear(&self) -> AntilinearMap {
        AntilinearMap::from_kmatrix(self.kmatrix.clone()).expect("finite by construction")
    }

    /// `T ∘ T`, a linear operator.
    pub fn square(&self) -> ComplexMatrix {
        &self.kmatrix * self.kmatrix.conjugate()
    }

    /// `L ∘ T`.
    pub fn after_linear(&self, l: &ComplexMatrix) -> Result<Self> {
        let k = antilinear::compose_linear_anti(l, &self.as_antilinear())?.into_kmatrix();
        Self::from_kmatrix(self.dims, k)
    }

    /// `T ∘ L`.
    pub fn before_linear(&self, l: &ComplexMatrix) -> Result<Self> {
        let k = antilinear::compose_anti_linear(&self.as_antilinear(), l)?.into_kmatrix();
        Self::from_kmatrix(self.dims, k)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.kmatrix, &other.kmatrix)
    }
}

/// `m_AB ⊗̃ m_BA` for `m_AB: B → A` and `m_BA: A → B`.
pub fn twisted_tensor(m_ab: &AntilinearMap, m_ba: &AntilinearMap) -> Result<TwistedAntilinearOperator> {
    let (da, db) = (m_ab.dst_dim(), m_ab.src_dim());
    if m_ba.src_dim() != da || m_ba.dst_dim() != db {
        return Err(Error::dims(
            "twisted tensor",
            format!("{db}x{da}"),
            format!("{}x{}", m_ba.dst_dim(), m_ba.src_dim()),
        ));
    }
    let k = linalg::tensor(m_ab.kmatrix(), m_ba.kmatrix()) * linalg::swap_matrix(da, db);
    TwistedAntilinearOperator::from_kmatrix((da, db), k)
}

/// The four twisted products built from the s-maps and j-maps of a vector.
#[derive(Debug, Clone)]
pub struct TwistedFamily {
    pub jj: TwistedAntilinearOperator,
    pub js: TwistedAntilinearOperator,
    pub sj: TwistedAntilinearOperator,
    pub ss: TwistedAntilinearOperator,
}

pub fn twisted_family(psi: &PureState) -> Result<TwistedFamily> {
    let s_ba = smap::smap(psi, Direction::BA)?;
    let s_ab = smap::smap(psi, Direction::AB)?;
    let JMaps { ba: j_ba, ab: j_ab } = smap::polar_jmaps(psi)?;
    Ok(TwistedFamily {
        jj: twisted_tensor(&j_ab, &j_ba)?,
        js: twisted_tensor(&j_ab, &s_ba)?,
        sj: twisted_tensor(&s_ab, &j_ba)?,
        ss: twisted_tensor(&s_ab, &s_ba)?,
    })
}

/// `J = j ⊗̃ j` from the polar j-maps.
pub fn modular_conjugation(psi: &PureState) -> Result<TwistedAntilinearOperator> {
    let j = smap::polar_jmaps(psi)?;
    twisted_tensor(&j.ab, &j.ba)
}

/// `J` assembled directly from a Schmidt decomposition:
/// `φ_j^A ⊗ φ_k^B ↦ φ_k^A ⊗ φ_j^B` when `p_j p_k ≠ 0`, else `0`.
pub fn modular_conjugation_schmidt(psi: &PureState) -> Result<TwistedAntilinearOperator> {
    let decomposition = smap::schmidt(psi)?;
    let (da, db) = decomposition.dims();
    let r = decomposition.rank();
    let mut k = ComplexMatrix::zeros(da * db, da * db);
    for j in 0..r {
        for l in 0..r {
            let e = linalg::tensor_vec(&decomposition.left_vector(j), &decomposition.right_vector(l));
            let f = linalg::tensor_vec(&decomposition.left_vector(l), &decomposition.right_vector(j));
            k += f * e.transpose();
        }
    }
    TwistedAntilinearOperator::from_kmatrix((da, db), k)
}

/// Product basis `φ_j^A ⊗ φ_k^B` as columns, column index `j·dB + k`.
pub fn schmidt_product_basis(decomposition: &SchmidtDecomposition) -> ComplexMatrix {
    linalg::tensor(&decomposition.left, &decomposition.right)
}

/// Largest deviation of `⟨φ_k'^A⊗φ_j'^B, T(φ_j^A⊗φ_k^B)⟩` from the swap-or-zero pattern.
pub fn modcon2_residual(psi: &PureState, op: &TwistedAntilinearOperator) -> Result<f64> {
    let decomposition = smap::schmidt(psi)?;
    let (da, db) = decomposition.dims();
    if op.dims() != (da, db) {
        return Err(Error::dims("modular conjugation", format!("{da}x{db}"), format!("{:?}", op.dims())));
    }
    let basis = schmidt_product_basis(&decomposition);
    // columns are images of the basis vectors, expressed in the same basis
    let images = basis.adjoint() * op.kmatrix() * basis.conjugate();
    let mut worst: f64 = 0.0;
    for j in 0..da {
        for k in 0..db {
            let live = decomposition.weight(j) > RANK_TOL && decomposition.weight(k) > RANK_TOL;
            for row in 0..da * db {
                let expected = if live && k < da && j < db && row == k * db + j { 1.0 } else { 0.0 };
                worst = worst.max((images[(row, j * db + k)] - c64::new(expected, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

/// `Δ = ρ^A ⊗ (ρ^B)⁺`, pseudo-inverse cut at [`RANK_TOL`].
pub fn modular_operator(psi: &PureState) -> Result<ComplexMatrix> {
    let rho = psi.density()?;
    let rho_a = rho.partial_trace(0)?;
    let rho_b = rho.partial_trace(1)?;
    Ok(linalg::tensor(rho_a.matrix(), &linalg::pinv_psd(rho_b.matrix(), RANK_TOL)?))
}

/// `S = J ∘ √Δ`.
pub fn s_operator(psi: &PureState) -> Result<TwistedAntilinearOperator> {
    let root = linalg::matrix_sqrt(&modular_operator(psi)?)?;
    modular_conjugation(psi)?.before_linear(&root)
}

/// `P^A ⊗ P^B`, the support of the reduced densities.
pub fn support_projector(psi: &PureState) -> Result<ComplexMatrix> {
    let rho = psi.density()?;
    let pa = linalg::support_projector(rho.partial_trace(0)?.matrix(), RANK_TOL)?;
    let pb = linalg::support_projector(rho.partial_trace(1)?.matrix(), RANK_TOL)?;
    Ok(linalg::tensor(&pa, &pb))
}

/// Residuals of the structural properties of `J` on the support `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugationCheck {
    /// `max |J² − P|`.
    pub involution: f64,
    /// `max |(J P)† (J P) − conj(P)|`, i.e. `⟨JΦ, JΨ⟩ = ⟨Ψ, Φ⟩` for `Φ, Ψ` in the support.
    pub antiunitarity: f64,
}

pub fn check_conjugation(psi: &PureState, j: &TwistedAntilinearOperator) -> Result<ConjugationCheck> {
    let p = support_projector(psi)?;
    let restricted = j.before_linear(&p)?;
    let gram = restricted.kmatrix().adjoint() * restricted.kmatrix();
    Ok(ConjugationCheck {
        involution: linalg::max_abs_diff(&j.square(), &p),
        antiunitarity: linalg::max_abs_diff(&gram, &p.conjugate()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    /// Both sides restricted to inputs in the support.
    pub support: f64,
    /// Both sides on the whole composite space.
    pub full: f64,
}

/// Residuals of the relations between `Δ`, `S` and the mixed twisted products.
///
/// * `first`: `√Δ (j ⊗̃ s) = s ⊗̃ j`.
/// * `second_literal`: `S (1 ⊗ √ρ^B) = s ⊗̃ j`.
/// * `second_corrected`: `S (1 ⊗ √ρ^B) = j ⊗̃ s`.
///
/// In a Schmidt basis `S (1 ⊗ √ρ^B)` sends `φ_j^A ⊗ φ_k^B` to `√p_j φ_k^A ⊗ φ_j^B`
/// while `s ⊗̃ j` gives `√p_k φ_k^A ⊗ φ_j^B`, so the literal form holds only
/// when the nonzero Schmidt weights are all equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsReport {
    pub first: IdentityResidual,
    pub second_literal: IdentityResidual,
    pub second_corrected: IdentityResidual,
}

impl DsReport {
    /// Worst support residual over the identities that hold in general.
    pub fn max_valid_residual(&self) -> f64 {
        self.first.support.max(self.second_corrected.support)
    }
}

pub fn verify_ds_relations(psi: &PureState) -> Result<DsReport> {
    let family = twisted_family(psi)?;
    let rho_b = psi.density()?.partial_trace(1)?;
    let (da, _) = psi.bipartite_dims()?;
    let root_delta = linalg::matrix_sqrt(&modular_operator(psi)?)?;
    let p = support_projector(psi)?;

    let first_lhs = family.js.after_linear(&root_delta)?;
    let lift = linalg::tensor(&linalg::identity(da), &linalg::matrix_sqrt(rho_b.matrix())?);
    let second_lhs = s_operator(psi)?.before_linear(&lift)?;

    let residual = |lhs: &TwistedAntilinearOperator, rhs: &TwistedAntilinearOperator| -> Result<IdentityResidual> {
        Ok(IdentityResidual {
            support: lhs.before_linear(&p)?.max_abs_diff(&rhs.before_linear(&p)?),
            full: lhs.max_abs_diff(rhs),
        })
    };
    Ok(DsReport {
        first: residual(&first_lhs, &family.sj)?,
        second_literal: residual(&second_lhs, &family.sj)?,
        second_corrected: residual(&second_lhs, &family.js)?,
    })
}

/// `max |s ⊗̃ s − (√ρ^A ⊗ √ρ^B)(j ⊗̃ j)|`.
pub fn family_consistency(psi: &PureState) -> Result<f64> {
    let family = twisted_family(psi)?;
    let rho = psi.density()?;
    let roots = linalg::tensor(
        &linalg::matrix_sqrt(rho.partial_trace(0)?.matrix())?,
        &linalg::matrix_sqrt(rho.partial_trace(1)?.matrix())?,
    );
    Ok(family.ss.max_abs_diff(&family.jj.after_linear(&roots)?))
}
