//! s-maps and j-maps of bipartite vectors.
//!
//! A vector `ψ = Σ C[a][b] |a⟩⊗|b⟩` defines the antilinear Hilbert–Schmidt
//! map `s^{BA}: φ ↦ Σ_j ⟨φ, a_j⟩ b_j` for any representation `ψ = Σ a_j ⊗ b_j`.
//! In the computational basis its K-matrix is `Cᵀ`; the reverse map `s^{AB}`
//! has K-matrix `C` and is the antilinear adjoint of `s^{BA}`.
//!
//! A Lüders measurement of `|φ⟩⟨φ|` on the A side prepares `φ ⊗ s^{BA}φ`,
//! which is what makes the map independent of the chosen representation.

use std::fmt;

use crate::antilinear::{self, AntilinearMap};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::state::{DensityOperator, PureState};
use crate::tol::{RANK_TOL, TOL_EQ, TOL_NORM};

/// Which way an s-map or channel transports vectors between the two factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// From the first factor (A) to the second (B).
    BA,
    /// From the second factor (B) to the first (A).
    AB,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::BA => Direction::AB,
            Direction::AB => Direction::BA,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::BA => "ba",
            Direction::AB => "ab",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Direction::BA),
            "ab" => Ok(Direction::AB),
            other => Err(Error::InvalidArgument(format!("unknown direction {other:?}"))),
        }
    }
}

/// Which party an entanglement statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// s-map of a bipartite vector (normalized or not).
pub fn smap(psi: &PureState, direction: Direction) -> Result<AntilinearMap> {
    let c = psi.coefficients()?;
    AntilinearMap::from_kmatrix(match direction {
        Direction::BA => c.transpose(),
        Direction::AB => c,
    })
}

/// s-map assembled term by term from a sum representation `ψ = Σ a_j ⊗ b_j`.
///
/// `Σ_j ⟨φ, a_j⟩ b_j = (Σ_j b_j a_jᵀ) conj(φ)`.
pub fn smap_from_terms(terms: &[(ComplexVector, ComplexVector)], direction: Direction) -> Result<AntilinearMap> {
    let (da, db) = match terms.first() {
        Some((a, b)) => (a.len(), b.len()),
        None => return Err(Error::InvalidArgument("empty sum representation".into())),
    };
    let mut k = match direction {
        Direction::BA => ComplexMatrix::zeros(db, da),
        Direction::AB => ComplexMatrix::zeros(da, db),
    };
    for (a, b) in terms {
        if a.len() != da || b.len() != db {
            return Err(Error::dims("sum representation", format!("({da}, {db})"), format!("({}, {})", a.len(), b.len())));
        }
        match direction {
            Direction::BA => k += b * a.transpose(),
            Direction::AB => k += a * b.transpose(),
        }
    }
    AntilinearMap::from_kmatrix(k)
}

/// Inverse of [`smap`]: reads the vector back off an s-map.
pub fn vector_from_smap(s: &AntilinearMap, direction: Direction) -> Result<PureState> {
    let c = match direction {
        Direction::BA => s.kmatrix().transpose(),
        Direction::AB => s.kmatrix().clone(),
    };
    let (da, db) = c.shape();
    let amps = ComplexVector::from_iterator(da * db, (0..da).flat_map(|a| (0..db).map(move |b| (a, b))).map(|(a, b)| c[(a, b)]));
    PureState::unnormalized(vec![da, db], amps)
}

fn ensure_unit(phi: &ComplexVector) -> Result<()> {
    let norm = phi.norm();
    if (norm - 1.0).abs() > TOL_NORM {
        Err(Error::NotNormalized { norm })
    } else {
        Ok(())
    }
}

/// Outcome of projecting the A side onto a unit vector.
#[derive(Debug, Clone)]
pub struct MeasurementUpdate {
    pub probability: f64,
    /// `φ ⊗ s^{BA}φ`, not normalized.
    pub prepared: PureState,
}

/// `(|φ⟩⟨φ| ⊗ 1)ψ` computed as `φ ⊗ s^{BA}φ`.
pub fn measure_update_vector(psi: &PureState, phi_a: &ComplexVector) -> Result<MeasurementUpdate> {
    let (da, db) = psi.bipartite_dims()?;
    if phi_a.len() != da {
        return Err(Error::dims("measurement vector", da, phi_a.len()));
    }
    ensure_unit(phi_a)?;
    let b_part = smap(psi, Direction::BA)?.apply(phi_a)?;
    let prepared = linalg::tensor_vec(phi_a, &b_part);
    let probability = prepared.norm_squared();
    Ok(MeasurementUpdate {
        probability,
        prepared: PureState::unnormalized(vec![da, db], prepared)?,
    })
}

/// `Σ_k φ_k ⊗ s^{BA}φ_k` for a resolution of the identity `{φ_k}` on A.
pub fn reconstruct_from_resolution(psi: &PureState, family: &[ComplexVector]) -> Result<PureState> {
    let (da, db) = psi.bipartite_dims()?;
    let mut resolution = ComplexMatrix::zeros(da, da);
    for phi in family {
        if phi.len() != da {
            return Err(Error::dims("resolution vector", da, phi.len()));
        }
        resolution += linalg::projector(phi);
    }
    let residual = linalg::max_abs_diff(&resolution, &linalg::identity(da));
    if residual > 1e-10 {
        return Err(Error::IncompleteBasis { residual });
    }
    let s = smap(psi, Direction::BA)?;
    let mut out = ComplexVector::zeros(da * db);
    for phi in family {
        out += linalg::tensor_vec(phi, &s.apply(phi)?);
    }
    PureState::unnormalized(vec![da, db], out)
}

/// The two trace formulas for the inner product `⟨ψ, φ⟩`.
#[derive(Debug, Clone, Copy)]
pub struct SmapOverlap {
    /// `Tr_A s_φ^{AB} s_ψ^{BA}`
    pub trace_a: linalg::c64,
    /// `Tr_B s_φ^{BA} s_ψ^{AB}`
    pub trace_b: linalg::c64,
}

pub fn overlap_via_smaps(phi: &PureState, psi: &PureState) -> Result<SmapOverlap> {
    if phi.factor_dims() != psi.factor_dims() {
        return Err(Error::dims("overlap", format!("{:?}", psi.factor_dims()), format!("{:?}", phi.factor_dims())));
    }
    let trace_a = antilinear::compose_anti_anti(&smap(phi, Direction::AB)?, &smap(psi, Direction::BA)?)?.trace();
    let trace_b = antilinear::compose_anti_anti(&smap(phi, Direction::BA)?, &smap(psi, Direction::AB)?)?.trace();
    Ok(SmapOverlap { trace_a, trace_b })
}

/// `(ρ^A, ρ^B) = (s^{AB} s^{BA}, s^{BA} s^{AB})`.
pub fn reduced_densities_via_smaps(psi: &PureState) -> Result<(DensityOperator, DensityOperator)> {
    let (da, db) = psi.bipartite_dims()?;
    let s_ba = smap(psi, Direction::BA)?;
    let s_ab = s_ba.adjoint();
    let rho_a = antilinear::compose_anti_anti(&s_ab, &s_ba)?;
    let rho_b = antilinear::compose_anti_anti(&s_ba, &s_ab)?;
    if psi.is_normalized() {
        Ok((DensityOperator::new(vec![da], rho_a)?, DensityOperator::new(vec![db], rho_b)?))
    } else {
        Ok((
            DensityOperator::subnormalized(vec![da], rho_a)?,
            DensityOperator::subnormalized(vec![db], rho_b)?,
        ))
    }
}

/// `ψ = Σ_j √p_j φ_j^A ⊗ φ_j^B`.
///
/// `left` and `right` are complete orthonormal bases of A and B; only the
/// first `coefficients.len() = min(dA, dB)` columns carry weight.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl SchmidtDecomposition {
    pub fn dims(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.nrows())
    }

    /// `p_j`, zero past the last stored coefficient.
    pub fn weight(&self, j: usize) -> f64 {
        self.coefficients.get(j).copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&p| p > RANK_TOL).count()
    }

    pub fn left_vector(&self, j: usize) -> ComplexVector {
        self.left.column(j).into_owned()
    }

    pub fn right_vector(&self, j: usize) -> ComplexVector {
        self.right.column(j).into_owned()
    }

    /// The terms `(√p_j φ_j^A, φ_j^B)` of the decomposition.
    pub fn terms(&self) -> Vec<(ComplexVector, ComplexVector)> {
        (0..self.coefficients.len())
            .map(|j| (self.left_vector(j) * linalg::re(self.weight(j).sqrt()), self.right_vector(j)))
            .collect()
    }

    pub fn reconstruct(&self) -> ComplexVector {
        let (da, db) = self.dims();
        self.terms()
            .iter()
            .fold(ComplexVector::zeros(da * db), |acc, (a, b)| acc + linalg::tensor_vec(a, b))
    }
}

/// Schmidt decomposition from the SVD `C = U Σ V†`: `φ_j^A = u_j`, `φ_j^B = conj(v_j)`, `p_j = σ_j²`.
pub fn schmidt(psi: &PureState) -> Result<SchmidtDecomposition> {
    let (da, db) = psi.bipartite_dims()?;
    let c = psi.coefficients()?;
    let (u, sigma, v) = linalg::svd(&c);
    let left = linalg::complete_orthonormal(&u, da);
    let right = linalg::complete_orthonormal(&v.conjugate(), db);
    Ok(SchmidtDecomposition {
        coefficients: sigma.iter().map(|s| s * s).collect(),
        left,
        right,
    })
}

/// Partial antiunitaries of the polar decompositions `s^{BA} = j^{BA}√ρ^A`, `s^{AB} = j^{AB}√ρ^B`.
#[derive(Debug, Clone)]
pub struct JMaps {
    pub ba: AntilinearMap,
    pub ab: AntilinearMap,
}

/// `j^{BA} = s^{BA} ∘ (√ρ^A)⁺` and `j^{AB} = s^{AB} ∘ (√ρ^B)⁺`, pseudo-inverses cut at [`RANK_TOL`].
pub fn polar_jmaps(psi: &PureState) -> Result<JMaps> {
    let s_ba = smap(psi, Direction::BA)?;
    let s_ab = s_ba.adjoint();
    let rho_a = antilinear::compose_anti_anti(&s_ab, &s_ba)?;
    let rho_b = antilinear::compose_anti_anti(&s_ba, &s_ab)?;
    let ba = antilinear::compose_anti_linear(&s_ba, &linalg::pinv_sqrt_psd(&rho_a, RANK_TOL)?)?;
    let ab = antilinear::compose_anti_linear(&s_ab, &linalg::pinv_sqrt_psd(&rho_b, RANK_TOL)?)?;
    Ok(JMaps { ba, ab })
}

/// Residuals of the polar factorizations and support relations of the j-maps.
#[derive(Debug, Clone, Copy)]
pub struct PolarCheck {
    /// `‖s^{BA} − j^{BA}√ρ^A‖_max`
    pub left: f64,
    /// `‖s^{BA} − √ρ^B j^{BA}‖_max`
    pub right: f64,
    /// `‖j^{AB}j^{BA} − supp ρ^A‖_max`
    pub support_a: f64,
    /// `‖j^{BA}j^{AB} − supp ρ^B‖_max`
    pub support_b: f64,
}

impl PolarCheck {
    pub fn max_residual(&self) -> f64 {
        self.left.max(self.right).max(self.support_a).max(self.support_b)
    }
}

pub fn polar_check(psi: &PureState) -> Result<PolarCheck> {
    let s_ba = smap(psi, Direction::BA)?;
    let j = polar_jmaps(psi)?;
    let rho = psi.density()?;
    let rho_a = rho.partial_trace(0)?;
    let rho_b = rho.partial_trace(1)?;
    let left = antilinear::compose_anti_linear(&j.ba, &linalg::matrix_sqrt(rho_a.matrix())?)?;
    let right = antilinear::compose_linear_anti(&linalg::matrix_sqrt(rho_b.matrix())?, &j.ba)?;
    let support_a = linalg::support_projector(rho_a.matrix(), RANK_TOL)?;
    let support_b = linalg::support_projector(rho_b.matrix(), RANK_TOL)?;
    Ok(PolarCheck {
        left: s_ba.max_abs_diff(&left),
        right: s_ba.max_abs_diff(&right),
        support_a: linalg::max_abs_diff(&antilinear::compose_anti_anti(&j.ab, &j.ba)?, &support_a),
        support_b: linalg::max_abs_diff(&antilinear::compose_anti_anti(&j.ba, &j.ab)?, &support_b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementClass {
    Product,
    Partial,
    CompletelyEntangled,
    MaximallyEntangled,
}

impl fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglementClass::Product => "product",
            EntanglementClass::Partial => "partial",
            EntanglementClass::CompletelyEntangled => "completely_entangled",
            EntanglementClass::MaximallyEntangled => "maximally_entangled",
        })
    }
}

pub fn classify(decomposition: &SchmidtDecomposition, respect_to: Party) -> EntanglementClass {
    let (da, db) = decomposition.dims();
    let support: Vec<f64> = decomposition
        .coefficients
        .iter()
        .copied()
        .filter(|&p| p > RANK_TOL)
        .collect();
    let own_dim = match respect_to {
        Party::A => da,
        Party::B => db,
    };
    if support.len() == 1 {
        return EntanglementClass::Product;
    }
    if support.len() < own_dim {
        return EntanglementClass::Partial;
    }
    let max = support.iter().copied().fold(f64::MIN, f64::max);
    let min = support.iter().copied().fold(f64::MAX, f64::min);
    if da == db && max - min < TOL_EQ {
        EntanglementClass::MaximallyEntangled
    } else {
        EntanglementClass::CompletelyEntangled
    }
}

pub fn entanglement_class(psi: &PureState, respect_to: Party) -> Result<EntanglementClass> {
    Ok(classify(&schmidt(psi)?, respect_to))
}

/// Residuals of `s_φ^{BA} = Y s_ψ^{BA} X†` and `s_φ^{AB} = X s_ψ^{AB} Y†` for `φ = (X⊗Y)ψ`.
#[derive(Debug, Clone, Copy)]
pub struct LocalTransformReport {
    pub ba_residual: f64,
    pub ab_residual: f64,
}

impl LocalTransformReport {
    pub fn max_residual(&self) -> f64 {
        self.ba_residual.max(self.ab_residual)
    }
}

pub fn local_transform_smap(psi: &PureState, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<LocalTransformReport> {
    let (da, db) = psi.bipartite_dims()?;
    if x.shape() != (da, da) || y.shape() != (db, db) {
        return Err(Error::dims(
            "local transform",
            format!("{da}x{da} and {db}x{db}"),
            format!("{:?} and {:?}", x.shape(), y.shape()),
        ));
    }
    let transformed = linalg::tensor(x, y) * psi.amplitudes();
    let phi = PureState::unnormalized(vec![da, db], transformed)?;

    let s_psi_ba = smap(psi, Direction::BA)?;
    let s_psi_ab = s_psi_ba.adjoint();
    let predicted_ba = antilinear::compose_anti_linear(&antilinear::compose_linear_anti(y, &s_psi_ba)?, &x.adjoint())?;
    let predicted_ab = antilinear::compose_anti_linear(&antilinear::compose_linear_anti(x, &s_psi_ab)?, &y.adjoint())?;
    Ok(LocalTransformReport {
        ba_residual: smap(&phi, Direction::BA)?.max_abs_diff(&predicted_ba),
        ab_residual: smap(&phi, Direction::AB)?.max_abs_diff(&predicted_ab),
    })
}

#[derive(Debug, Clone)]
pub struct StabilizerCheck {
    /// `j^{BA} U^A j^{AB}`
    pub ub: ComplexMatrix,
    /// `‖(U^A ⊗ U^B)ψ − ψ‖_max`
    pub residual: f64,
    pub fixed: bool,
}

/// Local stabilizer partner `U^B = j^{BA} U^A j^{AB}` of a maximally entangled vector.
pub fn stabilizer_check(psi: &PureState, ua: &ComplexMatrix) -> Result<StabilizerCheck> {
    let (da, _) = psi.bipartite_dims()?;
    let class = entanglement_class(psi, Party::A)?;
    if class != EntanglementClass::MaximallyEntangled {
        return Err(Error::NotMaximallyEntangled {
            class: class.to_string(),
        });
    }
    if ua.shape() != (da, da) {
        return Err(Error::dims("stabilizer unitary", format!("{da}x{da}"), format!("{:?}", ua.shape())));
    }
    let residual = linalg::unitarity_residual(ua);
    if residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let j = polar_jmaps(psi)?;
    let ub = antilinear::sandwich(&j.ba, ua, &j.ab)?;
    let image = linalg::tensor(ua, &ub) * psi.amplitudes();
    let residual = linalg::max_abs_diff(&image, psi.amplitudes());
    Ok(StabilizerCheck {
        ub,
        residual,
        fixed: residual < TOL_EQ,
    })
}
