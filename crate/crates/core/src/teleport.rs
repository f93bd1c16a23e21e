//! The quantum part of teleportation on `H^A ⊗ H^B ⊗ H^C`.
//!
//! An input `φ^A` and an ancilla `ψ^{BC}` are measured in an orthonormal basis
//! `{ψ_i^{AB}}`. Outcome `i` leaves `t_i φ^A` on C, where
//! `t_i = s^{CB} s_i^{BA}` composes two antilinear maps and is therefore linear.
//! Its trace norm equals the square root of the fidelity between the B-marginals
//! of `ψ_i^{AB}` and `ψ^{BC}`.

use rand::Rng;

use crate::antilinear;
use crate::channel::{self, canonical_decomposition};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::smap::{smap, Direction};
use crate::state::{fidelity, DensityOperator, PureState};
use crate::states;
use crate::tol::{RANK_TOL, TOL_EQ};

/// Orthonormal basis of `H^A ⊗ H^B` used for the joint measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    dims: (usize, usize),
    vectors: Vec<PureState>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<PureState>) -> Result<Self> {
        let dims = match vectors.first() {
            Some(v) => v.bipartite_dims()?,
            None => return Err(Error::InvalidArgument("empty measurement basis".into())),
        };
        let n = dims.0 * dims.1;
        for v in &vectors {
            if v.bipartite_dims()? != dims {
                return Err(Error::dims("basis vector", format!("{dims:?}"), format!("{:?}", v.factor_dims())));
            }
        }
        let mut gram_residual: f64 = 0.0;
        for (i, v) in vectors.iter().enumerate() {
            for (j, w) in vectors.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                gram_residual = gram_residual.max((v.inner(w)? - linalg::re(expected)).norm());
            }
        }
        if gram_residual > 1e-10 {
            return Err(Error::Invariant {
                name: "orthonormal_basis",
                detail: format!("Gram matrix deviates by {gram_residual:e}"),
            });
        }
        let resolution = vectors
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, v| acc + v.projector());
        let residual = linalg::max_abs_diff(&resolution, &linalg::identity(n));
        if residual > 1e-9 {
            return Err(Error::IncompleteBasis { residual });
        }
        Ok(Self { dims, vectors })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> Result<&PureState> {
        self.vectors.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.vectors.len(),
        })
    }
}

/// `t_i = s^{CB} ∘ s_i^{BA}`, a linear map `H^A → H^C`.
pub fn teleport_map(psi_bc: &PureState, psi_ab: &PureState) -> Result<ComplexMatrix> {
    let (db, _) = psi_bc.bipartite_dims()?;
    let (_, db_i) = psi_ab.bipartite_dims()?;
    if db != db_i {
        return Err(Error::dims("teleport map (shared B factor)", db, db_i));
    }
    antilinear::compose_anti_anti(&smap(psi_bc, Direction::BA)?, &smap(psi_ab, Direction::BA)?)
}

#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub index: usize,
    pub probability: f64,
    /// `t_i`
    pub map: ComplexMatrix,
    /// `t_i φ^A`, not normalized.
    pub output: ComplexVector,
    /// Deviation between `(|ψ_i⟩⟨ψ_i| ⊗ 1)(φ ⊗ ψ^{BC})` and `ψ_i ⊗ t_i φ`.
    pub projection_residual: f64,
}

/// Outcome `i` of teleporting `φ^A`, cross-checked against the tripartite projection.
pub fn teleport_outcome(
    phi_a: &ComplexVector,
    psi_bc: &PureState,
    basis: &MeasurementBasis,
    i: usize,
) -> Result<TeleportOutcome> {
    let psi_i = basis.get(i)?;
    let (da, db) = basis.dims();
    let (db_anc, dc) = psi_bc.bipartite_dims()?;
    if phi_a.len() != da || db_anc != db {
        return Err(Error::dims(
            "teleport outcome",
            format!("input {da}, ancilla B {db}"),
            format!("input {}, ancilla B {db_anc}", phi_a.len()),
        ));
    }
    let map = teleport_map(psi_bc, psi_i)?;
    let output = &map * phi_a;

    let joint = linalg::tensor_vec(phi_a, psi_bc.amplitudes());
    let lifted = linalg::tensor(&psi_i.projector(), &linalg::identity(dc));
    let projected = lifted * joint;
    let predicted = linalg::tensor_vec(psi_i.amplitudes(), &output);
    let projection_residual = linalg::max_abs_diff(&projected, &predicted);
    if projection_residual > 1e-10 {
        return Err(Error::Invariant {
            name: "tripartite_projection",
            detail: format!("residual {projection_residual:e}"),
        });
    }
    Ok(TeleportOutcome {
        index: i,
        probability: output.norm_squared(),
        map,
        output,
        projection_residual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct TeleportQuality {
    pub trace_norm: f64,
    /// Square root of the fidelity between the two B-marginals.
    pub sqrt_fidelity: f64,
}

impl TeleportQuality {
    pub fn gap(&self) -> f64 {
        (self.trace_norm - self.sqrt_fidelity).abs()
    }
}

pub fn teleport_quality(t: &ComplexMatrix, rho_i_b: &DensityOperator, rho_b: &DensityOperator) -> Result<TeleportQuality> {
    Ok(TeleportQuality {
        trace_norm: linalg::trace_norm(t),
        sqrt_fidelity: fidelity(rho_i_b, rho_b)?.sqrt(),
    })
}

/// [`teleport_quality`] with the marginals `Tr_A |ψ_i⟩⟨ψ_i|` and `Tr_C |ψ^{BC}⟩⟨ψ^{BC}|`.
pub fn teleport_quality_for(psi_bc: &PureState, psi_ab: &PureState) -> Result<TeleportQuality> {
    let t = teleport_map(psi_bc, psi_ab)?;
    let rho_i_b = psi_ab.density()?.partial_trace(1)?;
    let rho_b = psi_bc.density()?.partial_trace(0)?;
    teleport_quality(&t, &rho_i_b, &rho_b)
}

/// `t ω t†`
pub fn teleport_density(omega: &ComplexMatrix, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if omega.shape() != (t.ncols(), t.ncols()) {
        return Err(Error::dims(
            "teleport density",
            format!("{0}x{0}", t.ncols()),
            format!("{}x{}", omega.nrows(), omega.ncols()),
        ));
    }
    Ok(t * omega * t.adjoint())
}

/// `Φ_{ρ^{BC}}^{CB}(s_i^{BA} ω s_i^{AB})`, outcome `i` with a mixed ancilla.
pub fn teleport_mixed_ancilla(omega: &ComplexMatrix, rho_bc: &DensityOperator, psi_ab: &PureState) -> Result<ComplexMatrix> {
    let (da, db) = psi_ab.bipartite_dims()?;
    if omega.shape() != (da, da) {
        return Err(Error::dims("teleport input", format!("{da}x{da}"), format!("{:?}", omega.shape())));
    }
    match rho_bc.factor_dims() {
        &[b, _] if b == db => {}
        dims => return Err(Error::dims("ancilla B factor", db, format!("{dims:?}"))),
    }
    let s_i = smap(psi_ab, Direction::BA)?;
    let on_b = antilinear::sandwich(&s_i, omega, &s_i.adjoint())?;
    channel::channel_from_density(rho_bc, Direction::BA)?.apply(&on_b)
}

#[derive(Debug, Clone)]
pub enum Ancilla {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Ancilla {
    pub fn dims(&self) -> Result<(usize, usize)> {
        match self {
            Ancilla::Pure(p) => p.bipartite_dims(),
            Ancilla::Mixed(rho) => match rho.factor_dims() {
                &[b, c] => Ok((b, c)),
                dims => Err(Error::WrongArity {
                    expected: 2,
                    found: dims.len(),
                }),
            },
        }
    }

    pub fn density(&self) -> Result<DensityOperator> {
        match self {
            Ancilla::Pure(p) => p.density(),
            Ancilla::Mixed(rho) => Ok(rho.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub index: usize,
    pub probability: f64,
    /// Unnormalized state on C before any correction.
    pub output: ComplexMatrix,
    /// Normalized state on C after the correction (or uncorrected when none given).
    pub normalized: Option<ComplexMatrix>,
    /// Sum of `‖t_{i,k}‖₁` over the canonical decomposition of the ancilla.
    pub trace_norm: f64,
    /// `√F(ρ_i^B, ρ^B)`.
    pub sqrt_fidelity: f64,
    /// Fidelity of `normalized` to the input; `None` for outcomes of vanishing probability.
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ProtocolReport {
    pub outcomes: Vec<ProtocolOutcome>,
}

impl ProtocolReport {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Probability-weighted fidelity over outcomes with a defined fidelity.
    pub fn average_fidelity(&self) -> f64 {
        self.outcomes
            .iter()
            .filter_map(|o| o.fidelity.map(|f| f * o.probability))
            .sum()
    }
}

/// Runs every outcome of the protocol for input `omega` (a density operator on A).
pub fn run_protocol(
    omega: &DensityOperator,
    ancilla: &Ancilla,
    basis: &MeasurementBasis,
    corrections: Option<&[ComplexMatrix]>,
) -> Result<ProtocolReport> {
    let (da, db) = basis.dims();
    let (db_anc, dc) = ancilla.dims()?;
    if omega.dim() != da || db_anc != db {
        return Err(Error::dims(
            "protocol",
            format!("input {da}, ancilla B {db}"),
            format!("input {}, ancilla B {db_anc}", omega.dim()),
        ));
    }
    if let Some(us) = corrections {
        if us.len() != basis.len() {
            return Err(Error::dims("corrections", basis.len(), us.len()));
        }
        for u in us {
            if u.shape() != (dc, dc) {
                return Err(Error::dims("correction", format!("{dc}x{dc}"), format!("{:?}", u.shape())));
            }
            let residual = linalg::unitarity_residual(u);
            if residual > 1e-10 {
                return Err(Error::NotUnitary { residual });
            }
        }
    }

    let rho_bc = ancilla.density()?;
    let rho_b = rho_bc.partial_trace(0)?;
    let ancilla_terms = match ancilla {
        Ancilla::Pure(p) => vec![p.clone()],
        Ancilla::Mixed(rho) => canonical_decomposition(rho)
            .into_iter()
            .map(|v| PureState::unnormalized(vec![db, dc], v))
            .collect::<Result<_>>()?,
    };

    let mut outcomes = Vec::with_capacity(basis.len());
    for (i, psi_i) in basis.vectors().iter().enumerate() {
        let output = match ancilla {
            Ancilla::Pure(p) => teleport_density(omega.matrix(), &teleport_map(p, psi_i)?)?,
            Ancilla::Mixed(rho) => teleport_mixed_ancilla(omega.matrix(), rho, psi_i)?,
        };
        let probability = output.trace().re;
        let mut trace_norm = 0.0;
        for term in &ancilla_terms {
            trace_norm += linalg::trace_norm(&teleport_map(term, psi_i)?);
        }
        let rho_i_b = psi_i.density()?.partial_trace(1)?;
        let sqrt_fidelity = fidelity(&rho_i_b, &rho_b)?.sqrt();

        let (normalized, fid) = if probability > RANK_TOL {
            let mut out = output.unscale(probability);
            if let Some(us) = corrections {
                out = &us[i] * out * us[i].adjoint();
            }
            let f = linalg::fidelity_psd(omega.matrix(), &out)?;
            (Some(out), Some(f))
        } else {
            (None, None)
        };
        outcomes.push(ProtocolOutcome {
            index: i,
            probability,
            output,
            normalized,
            trace_norm,
            sqrt_fidelity,
            fidelity: fid,
        });
    }
    Ok(ProtocolReport { outcomes })
}

/// Corrections `U_i = t_i† / √c_i` for a pure ancilla whose maps satisfy `t_i† t_i = c_i 1`.
///
/// Fails when some `t_i` is not proportional to a unitary, which is the case
/// for anything but maximally entangled ancilla/basis pairs of matching size.
pub fn derive_corrections(psi_bc: &PureState, basis: &MeasurementBasis) -> Result<Vec<ComplexMatrix>> {
    let (da, _) = basis.dims();
    let (_, dc) = psi_bc.bipartite_dims()?;
    if da != dc {
        return Err(Error::dims("correction derivation (A vs C)", da, dc));
    }
    basis
        .vectors()
        .iter()
        .map(|psi_i| {
            let t = teleport_map(psi_bc, psi_i)?;
            let gram = t.adjoint() * &t;
            let c = gram.trace().re / da as f64;
            let residual = linalg::max_abs_diff(&gram, &linalg::identity(da).scale(c));
            if c <= RANK_TOL || residual > TOL_EQ {
                return Err(Error::InvalidArgument(format!(
                    "teleport map is not proportional to a unitary (residual {residual:e})"
                )));
            }
            Ok(t.adjoint().unscale(c.sqrt()))
        })
        .collect()
}

/// Draws `samples` outcome indices from the outcome distribution of a report.
pub fn sample_outcomes<R: Rng + ?Sized>(report: &ProtocolReport, samples: usize, rng: &mut R) -> Vec<usize> {
    let total = report.total_probability();
    (0..samples)
        .map(|_| {
            let mut u = rng.random::<f64>() * total;
            for o in &report.outcomes {
                if u < o.probability {
                    return o.index;
                }
                u -= o.probability;
            }
            report.outcomes.last().map(|o| o.index).unwrap_or(0)
        })
        .collect()
}

/// One CSV row of a Werner-ancilla sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub p: f64,
    pub outcome: usize,
    pub probability: f64,
    pub trace_norm: f64,
    pub sqrt_fidelity: f64,
    pub corrected_fidelity: f64,
}

/// Teleports `input` through Werner ancillas with the Bell basis and the
/// Pauli corrections derived for the noiseless Bell ancilla.
pub fn werner_sweep(ps: &[f64], input: &PureState) -> Result<Vec<SweepRow>> {
    let basis = states::bell_basis();
    let corrections = derive_corrections(&states::bell_state(0)?, &basis)?;
    let omega = input.density()?;
    let mut rows = Vec::with_capacity(ps.len() * basis.len());
    for &p in ps {
        let ancilla = Ancilla::Mixed(states::werner(p)?);
        let report = run_protocol(&omega, &ancilla, &basis, Some(&corrections))?;
        for o in report.outcomes {
            rows.push(SweepRow {
                p,
                outcome: o.index,
                probability: o.probability,
                trace_norm: o.trace_norm,
                sqrt_fidelity: o.sqrt_fidelity,
                corrected_fidelity: o.fidelity.unwrap_or(0.0),
            });
        }
    }
    Ok(rows)
}
