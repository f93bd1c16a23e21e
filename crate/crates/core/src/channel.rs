//! EPR channel maps of bipartite density operators.
//!
//! Every decomposition `ρ = Σ |ψ_i⟩⟨ψ_i|` gives a family of s-maps `s_i`, and
//! the channel `Φ(ω) = Σ s_i ω s_i*` depends on `ρ` alone. It reproduces the
//! Lüders update: `(π⊗1) ρ (π⊗1) = π ⊗ Φ(π)` for every rank-one projector `π`.

use crate::antilinear::{self, AntilinearMap};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::smap::{self, Direction};
use crate::state::{DensityOperator, PureState};
use crate::tol::{RANK_TOL, TOL_EQ, TOL_NORM};

/// Antilinear Kraus family `{s_i}` of an EPR channel map.
#[derive(Debug, Clone)]
pub struct ChannelMap {
    src_dim: usize,
    dst_dim: usize,
    kraus: Vec<AntilinearMap>,
    origin: Option<DensityOperator>,
}

impl ChannelMap {
    /// Builds a channel from an explicit antilinear Kraus family.
    pub fn from_kraus(src_dim: usize, dst_dim: usize, kraus: Vec<AntilinearMap>) -> Result<Self> {
        for k in &kraus {
            if k.src_dim() != src_dim || k.dst_dim() != dst_dim {
                return Err(Error::dims(
                    "channel Kraus family",
                    format!("{dst_dim}x{src_dim}"),
                    format!("{}x{}", k.dst_dim(), k.src_dim()),
                ));
            }
        }
        Ok(Self {
            src_dim,
            dst_dim,
            kraus,
            origin: None,
        })
    }

    pub fn src_dim(&self) -> usize {
        self.src_dim
    }

    pub fn dst_dim(&self) -> usize {
        self.dst_dim
    }

    pub fn kraus(&self) -> &[AntilinearMap] {
        &self.kraus
    }

    pub fn origin(&self) -> Option<&DensityOperator> {
        self.origin.as_ref()
    }

    /// `Φ(ω) = Σ_i s_i ∘ ω ∘ s_i*`, i.e. `Σ_i K_i conj(ω) K_i†`.
    ///
    /// Any square matrix is accepted; terms are summed in Kraus order.
    pub fn apply(&self, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
        if omega.shape() != (self.src_dim, self.src_dim) {
            return Err(Error::dims(
                "channel input",
                format!("{0}x{0}", self.src_dim),
                format!("{}x{}", omega.nrows(), omega.ncols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.dst_dim, self.dst_dim);
        for s in &self.kraus {
            out += antilinear::sandwich(s, omega, &s.adjoint())?;
        }
        Ok(out)
    }

    /// Dual map on observables: the `X` with `Tr(πX) = Tr(Φ(π)Y)` for every rank-one `π`.
    ///
    /// `X = Σ_i s_i* ∘ Y* ∘ s_i`, which reduces to `Σ_i s_i* ∘ Y ∘ s_i` for Hermitian `Y`.
    pub fn dual(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.shape() != (self.dst_dim, self.dst_dim) {
            return Err(Error::dims(
                "dual channel input",
                format!("{0}x{0}", self.dst_dim),
                format!("{}x{}", y.nrows(), y.ncols()),
            ));
        }
        let y_adj = y.adjoint();
        let mut out = ComplexMatrix::zeros(self.src_dim, self.src_dim);
        for s in &self.kraus {
            out += antilinear::sandwich(&s.adjoint(), &y_adj, s)?;
        }
        Ok(out)
    }

    /// Choi matrix `Σ_{jk} |j⟩⟨k| ⊗ Φ(conj |j⟩⟨k|)` of the conjugated map.
    pub fn conjugated_choi(&self) -> ComplexMatrix {
        let d = self.src_dim;
        let mut choi = ComplexMatrix::zeros(d * self.dst_dim, d * self.dst_dim);
        for j in 0..d {
            for k in 0..d {
                let unit = linalg::outer(&linalg::basis_vector(d, j), &linalg::basis_vector(d, k));
                let image = self
                    .apply(&unit.conjugate())
                    .expect("matrix unit has channel input shape");
                choi += linalg::tensor(&unit, &image);
            }
        }
        choi
    }
}

fn bipartite(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.factor_dims() {
        &[a, b] => Ok((a, b)),
        dims => Err(Error::WrongArity {
            expected: 2,
            found: dims.len(),
        }),
    }
}

/// Eigenvalue-weighted vectors `√λ_i v_i` with `λ_i > RANK_TOL`.
pub fn canonical_decomposition(rho: &DensityOperator) -> Vec<ComplexVector> {
    let (values, vectors) = linalg::eigh(rho.matrix());
    values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(i, &l)| vectors.column(i) * linalg::re(l.sqrt()))
        .collect()
}

/// Channel from an arbitrary decomposition `ρ = Σ |ψ_i⟩⟨ψ_i|` (no check that it sums to anything).
pub fn channel_from_vectors(
    dims: (usize, usize),
    vectors: &[ComplexVector],
    direction: Direction,
) -> Result<ChannelMap> {
    let (da, db) = dims;
    let kraus = vectors
        .iter()
        .map(|v| smap::smap(&PureState::unnormalized(vec![da, db], v.clone())?, direction))
        .collect::<Result<Vec<_>>>()?;
    let (src, dst) = match direction {
        Direction::BA => (da, db),
        Direction::AB => (db, da),
    };
    ChannelMap::from_kraus(src, dst, kraus)
}

/// EPR channel map of `ρ^{AB}` built from its eigendecomposition.
///
/// `Direction::BA` transports operators from A to B, `Direction::AB` the reverse.
pub fn channel_from_density(rho: &DensityOperator, direction: Direction) -> Result<ChannelMap> {
    let dims = bipartite(rho)?;
    let mut channel = channel_from_vectors(dims, &canonical_decomposition(rho), direction)?;
    channel.origin = Some(rho.clone());
    Ok(channel)
}

/// Lüders update of a bipartite state after Alice confirms `|φ⟩⟨φ|`.
#[derive(Debug, Clone)]
pub struct LuedersUpdate {
    pub probability: f64,
    /// `(π⊗1) ρ (π⊗1)`, trace equal to `probability`.
    pub post_state: DensityOperator,
    /// `‖(π⊗1)ρ(π⊗1) − π ⊗ Φ(π)‖_max`
    pub factorization_residual: f64,
}

pub fn lueders_update(rho: &DensityOperator, phi_a: &ComplexVector) -> Result<LuedersUpdate> {
    let (da, db) = bipartite(rho)?;
    if phi_a.len() != da {
        return Err(Error::dims("measurement vector", da, phi_a.len()));
    }
    let norm = phi_a.norm();
    if (norm - 1.0).abs() > TOL_NORM {
        return Err(Error::NotNormalized { norm });
    }
    let pi = linalg::projector(phi_a);
    let lifted = linalg::tensor(&pi, &linalg::identity(db));
    let post = &lifted * rho.matrix() * &lifted;
    let probability = post.trace().re;

    let phi_channel = channel_from_density(rho, Direction::BA)?;
    let factorized = linalg::tensor(&pi, &phi_channel.apply(&pi)?);
    let factorization_residual = linalg::max_abs_diff(&post, &factorized);

    Ok(LuedersUpdate {
        probability,
        post_state: DensityOperator::subnormalized(vec![da, db], post)?,
        factorization_residual,
    })
}

/// Agreement between two channels on the spanning set of matrix units `|j⟩⟨k|`.
pub fn max_channel_deviation(a: &ChannelMap, b: &ChannelMap) -> Result<f64> {
    if a.src_dim() != b.src_dim() || a.dst_dim() != b.dst_dim() {
        return Err(Error::dims(
            "channel comparison",
            format!("{}->{}", a.src_dim(), a.dst_dim()),
            format!("{}->{}", b.src_dim(), b.dst_dim()),
        ));
    }
    let d = a.src_dim();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for k in 0..d {
            let unit = linalg::outer(&linalg::basis_vector(d, j), &linalg::basis_vector(d, k));
            worst = worst.max(linalg::max_abs_diff(&a.apply(&unit)?, &b.apply(&unit)?));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct DecompositionReport {
    /// `‖Σ|ψ'_i⟩⟨ψ'_i| − ρ‖_max`
    pub sum_residual: f64,
    /// Largest output deviation over all matrix units.
    pub max_deviation: f64,
}

impl DecompositionReport {
    pub fn agrees(&self) -> bool {
        self.max_deviation < TOL_EQ
    }
}

/// Compares the channel of an alternative decomposition with the canonical one.
pub fn channel_decomposition_independence(
    rho: &DensityOperator,
    alternative: &[ComplexVector],
) -> Result<DecompositionReport> {
    let dims = bipartite(rho)?;
    let mut sum = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for v in alternative {
        if v.len() != rho.dim() {
            return Err(Error::dims("decomposition vector", rho.dim(), v.len()));
        }
        sum += linalg::projector(v);
    }
    let sum_residual = linalg::max_abs_diff(&sum, rho.matrix());
    if sum_residual > TOL_EQ {
        return Err(Error::DecompositionMismatch {
            residual: sum_residual,
        });
    }
    let canonical = channel_from_density(rho, Direction::BA)?;
    let alt = channel_from_vectors(dims, alternative, Direction::BA)?;
    Ok(DecompositionReport {
        sum_residual,
        max_deviation: max_channel_deviation(&canonical, &alt)?,
    })
}
