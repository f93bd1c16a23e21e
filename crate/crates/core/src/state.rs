//! Pure states and density operators on one, two or three tensor factors.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, ensure_finite, ensure_hermitian, ensure_square, ComplexMatrix, ComplexVector,
};
use crate::tol::{TOL_NORM, TOL_PSD};

/// A vector on a tensor product of labeled factors.
///
/// Normalized unless built through [`PureState::unnormalized`], which is
/// reserved for post-measurement vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    factor_dims: Vec<usize>,
    amplitudes: ComplexVector,
    normalized: bool,
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.len() > 3 || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "factor dims must be 1 to 3 positive counts, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

impl PureState {
    pub fn new(factor_dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        let state = Self::unnormalized(factor_dims, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            normalized: true,
            ..state
        })
    }

    pub fn unnormalized(factor_dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        let total = check_dims(&factor_dims)?;
        if amplitudes.len() != total {
            return Err(Error::dims("pure state", total, amplitudes.len()));
        }
        ensure_finite(&ComplexMatrix::from_column_slice(total, 1, amplitudes.as_slice()), "pure state")?;
        Ok(Self {
            factor_dims,
            amplitudes,
            normalized: false,
        })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(factor_dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(factor_dims, amplitudes / linalg::re(norm))
    }

    /// Single-factor state of dimension `amplitudes.len()`.
    pub fn single(amplitudes: ComplexVector) -> Result<Self> {
        Self::new(vec![amplitudes.len()], amplitudes)
    }

    /// Bipartite state `Σ C[a][b] |a⟩⊗|b⟩` from its `dA×dB` coefficient matrix.
    pub fn from_coefficients(c: &ComplexMatrix) -> Result<Self> {
        let (da, db) = c.shape();
        let amps = ComplexVector::from_iterator(
            da * db,
            (0..da).flat_map(|a| (0..db).map(move |b| (a, b))).map(|(a, b)| c[(a, b)]),
        );
        Self::new(vec![da, db], amps)
    }

    /// Product state `a ⊗ b ⊗ …` of single-factor states.
    pub fn product(parts: &[&PureState]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut amps = ComplexVector::from_element(1, linalg::ONE);
        for p in parts {
            dims.extend_from_slice(&p.factor_dims);
            amps = linalg::tensor_vec(&amps, &p.amplitudes);
        }
        Self::new(dims, amps)
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn arity(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &PureState) -> Result<c64> {
        if self.factor_dims != other.factor_dims {
            return Err(Error::dims(
                "inner product",
                format!("{:?}", self.factor_dims),
                format!("{:?}", other.factor_dims),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `(dA, dB)` for a bipartite state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.factor_dims.as_slice() {
            &[a, b] => Ok((a, b)),
            dims => Err(Error::WrongArity {
                expected: 2,
                found: dims.len(),
            }),
        }
    }

    /// Coefficient matrix `C[a][b] = ψ[a·dB + b]` of a bipartite state.
    pub fn coefficients(&self) -> Result<ComplexMatrix> {
        let (da, db) = self.bipartite_dims()?;
        Ok(ComplexMatrix::from_fn(da, db, |a, b| self.amplitudes[a * db + b]))
    }

    pub fn projector(&self) -> ComplexMatrix {
        linalg::projector(&self.amplitudes)
    }

    pub fn density(&self) -> Result<DensityOperator> {
        if self.normalized {
            DensityOperator::new(self.factor_dims.clone(), self.projector())
        } else {
            DensityOperator::subnormalized(self.factor_dims.clone(), self.projector())
        }
    }
}

/// Positive semidefinite operator of unit trace (or trace ≤ 1 when subnormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    factor_dims: Vec<usize>,
    matrix: ComplexMatrix,
    subnormalized: bool,
}

impl DensityOperator {
    pub fn new(factor_dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::validated(factor_dims, matrix, false)?;
        let trace = rho.trace();
        if (trace - 1.0).abs() > TOL_NORM {
            return Err(Error::NotDensity { trace });
        }
        Ok(rho)
    }

    /// Post-measurement operators: PSD with trace at most one.
    pub fn subnormalized(factor_dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::validated(factor_dims, matrix, true)?;
        let trace = rho.trace();
        if trace > 1.0 + TOL_NORM {
            return Err(Error::NotDensity { trace });
        }
        Ok(rho)
    }

    /// Single-factor density operator.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(vec![matrix.nrows()], matrix)
    }

    fn validated(factor_dims: Vec<usize>, matrix: ComplexMatrix, subnormalized: bool) -> Result<Self> {
        let total = check_dims(&factor_dims)?;
        let n = ensure_square(&matrix, "density operator")?;
        if n != total {
            return Err(Error::dims("density operator", total, n));
        }
        ensure_finite(&matrix, "density operator")?;
        ensure_hermitian(&matrix)?;
        let (values, _) = linalg::eigh(&matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            factor_dims,
            matrix,
            subnormalized,
        })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Reduced operator on factor `keep`; inherits the subnormalized flag.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityOperator> {
        let reduced = linalg::partial_trace(&self.matrix, &self.factor_dims, keep)?;
        let dims = vec![self.factor_dims[keep]];
        if self.subnormalized {
            Self::subnormalized(dims, reduced)
        } else {
            Self::new(dims, reduced)
        }
    }

    /// Reinterprets the same matrix with another factorization of its dimension.
    pub fn with_factor_dims(self, factor_dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&factor_dims)?;
        if total != self.dim() {
            return Err(Error::dims("density factorization", self.dim(), total));
        }
        Ok(Self {
            factor_dims,
            ..self
        })
    }

    /// Swaps the two factors of a bipartite operator.
    pub fn swapped(&self) -> Result<DensityOperator> {
        let (da, db) = match self.factor_dims.as_slice() {
            &[a, b] => (a, b),
            dims => {
                return Err(Error::WrongArity {
                    expected: 2,
                    found: dims.len(),
                })
            }
        };
        let p = linalg::swap_matrix(da, db);
        let m = &p * &self.matrix * p.adjoint();
        Ok(Self {
            factor_dims: vec![db, da],
            matrix: m,
            subnormalized: self.subnormalized,
        })
    }
}

/// Uhlmann fidelity of two density operators of equal dimension.
pub fn fidelity(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::dims("fidelity", rho1.dim(), rho2.dim()));
    }
    linalg::fidelity_psd(rho1.matrix(), rho2.matrix())
}
