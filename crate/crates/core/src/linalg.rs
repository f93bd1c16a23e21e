//! Dense complex linear algebra used by every other module.
//!
//! Composite indices are row-major everywhere: the basis vector
//! `|a⟩ ⊗ |b⟩` of `C^dA ⊗ C^dB` sits at index `a * dB + b`, and likewise
//! `a * dB * dC + b * dC + c` for three factors. [`tensor`] is the only place
//! that builds composite objects and it follows this convention.

use nalgebra::storage::Storage;
use nalgebra::{DMatrix, DVector, Dim, Matrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::{TOL_HERM, TOL_PSD};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;
pub type ComplexMatrix = DMatrix<c64>;
pub type ComplexVector = DVector<c64>;

pub const ZERO: c64 = c64::new(0.0, 0.0);
pub const ONE: c64 = c64::new(1.0, 0.0);
pub const I: c64 = c64::new(0.0, 1.0);

/// Real scalar as a complex number.
#[inline]
pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Computational basis vector `|k⟩` of `C^d`.
pub fn basis_vector(d: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[k] = ONE;
    v
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&x| re(x)),
    ))
}

/// Kronecker product `a ⊗ b` under the row-major composite convention.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// `|v⟩⟨w|`
pub fn outer(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    v * w.adjoint()
}

pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    outer(v, v)
}

pub fn trace(m: &ComplexMatrix) -> c64 {
    m.trace()
}

/// Largest elementwise modulus of `a - b`; infinite when the shapes differ.
pub fn max_abs_diff<R, C, S1, S2>(a: &Matrix<c64, R, C, S1>, b: &Matrix<c64, R, C, S2>) -> f64
where
    R: Dim,
    C: Dim,
    S1: Storage<c64, R, C>,
    S2: Storage<c64, R, C>,
{
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(m: &ComplexMatrix, context: &'static str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

pub(crate) fn ensure_square(m: &ComplexMatrix, context: &'static str) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::dims(
            context,
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ))
    }
}

/// Elementwise deviation from Hermiticity, relative to `max(1, max |m_ij|)`.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let scale = max_abs(m).max(1.0);
    max_abs_diff(m, &m.adjoint()) / scale
}

pub fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation <= TOL_HERM {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation })
    }
}

/// `‖U†U − 1‖_max`, infinite for non-square input.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(m + m†)/2` first. Eigenvalues come back in
/// descending order with eigenvectors as the matching columns.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigendecomposition of a PSD matrix.
///
/// Eigenvalues below the solver's noise floor `64·n·ε·λ_max` are set to zero;
/// without this a rank-one input picks up a spurious `√ε`-sized square root.
fn psd_spectrum(p: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = ensure_square(p, "psd spectrum")?;
    ensure_hermitian(p)?;
    let (values, vectors) = eigh(p);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -TOL_PSD {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let floor = 64.0 * n as f64 * f64::EPSILON * max;
    Ok((values.into_iter().map(|x| if x > floor { x } else { 0.0 }).collect(), vectors))
}

/// `V f(Λ) V†` for a Hermitian matrix given by its spectrum.
fn spectral_function(values: &[f64], vectors: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(f(v));
    }
    scaled * vectors.adjoint()
}

/// Positive square root of a Hermitian PSD matrix.
pub fn matrix_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = psd_spectrum(p)?;
    Ok(spectral_function(&values, &vectors, f64::sqrt))
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix; eigenvalues at or
/// below `cutoff` are treated as zero.
pub fn pinv_psd(p: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = psd_spectrum(p)?;
    Ok(spectral_function(&values, &vectors, |x| {
        if x > cutoff {
            1.0 / x
        } else {
            0.0
        }
    }))
}

/// Pseudo-inverse of the square root of a PSD matrix, restricted to eigenvalues above `cutoff`.
pub fn pinv_sqrt_psd(p: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = psd_spectrum(p)?;
    Ok(spectral_function(&values, &vectors, |x| {
        if x > cutoff {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    }))
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(p: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = psd_spectrum(p)?;
    Ok(spectral_function(&values, &vectors, |x| {
        if x > cutoff {
            1.0
        } else {
            0.0
        }
    }))
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Thin SVD `m = U diag(σ) V†` with σ descending; `U` is `r×…`, r = min(rows, cols).
pub fn svd(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let s = m.clone().svd(true, true);
    let u = s.u.expect("left singular vectors requested");
    let v_t = s.v_t.expect("right singular vectors requested");
    let r = s.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| s.singular_values[j].total_cmp(&s.singular_values[i]));
    let mut u_sorted = ComplexMatrix::zeros(u.nrows(), r);
    let mut v_sorted = ComplexMatrix::zeros(v_t.ncols(), r);
    let mut sigma = Vec::with_capacity(r);
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_column(dst, &v_t.row(src).adjoint());
        sigma.push(s.singular_values[src]);
    }
    (u_sorted, sigma, v_sorted)
}

/// Sum of singular values, `Tr √(M†M)`.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Uhlmann fidelity `(Tr √(√ρ1 ρ2 √ρ1))²` of two PSD matrices.
///
/// Evaluated as the squared trace norm of `√ρ2 √ρ1`, whose singular values are
/// the square roots of the eigenvalues of `√ρ1 ρ2 √ρ1`.
pub fn fidelity_psd(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<f64> {
    if rho1.shape() != rho2.shape() {
        return Err(Error::dims(
            "fidelity",
            format!("{:?}", rho1.shape()),
            format!("{:?}", rho2.shape()),
        ));
    }
    let s1 = matrix_sqrt(rho1)?;
    let s2 = matrix_sqrt(rho2)?;
    let root_fidelity = trace_norm(&(s2 * s1));
    Ok(root_fidelity * root_fidelity)
}

/// Partial trace keeping factor `keep` of a composite operator with factor dimensions `dims`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid factor dims {dims:?}")));
    }
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::dims(
            "partial trace",
            format!("{total}x{total}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if keep >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: keep,
            len: dims.len(),
        });
    }
    let dk = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer_dim: usize = dims[..keep].iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for o in 0..outer_dim {
                for n in 0..inner {
                    let row = (o * dk + i) * inner + n;
                    let col = (o * dk + j) * inner + n;
                    acc += m[(row, col)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Permutation matrix mapping `C^dA ⊗ C^dB` onto `C^dB ⊗ C^dA`, `|a⟩|b⟩ ↦ |b⟩|a⟩`.
pub fn swap_matrix(d_a: usize, d_b: usize) -> ComplexMatrix {
    let n = d_a * d_b;
    let mut p = ComplexMatrix::zeros(n, n);
    for a in 0..d_a {
        for b in 0..d_b {
            p[(b * d_a + a, a * d_b + b)] = ONE;
        }
    }
    p
}

/// Orthonormal basis of `C^dim` whose leading columns span the given vectors.
///
/// Runs modified Gram–Schmidt twice over `vectors` followed by the
/// computational basis, dropping anything already in the span.
pub fn complete_orthonormal(vectors: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(dim);
    let candidates = vectors
        .column_iter()
        .map(|c| c.into_owned())
        .chain((0..dim).map(|k| basis_vector(dim, k)));
    for mut v in candidates {
        if basis.len() == dim {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / re(norm));
        }
    }
    ComplexMatrix::from_columns(&basis)
}
