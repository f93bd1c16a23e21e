//! Fixture states and seeded random generators.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `SeedableRng::seed_from_u64`; complex Gaussians use `rand_distr::StandardNormal`
//! for the real and imaginary parts. The same seed reproduces the same stream
//! on every platform and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, ComplexMatrix, ComplexVector};
use crate::state::{DensityOperator, PureState};
use crate::teleport::MeasurementBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0)
    }

    /// Independent stream for sub-task `index`.
    pub fn derive(self, index: u64) -> Seed {
        // splitmix64 finalizer
        let mut z = self.0 ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}

/// The four Bell states in the order `(|00⟩+|11⟩)`, `(|00⟩−|11⟩)`, `(|01⟩+|10⟩)`, `(|01⟩−|10⟩)`, each over √2.
pub fn bell_state(k: usize) -> Result<PureState> {
    let h = 1.0 / 2f64.sqrt();
    let amps = match k {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        3 => [0.0, h, -h, 0.0],
        _ => return Err(Error::IndexOutOfRange { index: k, len: 4 }),
    };
    PureState::new(vec![2, 2], ComplexVector::from_iterator(4, amps.iter().map(|&x| re(x))))
}

pub fn bell_basis() -> MeasurementBasis {
    let vectors = (0..4).map(|k| bell_state(k).expect("k < 4")).collect();
    MeasurementBasis::new(vectors).expect("Bell states form an orthonormal basis")
}

/// `p |Bell₀⟩⟨Bell₀| + (1 − p) 1/4` for `p ∈ [0, 1]`.
pub fn werner(p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("Werner parameter {p} outside [0, 1]")));
    }
    let bell = bell_state(0)?.projector();
    let m = bell.scale(p) + linalg::identity(4).scale((1.0 - p) / 4.0);
    DensityOperator::new(vec![2, 2], m)
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    c64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // fill row by row so the stream order matches the row-major layout
    let entries: Vec<c64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::from_row_slice(rows, cols, &entries)
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_iterator(d, (0..d).map(|_| complex_gaussian(rng)));
    let n = v.norm();
    v / re(n)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { linalg::ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Uniformly random pure state on the given factors.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let total = dims.iter().product();
    PureState::new(dims.to_vec(), random_unit_vector(total, rng))
}

/// Random density operator `G G† / Tr(G G†)` with `G` a `d×rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!("rank {rank} outside 1..={d}")));
    }
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    let m = m.unscale(t);
    // enforce exact Hermiticity after scaling
    let m = (&m + m.adjoint()).scale(0.5);
    DensityOperator::new(dims.to_vec(), m)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}
