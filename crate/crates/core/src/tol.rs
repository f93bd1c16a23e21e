//! Numerical tolerances shared by every module.
//!
//! All values assume double precision at factor dimensions up to ~16.

/// Unit-norm and unit-trace checks.
pub const TOL_NORM: f64 = 1e-9;
/// Hermiticity, measured elementwise relative to `max(1, max |entry|)`.
pub const TOL_HERM: f64 = 1e-10;
/// Most negative eigenvalue still accepted as zero in a PSD matrix.
pub const TOL_PSD: f64 = 1e-9;
/// Equality of computed matrices (max elementwise deviation).
pub const TOL_EQ: f64 = 1e-9;
/// Schmidt coefficients and eigenvalues at or below this are outside the support.
pub const RANK_TOL: f64 = 1e-9;
