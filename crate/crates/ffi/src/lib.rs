//! C ABI for eprkit.
//!
//! Objects live behind opaque handles that the caller frees with the
//! matching `*_free`. Complex arrays are interleaved `re, im` doubles in
//! row-major order, and every length is counted in complex entries.
//!
//! Functions return an [`EprkitStatus`]. On failure the message is kept per
//! thread and read back with [`eprkit_last_error_message`]. Functions that
//! fill a caller buffer always write the required length first, so a call
//! with capacity 0 can be used to size the buffer.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use eprkit::antilinear::AntilinearMap;
use eprkit::channel::{self, ChannelMap};
use eprkit::linalg::{self, c64, ComplexMatrix, ComplexVector};
use eprkit::smap::{self, Direction};
use eprkit::teleport;
use eprkit::{DensityOperator, Error, PureState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvariantViolation = 4,
    BufferTooSmall = 5,
    Panic = 6,
    Internal = 7,
}

/// Which factor an s-map or channel maps into.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprkitDirection {
    /// From the first factor to the second.
    Ba = 0,
    /// From the second factor to the first.
    Ab = 1,
}

impl From<EprkitDirection> for Direction {
    fn from(d: EprkitDirection) -> Self {
        match d {
            EprkitDirection::Ba => Direction::BA,
            EprkitDirection::Ab => Direction::AB,
        }
    }
}

/// Normalized pure state on a tensor product.
pub struct EprkitState {
    inner: PureState,
}

/// Density operator on a tensor product.
pub struct EprkitDensity {
    inner: DensityOperator,
}

/// Antilinear map, stored as `K` with `s(φ) = K conj(φ)`.
pub struct EprkitAntilinear {
    inner: AntilinearMap,
}

/// Channel map built from a bipartite density operator.
pub struct EprkitChannel {
    inner: ChannelMap,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

/// Message for the last failed call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eprkit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

struct Failure(EprkitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DimensionMismatch { .. } => EprkitStatus::DimensionMismatch,
            Error::InvalidArgument(_) | Error::WrongArity { .. } | Error::IndexOutOfRange { .. } => {
                EprkitStatus::InvalidArgument
            }
            Error::Io(_) | Error::Parse { .. } | Error::SchemaVersion { .. } => EprkitStatus::Internal,
            _ => EprkitStatus::InvariantViolation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EprkitStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EprkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EprkitStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside eprkit".into());
            EprkitStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_complex(data: *const f64, len: usize) -> Result<Vec<c64>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(null("data"));
    }
    let raw = slice::from_raw_parts(data, 2 * len);
    Ok(raw.chunks_exact(2).map(|p| c64::new(p[0], p[1])).collect())
}

unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize) -> Result<ComplexMatrix, Failure> {
    let entries = read_complex(data, rows * cols)?;
    Ok(ComplexMatrix::from_row_slice(rows, cols, &entries))
}

unsafe fn read_dims(dims: *const usize, ndims: usize) -> Result<Vec<usize>, Failure> {
    if ndims == 0 {
        return Err(Failure(EprkitStatus::InvalidArgument, "at least one factor is required".into()));
    }
    if dims.is_null() {
        return Err(null("dims"));
    }
    Ok(slice::from_raw_parts(dims, ndims).to_vec())
}

/// Write `values` to `out`, reporting the required length through `out_len`.
unsafe fn write_complex(
    values: impl ExactSizeIterator<Item = c64>,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> Result<(), Failure> {
    let n = values.len();
    if !out_len.is_null() {
        *out_len = n;
    }
    if n > capacity {
        return Err(Failure(EprkitStatus::BufferTooSmall, format!("buffer holds {capacity} entries, {n} needed")));
    }
    if n > 0 && out.is_null() {
        return Err(null("out"));
    }
    for (k, z) in values.enumerate() {
        *out.add(2 * k) = z.re;
        *out.add(2 * k + 1) = z.im;
    }
    Ok(())
}

unsafe fn write_matrix(m: &ComplexMatrix, out: *mut f64, capacity: usize, out_len: *mut usize) -> Result<(), Failure> {
    let (rows, cols) = m.shape();
    write_complex((0..rows * cols).map(|k| m[(k / cols, k % cols)]), out, capacity, out_len)
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Create a pure state from `dim` amplitudes on factors `dims[0..ndims]`.
///
/// # Safety
/// `dims` must point to `ndims` values and `data` to `2 * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_state_new(
    dims: *const usize,
    ndims: usize,
    data: *const f64,
    dim: usize,
    out: *mut *mut EprkitState,
) -> EprkitStatus {
    guard(|| {
        let dims = read_dims(dims, ndims)?;
        let amplitudes = ComplexVector::from_vec(read_complex(data, dim)?);
        store(out, EprkitState { inner: PureState::new(dims, amplitudes)? })
    })
}

/// # Safety
/// `state` must come from `eprkit_state_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eprkit_state_free(state: *mut EprkitState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Total dimension of a state.
///
/// # Safety
/// `state` must be a live handle and `out_dim` writable.
#[no_mangle]
pub unsafe extern "C" fn eprkit_state_dim(state: *const EprkitState, out_dim: *mut usize) -> EprkitStatus {
    guard(|| {
        let state = handle(state, "state")?;
        if out_dim.is_null() {
            return Err(null("out_dim"));
        }
        *out_dim = state.inner.dim();
        Ok(())
    })
}

/// Schmidt weights of a bipartite state, in descending order.
///
/// # Safety
/// `state` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_schmidt_coefficients(
    state: *const EprkitState,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let state = handle(state, "state")?;
        let weights = smap::schmidt(&state.inner)?.coefficients;
        if !out_len.is_null() {
            *out_len = weights.len();
        }
        if weights.len() > capacity {
            return Err(Failure(EprkitStatus::BufferTooSmall, format!("{} weights, capacity {capacity}", weights.len())));
        }
        if !weights.is_empty() && out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(weights.as_ptr(), out, weights.len());
        Ok(())
    })
}

/// Create a density operator from a `dim × dim` matrix on factors `dims`.
///
/// # Safety
/// `dims` must point to `ndims` values and `data` to `2 * dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_density_new(
    dims: *const usize,
    ndims: usize,
    data: *const f64,
    dim: usize,
    out: *mut *mut EprkitDensity,
) -> EprkitStatus {
    guard(|| {
        let dims = read_dims(dims, ndims)?;
        let m = read_matrix(data, dim, dim)?;
        store(out, EprkitDensity { inner: DensityOperator::new(dims, m)? })
    })
}

/// Density operator `|ψ⟩⟨ψ|` of a pure state.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eprkit_density_from_state(
    state: *const EprkitState,
    out: *mut *mut EprkitDensity,
) -> EprkitStatus {
    guard(|| {
        let state = handle(state, "state")?;
        store(out, EprkitDensity { inner: state.inner.density()? })
    })
}

/// # Safety
/// `density` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eprkit_density_free(density: *mut EprkitDensity) {
    if !density.is_null() {
        drop(Box::from_raw(density));
    }
}

/// s-map of a bipartite state.
///
/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eprkit_smap(
    state: *const EprkitState,
    direction: EprkitDirection,
    out: *mut *mut EprkitAntilinear,
) -> EprkitStatus {
    guard(|| {
        let state = handle(state, "state")?;
        store(out, EprkitAntilinear { inner: smap::smap(&state.inner, direction.into())? })
    })
}

/// # Safety
/// `map` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eprkit_antilinear_free(map: *mut EprkitAntilinear) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Target and source dimensions of an antilinear map.
///
/// # Safety
/// `map` must be a live handle and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn eprkit_antilinear_dims(
    map: *const EprkitAntilinear,
    out_dst: *mut usize,
    out_src: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let map = handle(map, "map")?;
        if out_dst.is_null() || out_src.is_null() {
            return Err(null("output dimension"));
        }
        *out_dst = map.inner.dst_dim();
        *out_src = map.inner.src_dim();
        Ok(())
    })
}

/// The matrix `K` of an antilinear map, `dst × src`.
///
/// # Safety
/// `map` must be a live handle and `out` must hold `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_antilinear_kmatrix(
    map: *const EprkitAntilinear,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> EprkitStatus {
    guard(|| write_matrix(handle(map, "map")?.inner.kmatrix(), out, capacity, out_len))
}

/// Apply an antilinear map to a vector of length `src`.
///
/// # Safety
/// `map` must be a live handle, `data` must hold `2 * len` doubles and `out`
/// `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_antilinear_apply(
    map: *const EprkitAntilinear,
    data: *const f64,
    len: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let map = handle(map, "map")?;
        let v = ComplexVector::from_vec(read_complex(data, len)?);
        let image = map.inner.apply(&v)?;
        write_complex(image.iter().copied(), out, capacity, out_len)
    })
}

/// Channel map of a bipartite density operator.
///
/// # Safety
/// `density` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eprkit_channel_from_density(
    density: *const EprkitDensity,
    direction: EprkitDirection,
    out: *mut *mut EprkitChannel,
) -> EprkitStatus {
    guard(|| {
        let density = handle(density, "density")?;
        store(out, EprkitChannel { inner: channel::channel_from_density(&density.inner, direction.into())? })
    })
}

/// # Safety
/// `channel` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn eprkit_channel_free(channel: *mut EprkitChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Input and output dimensions of a channel.
///
/// # Safety
/// `channel` must be a live handle and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn eprkit_channel_dims(
    channel: *const EprkitChannel,
    out_src: *mut usize,
    out_dst: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let channel = handle(channel, "channel")?;
        if out_src.is_null() || out_dst.is_null() {
            return Err(null("output dimension"));
        }
        *out_src = channel.inner.src_dim();
        *out_dst = channel.inner.dst_dim();
        Ok(())
    })
}

/// Apply a channel to a `src × src` operator, giving a `dst × dst` one.
///
/// # Safety
/// `channel` must be a live handle, `data` must hold `2 * dim * dim` doubles
/// and `out` `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn eprkit_channel_apply(
    channel: *const EprkitChannel,
    data: *const f64,
    dim: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let channel = handle(channel, "channel")?;
        let omega = read_matrix(data, dim, dim)?;
        write_matrix(&channel.inner.apply(&omega)?, out, capacity, out_len)
    })
}

/// Apply the dual of a channel to a `dst × dst` operator.
///
/// # Safety
/// Same contract as [`eprkit_channel_apply`], with the dimensions swapped.
#[no_mangle]
pub unsafe extern "C" fn eprkit_channel_dual(
    channel: *const EprkitChannel,
    data: *const f64,
    dim: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let channel = handle(channel, "channel")?;
        let y = read_matrix(data, dim, dim)?;
        write_matrix(&channel.inner.dual(&y)?, out, capacity, out_len)
    })
}

/// Teleportation map `t: A → C` for ancilla `ψ_BC` and outcome vector `ψ_AB`.
///
/// The result is `dC × dA`, reported through `out_rows` and `out_cols`.
///
/// # Safety
/// Both states must be live handles and `out` must hold `2 * capacity`
/// doubles; the shape outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn eprkit_teleport_map(
    psi_bc: *const EprkitState,
    psi_ab: *const EprkitState,
    out: *mut f64,
    capacity: usize,
    out_rows: *mut usize,
    out_cols: *mut usize,
) -> EprkitStatus {
    guard(|| {
        let psi_bc = handle(psi_bc, "psi_bc")?;
        let psi_ab = handle(psi_ab, "psi_ab")?;
        let t = teleport::teleport_map(&psi_bc.inner, &psi_ab.inner)?;
        if !out_rows.is_null() {
            *out_rows = t.nrows();
        }
        if !out_cols.is_null() {
            *out_cols = t.ncols();
        }
        write_matrix(&t, out, capacity, ptr::null_mut())
    })
}

/// Sum of singular values of a `rows × cols` matrix.
///
/// # Safety
/// `data` must hold `2 * rows * cols` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn eprkit_trace_norm(data: *const f64, rows: usize, cols: usize, out: *mut f64) -> EprkitStatus {
    guard(|| {
        let m = read_matrix(data, rows, cols)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = linalg::trace_norm(&m);
        Ok(())
    })
}

/// Uhlmann fidelity `(Tr|√ρ1 √ρ2|)²` of two density operators.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eprkit_fidelity(
    rho1: *const EprkitDensity,
    rho2: *const EprkitDensity,
    out: *mut f64,
) -> EprkitStatus {
    guard(|| {
        let rho1 = handle(rho1, "rho1")?;
        let rho2 = handle(rho2, "rho2")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = eprkit::state::fidelity(&rho1.inner, &rho2.inner)?;
        Ok(())
    })
}
