use std::ffi::CStr;
use std::ptr;

use eprkit_ffi::*;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn last_error() -> String {
    let p = eprkit_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn state(dims: &[usize], data: &[f64]) -> *mut EprkitState {
    let mut out = ptr::null_mut();
    let status = unsafe { eprkit_state_new(dims.as_ptr(), dims.len(), data.as_ptr(), data.len() / 2, &mut out) };
    assert_eq!(status, EprkitStatus::Ok, "{}", last_error());
    out
}

fn bell() -> *mut EprkitState {
    state(&[2, 2], &[H, 0.0, 0.0, 0.0, 0.0, 0.0, H, 0.0])
}

#[test]
fn schmidt_weights_of_partial_entanglement() {
    let a = 0.9f64.sqrt();
    let b = 0.1f64.sqrt();
    let psi = state(&[2, 2], &[a, 0.0, 0.0, 0.0, 0.0, 0.0, b, 0.0]);
    let mut weights = [0.0; 2];
    let mut len = 0;
    let status = unsafe { eprkit_schmidt_coefficients(psi, weights.as_mut_ptr(), 2, &mut len) };
    assert_eq!(status, EprkitStatus::Ok);
    assert_eq!(len, 2);
    assert!((weights[0] - 0.9).abs() < 1e-12 && (weights[1] - 0.1).abs() < 1e-12);
    unsafe { eprkit_state_free(psi) };
}

#[test]
fn short_buffer_reports_required_length() {
    let psi = bell();
    let mut len = 0;
    let status = unsafe { eprkit_schmidt_coefficients(psi, ptr::null_mut(), 0, &mut len) };
    assert_eq!(status, EprkitStatus::BufferTooSmall);
    assert_eq!(len, 2);
    unsafe { eprkit_state_free(psi) };
}

#[test]
fn unnormalized_state_is_rejected_with_message() {
    let mut out = ptr::null_mut();
    let dims = [2usize];
    let data = [1.0, 0.0, 1.0, 0.0];
    let status = unsafe { eprkit_state_new(dims.as_ptr(), 1, data.as_ptr(), 2, &mut out) };
    assert_eq!(status, EprkitStatus::InvariantViolation);
    assert!(out.is_null());
    assert!(last_error().contains("normalized"));
}

#[test]
fn mismatched_dims_are_reported() {
    let mut out = ptr::null_mut();
    let dims = [2usize, 2];
    let data = [1.0, 0.0, 0.0, 0.0];
    let status = unsafe { eprkit_state_new(dims.as_ptr(), 2, data.as_ptr(), 2, &mut out) };
    assert_eq!(status, EprkitStatus::DimensionMismatch);
}

#[test]
fn null_handles_are_caught() {
    let mut dim = 0;
    assert_eq!(unsafe { eprkit_state_dim(ptr::null(), &mut dim) }, EprkitStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { eprkit_fidelity(ptr::null(), ptr::null(), &mut x) }, EprkitStatus::NullPointer);
    unsafe {
        eprkit_state_free(ptr::null_mut());
        eprkit_channel_free(ptr::null_mut());
    }
}

#[test]
fn bell_smap_is_scaled_conjugation() {
    let psi = bell();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { eprkit_smap(psi, EprkitDirection::Ba, &mut s) }, EprkitStatus::Ok);
    let (mut dst, mut src) = (0, 0);
    assert_eq!(unsafe { eprkit_antilinear_dims(s, &mut dst, &mut src) }, EprkitStatus::Ok);
    assert_eq!((dst, src), (2, 2));
    let mut k = [0.0; 8];
    let mut len = 0;
    assert_eq!(unsafe { eprkit_antilinear_kmatrix(s, k.as_mut_ptr(), 4, &mut len) }, EprkitStatus::Ok);
    assert_eq!(len, 4);
    let expected = [H, 0.0, 0.0, 0.0, 0.0, 0.0, H, 0.0];
    for (a, b) in k.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15);
    }
    // antilinear: i|0⟩ goes to -i|0⟩/√2
    let phi = [0.0, 1.0, 0.0, 0.0];
    let mut image = [0.0; 4];
    assert_eq!(
        unsafe { eprkit_antilinear_apply(s, phi.as_ptr(), 2, image.as_mut_ptr(), 2, &mut len) },
        EprkitStatus::Ok
    );
    assert!((image[0]).abs() < 1e-15 && (image[1] + H).abs() < 1e-15);
    unsafe {
        eprkit_antilinear_free(s);
        eprkit_state_free(psi);
    }
}

#[test]
fn channel_of_bell_density_maps_projector_to_half_projector() {
    let psi = bell();
    let mut rho = ptr::null_mut();
    assert_eq!(unsafe { eprkit_density_from_state(psi, &mut rho) }, EprkitStatus::Ok);
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { eprkit_channel_from_density(rho, EprkitDirection::Ba, &mut ch) }, EprkitStatus::Ok);
    let (mut src, mut dst) = (0, 0);
    assert_eq!(unsafe { eprkit_channel_dims(ch, &mut src, &mut dst) }, EprkitStatus::Ok);
    assert_eq!((src, dst), (2, 2));
    let p0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let mut out = [0.0; 8];
    let mut len = 0;
    assert_eq!(
        unsafe { eprkit_channel_apply(ch, p0.as_ptr(), 2, out.as_mut_ptr(), 4, &mut len) },
        EprkitStatus::Ok
    );
    let expected = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for (a, b) in out.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15);
    }
    // dual of the identity is the reduced state on the first factor
    let id = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    assert_eq!(
        unsafe { eprkit_channel_dual(ch, id.as_ptr(), 2, out.as_mut_ptr(), 4, &mut len) },
        EprkitStatus::Ok
    );
    assert!((out[0] - 0.5).abs() < 1e-15 && (out[6] - 0.5).abs() < 1e-15);
    unsafe {
        eprkit_channel_free(ch);
        eprkit_density_free(rho);
        eprkit_state_free(psi);
    }
}

#[test]
fn bell_teleport_maps_have_unit_trace_norm_after_scaling() {
    let ancilla = bell();
    let outcome = bell();
    let mut t = [0.0; 8];
    let (mut rows, mut cols) = (0, 0);
    assert_eq!(
        unsafe { eprkit_teleport_map(ancilla, outcome, t.as_mut_ptr(), 4, &mut rows, &mut cols) },
        EprkitStatus::Ok
    );
    assert_eq!((rows, cols), (2, 2));
    let mut norm = 0.0;
    assert_eq!(unsafe { eprkit_trace_norm(t.as_ptr(), 2, 2, &mut norm) }, EprkitStatus::Ok);
    // each Bell outcome map is half a unitary
    assert!((norm - 1.0).abs() < 1e-12, "{norm}");
    unsafe {
        eprkit_state_free(ancilla);
        eprkit_state_free(outcome);
    }
}

#[test]
fn fidelity_between_pure_states_is_overlap_squared() {
    let zero = state(&[2], &[1.0, 0.0, 0.0, 0.0]);
    let plus = state(&[2], &[H, 0.0, H, 0.0]);
    let (mut r0, mut r1) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(eprkit_density_from_state(zero, &mut r0), EprkitStatus::Ok);
        assert_eq!(eprkit_density_from_state(plus, &mut r1), EprkitStatus::Ok);
    }
    let mut f = 0.0;
    assert_eq!(unsafe { eprkit_fidelity(r0, r1, &mut f) }, EprkitStatus::Ok);
    assert!((f - 0.5).abs() < 1e-12);
    unsafe {
        eprkit_density_free(r0);
        eprkit_density_free(r1);
        eprkit_state_free(zero);
        eprkit_state_free(plus);
    }
}

#[test]
fn density_constructor_checks_trace() {
    let dims = [2usize];
    let m = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let mut out = ptr::null_mut();
    let status = unsafe { eprkit_density_new(dims.as_ptr(), 1, m.as_ptr(), 2, &mut out) };
    assert_eq!(status, EprkitStatus::InvariantViolation);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/eprkit.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 18);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for opaque in ["EprkitState", "EprkitDensity", "EprkitAntilinear", "EprkitChannel"] {
        assert!(header.contains(&format!("typedef struct {opaque} {opaque};")));
    }
    assert!(header.contains("EPRKIT_STATUS_BUFFER_TOO_SMALL = 5"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = env!("CARGO_MANIFEST_DIR");
    for lang in ["c", "c++"] {
        let status = std::process::Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(format!("{dir}/include"))
            .arg(format!("{dir}/tests/c/smoke.c"))
            .status()
            .expect("a C compiler on PATH");
        assert!(status.success(), "header failed to compile as {lang}");
    }
}
