//! Exercises the C ABI from Rust exactly as a foreign caller would.

use gapprob_capi::*;
use std::ptr;

#[test]
fn status_messages_are_static_c_strings() {
    for status in [
        GapprobStatus::GapprobOk,
        GapprobStatus::GapprobNullPointer,
        GapprobStatus::GapprobInvalidArgument,
        GapprobStatus::GapprobDomainError,
        GapprobStatus::GapprobNoConvergence,
        GapprobStatus::GapprobNumericalError,
    ] {
        let ptr = gapprob_status_message(status);
        assert!(!ptr.is_null());
        let msg = unsafe { std::ffi::CStr::from_ptr(ptr) };
        assert!(!msg.to_str().unwrap().is_empty());
    }
}

#[test]
fn airy_values_through_ffi() {
    let mut ai = 0.0;
    let mut aip = 0.0;
    let st = unsafe { gapprob_airy_ai(0.0, &mut ai, &mut aip) };
    assert_eq!(st, GapprobStatus::GapprobOk);
    assert!((ai - 0.3550280538878172).abs() < 1e-12);
    assert!((aip + 0.2588194037928068).abs() < 1e-12);
    // out-of-range argument surfaces as a domain error
    let st = unsafe { gapprob_airy_ai(100.0, &mut ai, &mut aip) };
    assert_eq!(st, GapprobStatus::GapprobDomainError);
}

#[test]
fn kernels_through_ffi() {
    let mut k = 0.0;
    let st = unsafe { gapprob_airy_kernel(0.0, 0.0, &mut k) };
    assert_eq!(st, GapprobStatus::GapprobOk);
    assert!((k - 0.06698748377966399).abs() < 1e-10);
    assert_eq!(
        unsafe { gapprob_airy_kernel(0.0, 0.0, ptr::null_mut()) },
        GapprobStatus::GapprobNullPointer
    );

    let mut kp_dc = 0.0;
    let mut kp_ti = 0.0;
    assert_eq!(
        unsafe { gapprob_pearcey_kernel(0.5, -0.5, 1.0, 0, &mut kp_dc) },
        GapprobStatus::GapprobOk
    );
    assert_eq!(
        unsafe { gapprob_pearcey_kernel(0.5, -0.5, 1.0, 1, &mut kp_ti) },
        GapprobStatus::GapprobOk
    );
    assert!((kp_dc - kp_ti).abs() < 1e-8, "{kp_dc} vs {kp_ti}");
    assert_eq!(
        unsafe { gapprob_pearcey_kernel(0.0, 0.0, 1.0, 7, &mut kp_dc) },
        GapprobStatus::GapprobInvalidArgument
    );
}

#[test]
fn hastings_mcleod_handle_lifecycle() {
    let mut handle: *mut GapprobHastingsMcleod = ptr::null_mut();
    let st = unsafe { gapprob_hastings_mcleod_new(-8.0, 8.0, &mut handle) };
    assert_eq!(st, GapprobStatus::GapprobOk);
    assert!(!handle.is_null());

    let mut q = 0.0;
    let mut qp = 0.0;
    assert_eq!(
        unsafe { gapprob_hastings_mcleod_q(handle, 0.0, &mut q, &mut qp) },
        GapprobStatus::GapprobOk
    );
    assert!(q > 0.0 && qp < 0.0);

    let mut lg = 0.0;
    let mut p = 0.0;
    assert_eq!(
        unsafe { gapprob_tw_log_gap(handle, 0.0, &mut lg, &mut p) },
        GapprobStatus::GapprobOk
    );
    assert!(lg < 0.0 && p > 0.0);
    // outside the grid: domain error, handle stays usable
    assert_eq!(
        unsafe { gapprob_tw_log_gap(handle, -9.0, &mut lg, &mut p) },
        GapprobStatus::GapprobDomainError
    );
    // cross-check: exp(log gap) equals the Nyström determinant via FFI
    let endpoints = [0.0];
    let mut det = 0.0;
    assert_eq!(
        unsafe { gapprob_airy_gap_probability(endpoints.as_ptr(), 1, true, &mut det) },
        GapprobStatus::GapprobOk
    );
    assert!((lg.exp() - det).abs() < 1e-6, "{} vs {det}", lg.exp());

    unsafe { gapprob_hastings_mcleod_free(handle) };
    unsafe { gapprob_hastings_mcleod_free(ptr::null_mut()) }; // no-op

    // invalid construction range
    let mut bad: *mut GapprobHastingsMcleod = ptr::null_mut();
    assert_eq!(
        unsafe { gapprob_hastings_mcleod_new(-20.0, 8.0, &mut bad) },
        GapprobStatus::GapprobInvalidArgument
    );
    assert!(bad.is_null());
}

#[test]
fn gap_probabilities_through_ffi() {
    // degenerate interval: determinant exactly 1
    let endpoints = [0.5, 0.5];
    let mut det = 0.0;
    assert_eq!(
        unsafe { gapprob_pearcey_gap_probability(endpoints.as_ptr(), 2, 1.0, 1, &mut det) },
        GapprobStatus::GapprobOk
    );
    assert_eq!(det, 1.0);
    // odd endpoint count without tail flag is invalid
    assert_eq!(
        unsafe { gapprob_pearcey_gap_probability(endpoints.as_ptr(), 1, 1.0, 1, &mut det) },
        GapprobStatus::GapprobDomainError
    );
    assert_eq!(
        unsafe { gapprob_airy_gap_probability(ptr::null(), 1, true, &mut det) },
        GapprobStatus::GapprobNullPointer
    );
}
