//! C ABI for the gap-probability library.
//!
//! Conventions:
//!
//! * every function returns a [`GapprobStatus`] code and writes results
//!   through out-pointers;
//! * heavyweight state (the Painlevé-II solution) lives behind an opaque
//!   handle with explicit `_new` / `_free`;
//! * panics never cross the boundary (caught and mapped to
//!   `GAPPROB_NUMERICAL_ERROR`).
//!
//! The generated header lands in `include/gapprob.h` at build time.

use gapprob::config::NumericsConfig;
use gapprob::error::Error;
use gapprob::fredholm::{airy_gap_probability, pearcey_gap_probability};
use gapprob::kernels::{airy_kernel_cfg, pearcey_kernel, EvalRoute};
use gapprob::painleve::{
    hastings_mcleod_solve, p_of_s, tw_log_gap, HastingsMcLeodSolution, HmOptions,
};
use gapprob::quadrature::IntervalUnion;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapprobStatus {
    GapprobOk = 0,
    GapprobNullPointer = 1,
    GapprobInvalidArgument = 2,
    GapprobDomainError = 3,
    GapprobNoConvergence = 4,
    GapprobNumericalError = 5,
}

use GapprobStatus::*;

fn map_err(e: Error) -> GapprobStatus {
    match e {
        Error::Config(_) => GapprobInvalidArgument,
        Error::Domain(_) => GapprobDomainError,
        Error::NoConvergence { .. } => GapprobNoConvergence,
        _ => GapprobNumericalError,
    }
}

fn guarded(f: impl FnOnce() -> GapprobStatus) -> GapprobStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(GapprobNumericalError)
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gapprob_status_message(status: GapprobStatus) -> *const libc::c_char {
    let msg: &'static [u8] = match status {
        GapprobOk => b"ok\0",
        GapprobNullPointer => b"null pointer argument\0",
        GapprobInvalidArgument => b"invalid argument\0",
        GapprobDomainError => b"argument outside the supported domain\0",
        GapprobNoConvergence => b"iteration did not converge\0",
        GapprobNumericalError => b"numerical failure\0",
    };
    msg.as_ptr() as *const libc::c_char
}

/// Opaque Painlevé-II (Hastings–McLeod) solution handle.
pub struct GapprobHastingsMcleod {
    inner: HastingsMcLeodSolution,
}

/// Solves the Hastings–McLeod problem on `[s_min, s_max]`
/// (`-8 <= s_min < s_max`, `s_max >= 8`) and returns a handle.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot. The handle must be
/// released with [`gapprob_hastings_mcleod_free`].
#[no_mangle]
pub unsafe extern "C" fn gapprob_hastings_mcleod_new(
    s_min: f64,
    s_max: f64,
    out: *mut *mut GapprobHastingsMcleod,
) -> GapprobStatus {
    if out.is_null() {
        return GapprobNullPointer;
    }
    guarded(|| match hastings_mcleod_solve(s_min, s_max, &HmOptions::default()) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(GapprobHastingsMcleod { inner }));
            GapprobOk
        }
        Err(e) => map_err(e),
    })
}

/// Releases a handle returned by [`gapprob_hastings_mcleod_new`].
///
/// # Safety
/// `handle` must have been produced by `gapprob_hastings_mcleod_new` and
/// not freed before; `NULL` is ignored.
#[no_mangle]
pub unsafe extern "C" fn gapprob_hastings_mcleod_free(handle: *mut GapprobHastingsMcleod) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// `q(s)` and `q'(s)` of the Hastings–McLeod solution.
///
/// # Safety
/// `handle` must be live; `q`/`q_prime` may be `NULL` to skip an output.
#[no_mangle]
pub unsafe extern "C" fn gapprob_hastings_mcleod_q(
    handle: *const GapprobHastingsMcleod,
    s: f64,
    q: *mut f64,
    q_prime: *mut f64,
) -> GapprobStatus {
    if handle.is_null() {
        return GapprobNullPointer;
    }
    let hm = &(*handle).inner;
    guarded(|| {
        match (hm.q_at(s), hm.q_prime_at(s)) {
            (Ok(qv), Ok(qp)) => {
                if !q.is_null() {
                    *q = qv;
                }
                if !q_prime.is_null() {
                    *q_prime = qp;
                }
                GapprobOk
            }
            (Err(e), _) | (_, Err(e)) => map_err(e),
        }
    })
}

/// Tracy–Widom log gap `log det(Id - K_Ai|[s,∞))` through the Painlevé
/// route, and its derivative `p(s)`.
///
/// # Safety
/// `handle` must be live; `log_gap`/`p` may be `NULL` to skip an output.
#[no_mangle]
pub unsafe extern "C" fn gapprob_tw_log_gap(
    handle: *const GapprobHastingsMcleod,
    s: f64,
    log_gap: *mut f64,
    p: *mut f64,
) -> GapprobStatus {
    if handle.is_null() {
        return GapprobNullPointer;
    }
    let hm = &(*handle).inner;
    guarded(|| match (tw_log_gap(s, hm), p_of_s(s, hm)) {
        (Ok(lg), Ok(pv)) => {
            if !log_gap.is_null() {
                *log_gap = lg;
            }
            if !p.is_null() {
                *p = pv;
            }
            GapprobOk
        }
        (Err(e), _) | (_, Err(e)) => map_err(e),
    })
}

/// Airy function `Ai(x)` and derivative (|x| <= 30).
///
/// # Safety
/// `ai`/`ai_prime` may be `NULL` to skip an output.
#[no_mangle]
pub unsafe extern "C" fn gapprob_airy_ai(
    x: f64,
    ai: *mut f64,
    ai_prime: *mut f64,
) -> GapprobStatus {
    guarded(|| match gapprob::special::airy_ai(x) {
        Ok(v) => {
            if !ai.is_null() {
                *ai = v.ai;
            }
            if !ai_prime.is_null() {
                *ai_prime = v.ai_prime;
            }
            GapprobOk
        }
        Err(e) => map_err(e),
    })
}

/// Airy kernel `K_Ai(x, y)` (closed form).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gapprob_airy_kernel(x: f64, y: f64, out: *mut f64) -> GapprobStatus {
    if out.is_null() {
        return GapprobNullPointer;
    }
    guarded(|| match airy_kernel_cfg(x, y, &NumericsConfig::default()) {
        Ok(v) => {
            *out = v;
            GapprobOk
        }
        Err(e) => map_err(e),
    })
}

fn route_from_int(route: i32) -> Option<EvalRoute> {
    match route {
        0 => Some(EvalRoute::DoubleContour),
        1 => Some(EvalRoute::TIntegral),
        _ => None,
    }
}

/// Pearcey kernel `K_P(x, y; tau)`; `route` 0 = double contour,
/// 1 = Laplace factorisation.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gapprob_pearcey_kernel(
    x: f64,
    y: f64,
    tau: f64,
    route: i32,
    out: *mut f64,
) -> GapprobStatus {
    if out.is_null() {
        return GapprobNullPointer;
    }
    let Some(route) = route_from_int(route) else {
        return GapprobInvalidArgument;
    };
    guarded(
        || match pearcey_kernel(x, y, tau, route, &NumericsConfig::default()) {
            Ok(v) => {
                *out = v;
                GapprobOk
            }
            Err(e) => map_err(e),
        },
    )
}

unsafe fn interval_from_raw(
    endpoints: *const f64,
    n: usize,
    unbounded_tail: bool,
) -> Result<IntervalUnion, GapprobStatus> {
    if endpoints.is_null() {
        return Err(GapprobNullPointer);
    }
    let slice = std::slice::from_raw_parts(endpoints, n);
    IntervalUnion::new(slice.to_vec(), unbounded_tail).map_err(map_err)
}

/// `det(Id - K_Ai χ_I)` over the interval union described by `endpoints`
/// (`n` values; `unbounded_tail` turns the last endpoint into `[a_N, ∞)`).
///
/// # Safety
/// `endpoints` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gapprob_airy_gap_probability(
    endpoints: *const f64,
    n: usize,
    unbounded_tail: bool,
    out: *mut f64,
) -> GapprobStatus {
    if out.is_null() {
        return GapprobNullPointer;
    }
    let iu = match interval_from_raw(endpoints, n, unbounded_tail) {
        Ok(iu) => iu,
        Err(status) => return status,
    };
    guarded(|| match airy_gap_probability(&iu, &NumericsConfig::default()) {
        Ok(v) => {
            *out = v;
            GapprobOk
        }
        Err(e) => map_err(e),
    })
}

/// `det(Id - K_P χ_I)` over a bounded interval union (`n` even).
///
/// # Safety
/// `endpoints` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gapprob_pearcey_gap_probability(
    endpoints: *const f64,
    n: usize,
    tau: f64,
    route: i32,
    out: *mut f64,
) -> GapprobStatus {
    if out.is_null() {
        return GapprobNullPointer;
    }
    let Some(route) = route_from_int(route) else {
        return GapprobInvalidArgument;
    };
    let iu = match interval_from_raw(endpoints, n, false) {
        Ok(iu) => iu,
        Err(status) => return status,
    };
    guarded(
        || match pearcey_gap_probability(&iu, tau, &NumericsConfig::default(), route) {
            Ok(v) => {
                *out = v;
                GapprobOk
            }
            Err(e) => map_err(e),
        },
    )
}
