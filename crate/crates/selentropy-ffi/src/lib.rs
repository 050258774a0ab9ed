//! C ABI for the selentropy toolkit: opaque state handles, status codes
//! and a thread-local last-error message. The generated header lands in
//! `include/selentropy.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use selentropy::cli::load_state;
use selentropy::entropy::{h_max, h_min, h_vn, EntropyValue};
use selentropy::error::Error;
use selentropy::metrics::{fidelity, purified_distance, trace_distance};
use selentropy::operators::MultipartiteState;
use selentropy::smooth::{smooth_h_max, smooth_h_min, SmoothParam};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelStatus {
    Ok = 0,
    InvalidInput = 2,
    NumericalFailure = 3,
    ValidityThreshold = 4,
    NullPointer = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_for(err: &Error) -> SelStatus {
    match err {
        Error::Validity { .. } => SelStatus::ValidityThreshold,
        Error::Sdp(_) | Error::NonFinite => SelStatus::NumericalFailure,
        _ => SelStatus::InvalidInput,
    }
}

fn fail(err: &Error) -> SelStatus {
    set_error(&err.to_string());
    status_for(err)
}

/// Opaque multipartite state handle.
pub struct SelState {
    inner: MultipartiteState,
}

/// Copies the last error message on this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn sel_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let guard = e.borrow();
        let msg = guard.as_ref().map(|c| c.as_bytes()).unwrap_or(b"");
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, SelStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(SelStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        SelStatus::InvalidInput
    })
}

fn labels(csv: &str) -> Vec<&str> {
    csv.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).collect()
}

/// Loads a JSON state file. Returns null on failure; see `sel_last_error`.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sel_state_load_json(path: *const c_char) -> *mut SelState {
    let path = match unsafe { cstr(path) } {
        Ok(p) => p,
        Err(_) => return ptr::null_mut(),
    };
    match load_state(Path::new(path)) {
        Ok(inner) => Box::into_raw(Box::new(SelState { inner })),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Parses a state from a JSON string. Returns null on failure.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sel_state_parse_json(json: *const c_char) -> *mut SelState {
    let text = match unsafe { cstr(json) } {
        Ok(p) => p,
        Err(_) => return ptr::null_mut(),
    };
    let state = selentropy::cli::parse_state_file(text).and_then(|f| f.to_state());
    match state {
        Ok(inner) => Box::into_raw(Box::new(SelState { inner })),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a state handle. Null is ignored.
///
/// # Safety
/// `state` must come from a `sel_state_*` constructor and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn sel_state_free(state: *mut SelState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Total Hilbert-space dimension of the state, 0 for null.
///
/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sel_state_dim(state: *const SelState) -> usize {
    if state.is_null() {
        return 0;
    }
    unsafe { &*state }.inner.dim()
}

/// Trace of the state; NaN for null.
///
/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sel_state_trace(state: *const SelState) -> f64 {
    if state.is_null() {
        return f64::NAN;
    }
    unsafe { &*state }.inner.trace()
}

type EntropyFn =
    fn(&MultipartiteState, &[&str], &[&str]) -> selentropy::error::Result<EntropyValue>;

unsafe fn entropy_common(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    out_bits: *mut f64,
    out_tol: *mut f64,
    f: EntropyFn,
) -> SelStatus {
    if state.is_null() || out_bits.is_null() {
        set_error("null pointer argument");
        return SelStatus::NullPointer;
    }
    let a = match unsafe { cstr(a) } {
        Ok(s) => s,
        Err(code) => return code,
    };
    let b = match unsafe { cstr(b) } {
        Ok(s) => s,
        Err(code) => return code,
    };
    let rho = &unsafe { &*state }.inner;
    match f(rho, &labels(a), &labels(b)).and_then(|v| Ok((v.bits()?, v.tol()))) {
        Ok((bits, tol)) => {
            unsafe {
                *out_bits = bits;
                if !out_tol.is_null() {
                    *out_tol = tol;
                }
            }
            SelStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Conditional min-entropy H_min(A|B) in bits with its certified
/// tolerance. Labels are comma-separated subsystem lists.
///
/// # Safety
/// Pointers must be valid as documented on `sel_state_load_json`.
#[no_mangle]
pub unsafe extern "C" fn sel_h_min(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    out_bits: *mut f64,
    out_tol: *mut f64,
) -> SelStatus {
    unsafe { entropy_common(state, a, b, out_bits, out_tol, h_min) }
}

/// Conditional max-entropy H_max(A|B) in bits.
///
/// # Safety
/// As for `sel_h_min`.
#[no_mangle]
pub unsafe extern "C" fn sel_h_max(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    out_bits: *mut f64,
    out_tol: *mut f64,
) -> SelStatus {
    unsafe { entropy_common(state, a, b, out_bits, out_tol, h_max) }
}

/// Conditional von Neumann entropy H(A|B) in bits.
///
/// # Safety
/// As for `sel_h_min`.
#[no_mangle]
pub unsafe extern "C" fn sel_h_vn(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    out_bits: *mut f64,
    out_tol: *mut f64,
) -> SelStatus {
    unsafe { entropy_common(state, a, b, out_bits, out_tol, h_vn) }
}

unsafe fn smooth_common(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    eps: f64,
    out_bits: *mut f64,
    out_tol: *mut f64,
    min_side: bool,
) -> SelStatus {
    if state.is_null() || out_bits.is_null() {
        set_error("null pointer argument");
        return SelStatus::NullPointer;
    }
    let a = match unsafe { cstr(a) } {
        Ok(s) => s,
        Err(code) => return code,
    };
    let b = match unsafe { cstr(b) } {
        Ok(s) => s,
        Err(code) => return code,
    };
    let rho = &unsafe { &*state }.inner;
    let run = || -> selentropy::error::Result<(f64, f64)> {
        let e = SmoothParam::new(eps)?;
        let v = if min_side {
            smooth_h_min(rho, &labels(a), &labels(b), e)?.0
        } else {
            smooth_h_max(rho, &labels(a), &labels(b), e)?.0
        };
        Ok((v.bits()?, v.tol()))
    };
    match run() {
        Ok((bits, tol)) => {
            unsafe {
                *out_bits = bits;
                if !out_tol.is_null() {
                    *out_tol = tol;
                }
            }
            SelStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Smooth min-entropy H_min^eps(A|B) in bits.
///
/// # Safety
/// As for `sel_h_min`.
#[no_mangle]
pub unsafe extern "C" fn sel_smooth_h_min(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    eps: f64,
    out_bits: *mut f64,
    out_tol: *mut f64,
) -> SelStatus {
    unsafe { smooth_common(state, a, b, eps, out_bits, out_tol, true) }
}

/// Smooth max-entropy H_max^eps(A|B) in bits.
///
/// # Safety
/// As for `sel_h_min`.
#[no_mangle]
pub unsafe extern "C" fn sel_smooth_h_max(
    state: *const SelState,
    a: *const c_char,
    b: *const c_char,
    eps: f64,
    out_bits: *mut f64,
    out_tol: *mut f64,
) -> SelStatus {
    unsafe { smooth_common(state, a, b, eps, out_bits, out_tol, false) }
}

unsafe fn distance_common(
    rho: *const SelState,
    tau: *const SelState,
    out: *mut f64,
    which: u8,
) -> SelStatus {
    if rho.is_null() || tau.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SelStatus::NullPointer;
    }
    let (a, b) = unsafe { (&(*rho).inner, &(*tau).inner) };
    let r = match which {
        0 => trace_distance(a, b),
        1 => fidelity(a, b),
        _ => purified_distance(a, b),
    };
    match r {
        Ok(v) => {
            unsafe { *out = v.value };
            SelStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Generalized trace distance between two states.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sel_trace_distance(
    rho: *const SelState,
    tau: *const SelState,
    out: *mut f64,
) -> SelStatus {
    unsafe { distance_common(rho, tau, out, 0) }
}

/// Generalized fidelity between two states.
///
/// # Safety
/// As for `sel_trace_distance`.
#[no_mangle]
pub unsafe extern "C" fn sel_fidelity(
    rho: *const SelState,
    tau: *const SelState,
    out: *mut f64,
) -> SelStatus {
    unsafe { distance_common(rho, tau, out, 1) }
}

/// Purified distance between two states.
///
/// # Safety
/// As for `sel_trace_distance`.
#[no_mangle]
pub unsafe extern "C" fn sel_purified_distance(
    rho: *const SelState,
    tau: *const SelState,
    out: *mut f64,
) -> SelStatus {
    unsafe { distance_common(rho, tau, out, 2) }
}

/// Finite-key length and rate for blocklength n at bit error rate q with
/// correctness and secrecy parameters.
///
/// # Safety
/// `out_ell` and `out_rate` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sel_qkd_key_length(
    n: u64,
    q: f64,
    eps_c: f64,
    eps_s: f64,
    out_ell: *mut f64,
    out_rate: *mut f64,
) -> SelStatus {
    match selentropy::bounds::qkd_key_length(n, q, eps_c, eps_s) {
        Ok((ell, rate)) => {
            unsafe {
                if !out_ell.is_null() {
                    *out_ell = ell;
                }
                if !out_rate.is_null() {
                    *out_rate = rate;
                }
            }
            SelStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const BELL: &str = r#"{"systems": [{"label": "A", "dim": 2}, {"label": "B", "dim": 2}],
        "matrix": {"re": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]]}}"#;

    #[test]
    fn ffi_round_trip() {
        let json = CString::new(BELL).unwrap();
        let state = unsafe { sel_state_parse_json(json.as_ptr()) };
        assert!(!state.is_null());
        assert_eq!(unsafe { sel_state_dim(state) }, 4);
        assert!((unsafe { sel_state_trace(state) } - 1.0).abs() < 1e-12);

        let a = CString::new("A").unwrap();
        let b = CString::new("B").unwrap();
        let mut bits = 0.0f64;
        let mut tol = 0.0f64;
        let code = unsafe { sel_h_min(state, a.as_ptr(), b.as_ptr(), &mut bits, &mut tol) };
        assert_eq!(code, SelStatus::Ok);
        assert!((bits + 1.0).abs() < 1e-6, "{bits}");

        let code =
            unsafe { sel_smooth_h_min(state, a.as_ptr(), b.as_ptr(), 0.1, &mut bits, &mut tol) };
        assert_eq!(code, SelStatus::Ok);
        assert!(bits >= -1.0 - 1e-6);

        let mut d = 0.0f64;
        let code = unsafe { sel_purified_distance(state, state, &mut d) };
        assert_eq!(code, SelStatus::Ok);
        assert!(d < 1e-6);

        unsafe { sel_state_free(state) };
    }

    #[test]
    fn ffi_errors_and_messages() {
        let bad = CString::new("{not json").unwrap();
        let state = unsafe { sel_state_parse_json(bad.as_ptr()) };
        assert!(state.is_null());
        let mut buf = vec![0i8; 256];
        let len = unsafe { sel_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
        assert!(len > 0);

        let mut ell = 0.0;
        let mut rate = 0.0;
        let code = unsafe { sel_qkd_key_length(10, 0.05, 1e-3, 1e-3, &mut ell, &mut rate) };
        assert_eq!(code, SelStatus::ValidityThreshold);
        let code =
            unsafe { sel_qkd_key_length(100_000_000, 0.0, 1e-3, 1e-3, &mut ell, &mut rate) };
        assert_eq!(code, SelStatus::Ok);
        assert!((rate - 1.0).abs() < 0.01);
    }

    #[test]
    fn ffi_null_handling() {
        let mut out = 0.0;
        let code = unsafe { sel_trace_distance(std::ptr::null(), std::ptr::null(), &mut out) };
        assert_eq!(code, SelStatus::NullPointer);
        unsafe { sel_state_free(std::ptr::null_mut()) };
        assert_eq!(unsafe { sel_state_dim(std::ptr::null()) }, 0);
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(sel_version()) };
        assert!(!v.to_bytes().is_empty());
    }
}
