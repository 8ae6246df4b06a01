//! C ABI over `hardy-sep`.
//!
//! Every function returns an [`HsStatus`]; results go through out-pointers. On failure a
//! message is available from [`hs_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function; strings returned by the library are
//! released with [`hs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hardy_sep::exponents::{classify_regime, derive_exponents, ProblemParams};
use hardy_sep::nonlinear::{eval_solution, solve_profile, Branch, NonlinearProfile};
use hardy_sep::spectra::{eigenvalue, harmonic, HarmonicExtra, HarmonicKind, SeparableHarmonic};
use hardy_sep::Error;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrInvalidArgument = 1,
    /// Parameters outside the admissible range.
    InvalidParams = 2,
    /// A solver failed or no solution exists for the request.
    SolverError = 3,
    /// Internal panic caught at the boundary.
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsBranch {
    Plus = 0,
    Minus = 1,
}

/// Boundary exponents and critical values; thresholds that do not exist are `+inf`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HsExponents {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub lambda_alpha_plus: f64,
    pub p_c: f64,
    pub p_ko: f64,
    pub p_c_minus: f64,
    pub mu_star: f64,
}

/// Opaque nonlinear profile.
pub struct HsProfile(NonlinearProfile);

/// Opaque separable harmonic.
pub struct HsHarmonic(SeparableHarmonic);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> HsStatus {
    match err.exit_code() {
        2 => HsStatus::InvalidParams,
        _ => HsStatus::SolverError,
    }
}

fn guard<F: FnOnce() -> Result<(), (HsStatus, String)>>(f: F) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HsStatus::Panic
        }
    }
}

fn lib<T>(r: hardy_sep::Result<T>) -> Result<T, (HsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (HsStatus, String) {
    (HsStatus::NullOrInvalidArgument, format!("{what} is null"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (HsStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn point<'a>(x: *const f64, len: usize) -> Result<&'a [f64], (HsStatus, String)> {
    if x.is_null() {
        return Err(null("x"));
    }
    Ok(std::slice::from_raw_parts(x, len))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_exponents(n: u32, mu: f64, out: *mut HsExponents) -> HsStatus {
    guard(|| {
        let t = lib(ProblemParams::linear(n, mu).and_then(|p| derive_exponents(&p)))?;
        let e = HsExponents {
            alpha_plus: t.alpha_plus,
            alpha_minus: t.alpha_minus,
            lambda_alpha_plus: t.lambda_alpha_plus,
            p_c: t.p_c,
            p_ko: t.p_ko,
            p_c_minus: t.p_c_minus,
            mu_star: t.mu_star,
        };
        write(out, e, "out")
    })
}

/// Regime classification for `(n, mu, p)` as a JSON string; free with [`hs_string_free`].
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_regime_json(n: u32, mu: f64, p: f64, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let c = lib(ProblemParams::nonlinear(n, mu, p).and_then(|pr| classify_regime(&pr)))?;
        let text = lib(serde_json::to_string(&c).map_err(Error::from))?;
        write(out, to_c_string(text), "out")
    })
}

/// Eigenvalue `Lambda_{s,m}` (`s >= 1`).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_eigenvalue(n: u32, mu: f64, s: usize, m: u32, tol: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let e = lib(eigenvalue(n, mu, s, m, tol))?;
        write(out, e.lambda, "out")
    })
}

/// Builds a harmonic. `kind` is one of `h_plus`, `h_minus`, `H_plus`, `H_minus`, `H_gamma`;
/// pass NaN for `gamma` and 0 for `s` when not needed.
///
/// # Safety
/// `kind` must be null or a NUL-terminated string; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_harmonic_new(
    kind: *const c_char,
    n: u32,
    mu: f64,
    gamma: f64,
    s: usize,
    m: u32,
    tol: f64,
    out: *mut *mut HsHarmonic,
) -> HsStatus {
    guard(|| {
        if kind.is_null() {
            return Err(null("kind"));
        }
        let kind = CStr::from_ptr(kind)
            .to_str()
            .map_err(|_| (HsStatus::NullOrInvalidArgument, "kind is not UTF-8".to_string()))?;
        let kind: HarmonicKind = lib(kind.parse())?;
        let extra = HarmonicExtra {
            gamma: (!gamma.is_nan()).then_some(gamma),
            s: (s > 0).then_some(s),
            m,
        };
        let h = lib(harmonic(kind, n, mu, extra, tol))?;
        write(out, Box::into_raw(Box::new(HsHarmonic(h))), "out")
    })
}

/// Value at a point `x` of length `len` (must equal `n`, `x[0] > 0`).
///
/// # Safety
/// `h` must be a live handle, `x` valid for `len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_harmonic_eval(h: *const HsHarmonic, x: *const f64, len: usize, out: *mut f64) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let x = point(x, len)?;
        if len != h.0.n as usize {
            return Err((HsStatus::InvalidParams, format!("point has {len} coordinates, expected {}", h.0.n)));
        }
        write(out, h.0.eval(x), "out")
    })
}

/// # Safety
/// `h` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_harmonic_to_json(h: *const HsHarmonic, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let text = lib(serde_json::to_string(&h.0).map_err(Error::from))?;
        write(out, to_c_string(text), "out")
    })
}

/// # Safety
/// `h` must be null or a handle from [`hs_harmonic_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_harmonic_free(h: *mut HsHarmonic) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Solves for the separable profile on the given branch.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_solve(n: u32, mu: f64, p: f64, branch: HsBranch, tol: f64, out: *mut *mut HsProfile) -> HsStatus {
    guard(|| {
        let branch = match branch {
            HsBranch::Plus => Branch::Plus,
            HsBranch::Minus => Branch::Minus,
        };
        let prof = lib(ProblemParams::nonlinear(n, mu, p).and_then(|pr| solve_profile(&pr, branch, tol)))?;
        write(out, Box::into_raw(Box::new(HsProfile(prof))), "out")
    })
}

/// Angular profile `v(t)`, `t` in `[0, 1]`.
///
/// # Safety
/// `h` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_v(h: *const HsProfile, t: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if !(0.0..=1.0).contains(&t) {
            return Err((HsStatus::InvalidParams, format!("t = {t} outside [0, 1]")));
        }
        write(out, h.0.v(t), "out")
    })
}

/// `lim v(t) / t^alpha` as `t -> 0`.
///
/// # Safety
/// `h` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_v_limit(h: *const HsProfile, out: *mut f64) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        write(out, h.0.v_limit, "out")
    })
}

/// Solution `u(x) = |x|^{-2/(p-1)} v(x_1/|x|)` at a point of length `len == n`.
///
/// # Safety
/// `h` must be a live handle, `x` valid for `len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_eval(h: *const HsProfile, x: *const f64, len: usize, out: *mut f64) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let x = point(x, len)?;
        if len != h.0.params.n as usize {
            return Err((HsStatus::InvalidParams, format!("point has {len} coordinates, expected {}", h.0.params.n)));
        }
        write(out, eval_solution(&h.0, x), "out")
    })
}

/// Profile artifact as JSON, same format as the `profile` subcommand.
///
/// # Safety
/// `h` must be a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_to_json(h: *const HsProfile, out: *mut *mut c_char) -> HsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        let text = lib(serde_json::to_string(&h.0).map_err(Error::from))?;
        write(out, to_c_string(text), "out")
    })
}

/// # Safety
/// `h` must be null or a handle from [`hs_profile_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_profile_free(h: *mut HsProfile) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
