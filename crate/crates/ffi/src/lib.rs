//! C ABI over the `nyman` library.
//!
//! Handles are opaque and owned by the caller: every `*_new`/`*_parse`
//! must be paired with the matching `*_free`. Functions return a
//! [`NymanStatus`]; on failure `nyman_last_error_message` describes the
//! error on the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nyman::elements::{u_of, w_of, Element, InnerProductEngine, Route};
use nyman::numerics::{digamma, omega, zeta, Complex64, PrecisionBudget};
use nyman::projection::{project, GramCache, SolveOptions, Variant};
use nyman::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NymanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Pole = 5,
    Precision = 6,
    Conditioning = 7,
    NotPositiveDefinite = 8,
    LengthMismatch = 9,
    Io = 10,
    Panic = 11,
}

/// Inner-product engine with its caches.
pub struct NymanEngine {
    inner: InnerProductEngine,
}

/// Finite linear combination of atoms.
pub struct NymanElement {
    inner: Element,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NymanStatus {
    match e {
        Error::Parse(_) => NymanStatus::Parse,
        Error::Domain(_) => NymanStatus::Domain,
        Error::Pole => NymanStatus::Pole,
        Error::Precision { .. } => NymanStatus::Precision,
        Error::Conditioning { .. } => NymanStatus::Conditioning,
        Error::NotPositiveDefinite { .. } => NymanStatus::NotPositiveDefinite,
        Error::LengthMismatch { .. } => NymanStatus::LengthMismatch,
        Error::Io(_) => NymanStatus::Io,
        Error::GramEntry { source, .. } => status_of(source),
    }
}

enum Failure {
    Status(NymanStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn null() -> Failure {
    Failure::Status(NymanStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NymanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NymanStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            NymanStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(NymanStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nyman_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// New engine; `abs_tol <= 0` or `max_terms == 0` select the defaults.
#[no_mangle]
pub extern "C" fn nyman_engine_new(abs_tol: f64, max_terms: u64) -> *mut NymanEngine {
    let mut budget = PrecisionBudget::default();
    if abs_tol > 0.0 {
        budget.abs_tol = abs_tol;
    }
    if max_terms > 0 {
        budget.max_terms = max_terms;
    }
    Box::into_raw(Box::new(NymanEngine {
        inner: InnerProductEngine::new(budget),
    }))
}

/// # Safety
/// `engine` must come from `nyman_engine_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nyman_engine_free(engine: *mut NymanEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Parses text such as `"e:2 - 1/2*e:1"` into `*out_element`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out_element` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_element_parse(
    text: *const c_char,
    out_element: *mut *mut NymanElement,
) -> NymanStatus {
    guard(|| {
        let slot = out(out_element)?;
        *slot = ptr::null_mut();
        let e = Element::parse(str_arg(text)?)?;
        *slot = Box::into_raw(Box::new(NymanElement { inner: e }));
        Ok(())
    })
}

/// # Safety
/// `element` must come from `nyman_element_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nyman_element_free(element: *mut NymanElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// JSON form of an element; release with `nyman_string_free`.
///
/// # Safety
/// `element` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_element_to_json(
    element: *const NymanElement,
    out_json: *mut *mut c_char,
) -> NymanStatus {
    guard(|| {
        let slot = out(out_json)?;
        let e = element.as_ref().ok_or_else(null)?;
        *slot = CString::new(e.inner.to_json()).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nyman_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `⟨a, b⟩` with its error bound.
///
/// # Safety
/// Handles must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_inner_product(
    engine: *const NymanEngine,
    a: *const NymanElement,
    b: *const NymanElement,
    out_value: *mut f64,
    out_err: *mut f64,
) -> NymanStatus {
    guard(|| {
        let (v, e) = (out(out_value)?, out(out_err)?);
        let eng = engine.as_ref().ok_or_else(null)?;
        let (a, b) = (a.as_ref().ok_or_else(null)?, b.as_ref().ok_or_else(null)?);
        let r = eng.inner.inner_product(&a.inner, &b.inner)?;
        *v = r.value;
        *e = r.err;
        Ok(())
    })
}

/// # Safety
/// `out_mu` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_mobius(n: u64, out_mu: *mut i8) -> NymanStatus {
    guard(|| {
        *out(out_mu)? = nyman::arith::mobius(n)?;
        Ok(())
    })
}

/// `ζ(s)` for `Re s > 0`, `s ≠ 1`.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_zeta(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> NymanStatus {
    guard(|| {
        let (r, i) = (out(out_re)?, out(out_im)?);
        let z = zeta(Complex64::new(re, im))?;
        *r = z.re;
        *i = z.im;
        Ok(())
    })
}

/// `ω(z)` for `|z| ≤ 1`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_omega(z: f64, out_value: *mut f64) -> NymanStatus {
    guard(|| {
        *out(out_value)? = omega(z)?;
        Ok(())
    })
}

/// `ψ(x)` for `x > 0`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_digamma(x: f64, out_value: *mut f64) -> NymanStatus {
    guard(|| {
        *out(out_value)? = digamma(x)?;
        Ok(())
    })
}

unsafe fn arith_value(
    engine: *const NymanEngine,
    f: *const NymanElement,
    out_value: *mut f64,
    out_err: *mut f64,
    eval: impl FnOnce(&Element, &InnerProductEngine) -> nyman::Result<nyman::elements::ArithValue>,
) -> NymanStatus {
    guard(|| {
        let (v, e) = (out(out_value)?, out(out_err)?);
        let eng = engine.as_ref().ok_or_else(null)?;
        let f = f.as_ref().ok_or_else(null)?;
        let r = eval(&f.inner, &eng.inner)?;
        *v = r.value;
        *e = r.err;
        Ok(())
    })
}

/// `u(n; f)`; `functional != 0` evaluates it as an inner product.
///
/// # Safety
/// Handles must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_u(
    engine: *const NymanEngine,
    f: *const NymanElement,
    n: u64,
    functional: i32,
    out_value: *mut f64,
    out_err: *mut f64,
) -> NymanStatus {
    let route = if functional != 0 { Route::Functional } else { Route::Definition };
    arith_value(engine, f, out_value, out_err, |f, e| u_of(f, n, route, e))
}

/// `w(n; f) = (μ ∗ u)(n)`.
///
/// # Safety
/// Handles must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_w(
    engine: *const NymanEngine,
    f: *const NymanElement,
    n: u64,
    functional: i32,
    out_value: *mut f64,
    out_err: *mut f64,
) -> NymanStatus {
    let route = if functional != 0 { Route::Functional } else { Route::Definition };
    arith_value(engine, f, out_value, out_err, |f, e| w_of(f, n, route, e))
}

/// Best approximation of `χ` from the size-`n` span.
///
/// `variant` is 0 for `e_1..e_n`, 1 for `e_k − e_1/k, 2 ≤ k ≤ n`. The
/// coefficients are written to `out_coefficients`, which must hold
/// `out_len` values; `*out_written` receives the basis size.
///
/// # Safety
/// `engine` must be live; `out_coefficients` must hold `out_len` doubles;
/// the scalar outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nyman_project(
    engine: *const NymanEngine,
    n: usize,
    variant: i32,
    extended: i32,
    out_coefficients: *mut f64,
    out_len: usize,
    out_written: *mut usize,
    out_distance_sq: *mut f64,
    out_condition: *mut f64,
) -> NymanStatus {
    guard(|| {
        let eng = engine.as_ref().ok_or_else(null)?;
        let (written, dsq, cond) = (out(out_written)?, out(out_distance_sq)?, out(out_condition)?);
        if out_coefficients.is_null() {
            return Err(null());
        }
        let variant = match variant {
            0 => Variant::Full,
            1 => Variant::Zero,
            v => {
                return Err(Failure::Status(NymanStatus::Domain, format!("unknown variant {v}")))
            }
        };
        let opts = SolveOptions {
            extended: extended != 0,
            allow_ill_conditioned: false,
        };
        let g = project(n, variant, &eng.inner, &mut GramCache::in_memory(), opts)?;
        let s = g.solution()?;
        if s.coefficients.len() > out_len {
            return Err(Failure::Core(Error::LengthMismatch {
                left: s.coefficients.len(),
                right: out_len,
            }));
        }
        std::slice::from_raw_parts_mut(out_coefficients, s.coefficients.len())
            .copy_from_slice(&s.coefficients);
        *written = s.coefficients.len();
        *dsq = s.distance_sq;
        *cond = s.condition_estimate;
        Ok(())
    })
}
