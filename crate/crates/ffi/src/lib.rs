//! C ABI for `heun-core`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`HeunStatus`]; results go through
//!   out-pointers that are written only on success.
//! * Series and spectra are opaque handles created by `*_build`/`heun_q_spectrum`
//!   and released with the matching `*_free`.
//! * After a failure, [`heun_last_error_message`] returns a description
//!   owned by the library and valid until the next call on the same thread.
//! * Panics never cross the boundary; they become `HEUN_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heun_core::expansions::{self, Family, SeriesSolution};
use heun_core::kummer::{self, KummerArgs, SeriesControl};
use heun_core::termination::{self, QSpectrum, TerminationCondition, TerminationKind};
use heun_core::{che, CheParams, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeunComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HeunComplex> for Complex64 {
    fn from(z: HeunComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for HeunComplex {
    fn from(z: Complex64) -> Self {
        HeunComplex { re: z.re, im: z.im }
    }
}

/// `(γ, δ, ε, α, q)` of the confluent Heun equation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeunCheParams {
    pub gamma: HeunComplex,
    pub delta: HeunComplex,
    pub epsilon: HeunComplex,
    pub alpha: HeunComplex,
    pub q: HeunComplex,
}

impl From<HeunCheParams> for CheParams {
    fn from(p: HeunCheParams) -> Self {
        CheParams::new(p.gamma.into(), p.delta.into(), p.epsilon.into(), p.alpha.into(), p.q.into())
    }
}

impl From<CheParams> for HeunCheParams {
    fn from(p: CheParams) -> Self {
        HeunCheParams {
            gamma: p.gamma.into(),
            delta: p.delta.into(),
            epsilon: p.epsilon.into(),
            alpha: p.alpha.into(),
            q: p.q.into(),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeunStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inapplicable = 3,
    NonConvergence = 4,
    TailTooLarge = 5,
    NotFound = 6,
    Numerical = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeunFamily {
    A1 = 0,
    A2 = 1,
    B4 = 2,
    B3 = 3,
    C = 4,
}

impl From<HeunFamily> for Family {
    fn from(f: HeunFamily) -> Self {
        match f {
            HeunFamily::A1 => Family::A1TwoTerm,
            HeunFamily::A2 => Family::A2ThreeTerm,
            HeunFamily::B4 => Family::B4FourTerm,
            HeunFamily::B3 => Family::B3ThreeTerm,
            HeunFamily::C => Family::CThreeTerm,
        }
    }
}

impl From<Family> for HeunFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::A1TwoTerm => HeunFamily::A1,
            Family::A2ThreeTerm => HeunFamily::A2,
            Family::B4FourTerm => HeunFamily::B4,
            Family::B3ThreeTerm => HeunFamily::B3,
            Family::CThreeTerm => HeunFamily::C,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeunTerminationKind {
    AlphaOverEps = 0,
    DeltaInt = 1,
    GammaDeltaAlpha = 2,
}

impl From<HeunTerminationKind> for TerminationKind {
    fn from(k: HeunTerminationKind) -> Self {
        match k {
            HeunTerminationKind::AlphaOverEps => TerminationKind::AlphaOverEps,
            HeunTerminationKind::DeltaInt => TerminationKind::DeltaInt,
            HeunTerminationKind::GammaDeltaAlpha => TerminationKind::GammaDeltaAlpha,
        }
    }
}

impl From<TerminationKind> for HeunTerminationKind {
    fn from(k: TerminationKind) -> Self {
        match k {
            TerminationKind::AlphaOverEps => HeunTerminationKind::AlphaOverEps,
            TerminationKind::DeltaInt => HeunTerminationKind::DeltaInt,
            TerminationKind::GammaDeltaAlpha => HeunTerminationKind::GammaDeltaAlpha,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeunTermination {
    pub family: HeunFamily,
    pub kind: HeunTerminationKind,
    pub n: usize,
}

/// Opaque built series.
pub struct HeunSeries(SeriesSolution);

/// Opaque accessory-parameter spectrum.
pub struct HeunSpectrum(QSpectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> HeunStatus {
    match e.code() {
        "Inapplicable" | "InvalidAlpha0" | "MissingS0" | "FixedS0" | "KindNotAdmissible" | "ConditionNotMet" => HeunStatus::Inapplicable,
        "NonConvergence" => HeunStatus::NonConvergence,
        "TailTooLarge" | "TruncationWarning" => HeunStatus::TailTooLarge,
        "InvalidControl" | "SingularPoint" | "PoleAtLowerParameter" | "PoleAtGamma" => HeunStatus::InvalidArgument,
        _ => HeunStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HeunStatus>) -> HeunStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HeunStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            HeunStatus::Panic
        }
    }
}

fn fail<E: Into<Error>>(e: E) -> HeunStatus {
    let e = e.into();
    set_error(e.to_string());
    status_of(&e)
}

fn null() -> HeunStatus {
    set_error("null pointer argument");
    HeunStatus::NullPointer
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn heun_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL if none.
#[no_mangle]
pub extern "C" fn heun_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `₁F₁(a; c; x)` with default tolerance.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `HeunComplex`.
#[no_mangle]
pub unsafe extern "C" fn heun_1f1(a: HeunComplex, c: HeunComplex, x: HeunComplex, out: *mut HeunComplex) -> HeunStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let v = kummer::eval_1f1(KummerArgs::new(a.into(), c.into(), x.into()), SeriesControl::default()).map_err(fail)?;
        *out = v.into();
        Ok(())
    })
}

/// Parameters of the equation after `z → 1 − z`.
///
/// # Safety
/// `params` must point to a valid `HeunCheParams`; `out` to writable memory
/// for one.
#[no_mangle]
pub unsafe extern "C" fn heun_transform(params: *const HeunCheParams, out: *mut HeunCheParams) -> HeunStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(null());
        }
        *out = che::transform_1_minus_z(&(*params).into()).into();
        Ok(())
    })
}

/// Builds `n_terms + 1` coefficients of an expansion with the default α₀.
/// `s0` is read only when `has_s0` is true (required for B4). On success
/// `*out` receives a handle to free with [`heun_series_free`].
///
/// # Safety
/// `params` must point to a valid `HeunCheParams`; `out` to a writable
/// handle slot.
#[no_mangle]
pub unsafe extern "C" fn heun_series_build(
    params: *const HeunCheParams,
    family: HeunFamily,
    n_terms: usize,
    has_s0: bool,
    s0: HeunComplex,
    out: *mut *mut HeunSeries,
) -> HeunStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(null());
        }
        let s0 = has_s0.then(|| s0.into());
        let sol = expansions::build_series(&(*params).into(), family.into(), n_terms, None, s0).map_err(fail)?;
        *out = Box::into_raw(Box::new(HeunSeries(sol)));
        Ok(())
    })
}

/// Evaluates the series and its derivative at `z`. Fails with
/// `HEUN_STATUS_TAIL_TOO_LARGE` when the tail estimate exceeds `tol`.
/// `derivative` and `tail` may be NULL.
///
/// # Safety
/// `series` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn heun_series_eval(
    series: *const HeunSeries,
    z: HeunComplex,
    tol: f64,
    value: *mut HeunComplex,
    derivative: *mut HeunComplex,
    tail: *mut f64,
) -> HeunStatus {
    guard(|| {
        if series.is_null() || value.is_null() {
            return Err(null());
        }
        let v = expansions::eval_series(&(*series).0, z.into(), tol).map_err(fail)?;
        *value = v.value.into();
        if !derivative.is_null() {
            *derivative = v.derivative.into();
        }
        if !tail.is_null() {
            *tail = v.tail;
        }
        Ok(())
    })
}

/// Number of stored coefficients (0 for NULL).
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn heun_series_len(series: *const HeunSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.coefficients.len())
}

/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn heun_series_coefficient(series: *const HeunSeries, n: usize, out: *mut HeunComplex) -> HeunStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let a = s.0.coefficients.get(n).ok_or_else(|| {
            set_error(format!("coefficient index {n} out of range"));
            HeunStatus::InvalidArgument
        })?;
        *out = (*a).into();
        Ok(())
    })
}

/// True when the series ends; `*last` (if non-NULL) receives the last
/// nonzero index.
///
/// # Safety
/// `series` must be NULL or a live handle; `last` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn heun_series_terminated(series: *const HeunSeries, last: *mut usize) -> bool {
    match series.as_ref().and_then(|s| s.0.terminated) {
        Some(n) => {
            if !last.is_null() {
                *last = n;
            }
            true
        }
        None => false,
    }
}

/// # Safety
/// `series` must be NULL or a handle from [`heun_series_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn heun_series_free(series: *mut HeunSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Smallest admissible termination condition for the default α₀ branch;
/// `HEUN_STATUS_NOT_FOUND` if none.
///
/// # Safety
/// `params` must point to a valid `HeunCheParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn heun_detect_termination(
    params: *const HeunCheParams,
    family: HeunFamily,
    out: *mut HeunTermination,
) -> HeunStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(null());
        }
        let cond = termination::detect_termination(&(*params).into(), family.into(), None).ok_or_else(|| {
            set_error("no termination condition");
            HeunStatus::NotFound
        })?;
        *out = HeunTermination {
            family: cond.family.into(),
            kind: cond.kind.into(),
            n: cond.n,
        };
        Ok(())
    })
}

/// Roots of `a_{N+1}(q) = 0` for a detected condition (`q` in `params` is
/// ignored). `s0` is read only when `has_s0` is true.
///
/// # Safety
/// `params` and `condition` must point to valid values; `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn heun_q_spectrum(
    params: *const HeunCheParams,
    condition: *const HeunTermination,
    has_s0: bool,
    s0: HeunComplex,
    out: *mut *mut HeunSpectrum,
) -> HeunStatus {
    guard(|| {
        if params.is_null() || condition.is_null() || out.is_null() {
            return Err(null());
        }
        let c = *condition;
        let cond = TerminationCondition {
            family: c.family.into(),
            kind: c.kind.into(),
            n: c.n,
        };
        let s0 = has_s0.then(|| s0.into());
        let sp = termination::q_spectrum_with_s0(&(*params).into(), cond.family, cond, s0).map_err(fail)?;
        *out = Box::into_raw(Box::new(HeunSpectrum(sp)));
        Ok(())
    })
}

/// Number of roots (0 for NULL).
///
/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn heun_spectrum_len(spectrum: *const HeunSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.roots.len())
}

/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn heun_spectrum_root(spectrum: *const HeunSpectrum, k: usize, out: *mut HeunComplex) -> HeunStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let r = s.0.roots.get(k).ok_or_else(|| {
            set_error(format!("root index {k} out of range"));
            HeunStatus::InvalidArgument
        })?;
        *out = (*r).into();
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be NULL or a handle from [`heun_q_spectrum`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn heun_spectrum_free(spectrum: *mut HeunSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}
