//! C ABI over the `gaussbound` core.
//!
//! Covariance matrices cross the boundary as opaque `GbCovariance` handles
//! owned by the caller and released with `gb_covariance_free`. Matrices are
//! exchanged row-major in interleaved `(q1, p1, q2, p2, ...)` order and mode
//! indices are 0-based. Every fallible call returns a `GbStatus`; after a
//! non-OK status `gb_last_error_message` describes the failure on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gaussbound::bound_family::{self, BoundFamilyParams};
use gaussbound::separability::{self, ClassifyOptions, EntanglementClass, SEPARABILITY_TOL};
use gaussbound::{circuit, decomposition, fixtures, gaussian};
use gaussbound::{Bipartition, CovarianceMatrix, Error, Ordering};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbStatus {
    Ok = 0,
    /// Null pointer or out-of-range argument.
    InvalidArgument = 1,
    /// Input rejected by the library (shape, symmetry, validity, parameters).
    InvalidInput = 2,
    /// Solver or decomposition failed numerically.
    Numerical = 3,
    /// Separability could not be decided within tolerance.
    Inconclusive = 4,
    /// Output buffer too short; the required length was written back.
    BufferTooSmall = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbClass {
    Separable = 0,
    BoundEntangled = 1,
    FreeEntangled = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbVerdict {
    pub kind: GbClass,
    pub ppt_margin: f64,
    /// NaN when the PPT test alone decided.
    pub slack: f64,
    pub iterations: usize,
}

/// Opaque covariance matrix.
pub struct GbCovariance {
    inner: CovarianceMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GbStatus {
    match e {
        Error::Inconclusive { .. } => GbStatus::Inconclusive,
        Error::SingularGamma | Error::NoBracket(_) | Error::NotConverged(_) | Error::NumericalFailure(_) => {
            GbStatus::Numerical
        }
        _ => GbStatus::InvalidInput,
    }
}

enum Fail {
    Arg(&'static str),
    Lib(Error),
    Short,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GbStatus::Ok,
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            GbStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Short)) => {
            set_error("output buffer too small");
            GbStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic");
            GbStatus::Panic
        }
    }
}

unsafe fn handle<'a>(h: *const GbCovariance) -> Result<&'a CovarianceMatrix, Fail> {
    h.as_ref().map(|h| &h.inner).ok_or(Fail::Arg("null covariance handle"))
}

unsafe fn store(out: *mut *mut GbCovariance, g: CovarianceMatrix) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Arg("null output pointer"));
    }
    *out = Box::into_raw(Box::new(GbCovariance { inner: g.reorder(Ordering::Interleaved) }));
    Ok(())
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Arg("null output pointer"));
    }
    *out = v;
    Ok(())
}

/// Copy `values` into `buf` of capacity `*len`; `*len` receives the number
/// of values either way.
unsafe fn write_slice(values: &[f64], buf: *mut f64, len: *mut usize) -> Result<(), Fail> {
    if len.is_null() {
        return Err(Fail::Arg("null length pointer"));
    }
    let cap = *len;
    *len = values.len();
    if cap < values.len() {
        return Err(Fail::Short);
    }
    if buf.is_null() {
        return Err(Fail::Arg("null buffer"));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

unsafe fn partition(modes_a: *const usize, n_a: usize, n_modes: usize) -> Result<Bipartition, Fail> {
    if n_a > 0 && modes_a.is_null() {
        return Err(Fail::Arg("null mode list"));
    }
    let a: Vec<usize> = if n_a == 0 { Vec::new() } else { std::slice::from_raw_parts(modes_a, n_a).to_vec() };
    let b = (0..n_modes).filter(|m| !a.contains(m)).collect();
    Ok(Bipartition::new(a, b, n_modes)?)
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gb_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}

/// Covariance matrix from `(2 n_modes)^2` row-major interleaved entries.
///
/// # Safety
/// `data` must point to `4 * n_modes * n_modes` readable doubles and `out`
/// to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gb_covariance_new(n_modes: usize, data: *const f64, out: *mut *mut GbCovariance) -> GbStatus {
    guard(|| {
        if n_modes == 0 || data.is_null() {
            return Err(Fail::Arg("need at least one mode and a data pointer"));
        }
        let dim = 2 * n_modes;
        let values = std::slice::from_raw_parts(data, dim * dim);
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, values);
        store(out, CovarianceMatrix::interleaved(m)?)
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gb_covariance_free(h: *mut GbCovariance) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gb_covariance_copy(h: *const GbCovariance, out: *mut *mut GbCovariance) -> GbStatus {
    guard(|| store(out, handle(h)?.clone()))
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_covariance_n_modes(h: *const GbCovariance) -> usize {
    h.as_ref().map_or(0, |h| h.inner.n_modes())
}

/// Row-major entries into `buf`; `*len` holds the capacity on entry and the
/// required length on return.
///
/// # Safety
/// `h` must be a live handle, `len` writable and `buf` writable for `*len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gb_covariance_data(h: *const GbCovariance, buf: *mut f64, len: *mut usize) -> GbStatus {
    guard(|| {
        let m = handle(h)?.matrix();
        let rows: Vec<f64> = m.transpose().iter().copied().collect();
        write_slice(&rows, buf, len)
    })
}

/// One of the four published family members, `k` in 1..=4.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_preset_example(k: u32, out: *mut *mut GbCovariance) -> GbStatus {
    guard(|| {
        if !(1..=4).contains(&k) {
            return Err(Fail::Arg("example index must be 1..4"));
        }
        store(out, bound_family::construct(&fixtures::example_params(k as usize))?)
    })
}

/// Family member for `beta[2]` and `alpha[8]`.
///
/// # Safety
/// `beta` and `alpha` must point to 2 and 8 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_family_construct(
    beta: *const f64,
    alpha: *const f64,
    out: *mut *mut GbCovariance,
) -> GbStatus {
    guard(|| {
        if beta.is_null() || alpha.is_null() {
            return Err(Fail::Arg("null parameter array"));
        }
        let mut b = [0.0; 2];
        let mut a = [0.0; 8];
        b.copy_from_slice(std::slice::from_raw_parts(beta, 2));
        a.copy_from_slice(std::slice::from_raw_parts(alpha, 8));
        store(out, bound_family::construct(&BoundFamilyParams::new(b, a))?)
    })
}

/// Output of the preparation circuit for thermal parameter `kappa` and
/// squeezing `tau`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_fig1_output(kappa: f64, tau: f64, out: *mut *mut GbCovariance) -> GbStatus {
    guard(|| store(out, circuit::fig1_output(kappa, tau)?))
}

/// Uncertainty-relation test; `tol <= 0` selects the default tolerance.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gb_is_valid(h: *const GbCovariance, tol: f64, out: *mut bool) -> GbStatus {
    guard(|| {
        let g = handle(h)?;
        let tol = if tol > 0.0 { tol } else { g.default_tol() };
        write_out(out, gaussian::is_valid_covariance(g, tol).holds)
    })
}

/// PPT test with party A given by `n_a` 0-based modes; B is the rest.
///
/// # Safety
/// `h` must be a live handle, `modes_a` readable for `n_a` entries and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gb_is_ppt(
    h: *const GbCovariance,
    modes_a: *const usize,
    n_a: usize,
    tol: f64,
    out: *mut bool,
) -> GbStatus {
    guard(|| {
        let g = handle(h)?;
        let part = partition(modes_a, n_a, g.n_modes())?;
        let tol = if tol > 0.0 { tol } else { g.default_tol() };
        write_out(out, gaussian::is_ppt(g, &part, tol)?.holds)
    })
}

/// Full classification. Non-positive tolerances select the defaults.
///
/// # Safety
/// As for `gb_is_ppt`.
#[no_mangle]
pub unsafe extern "C" fn gb_classify(
    h: *const GbCovariance,
    modes_a: *const usize,
    n_a: usize,
    tol_sep: f64,
    tol_ppt: f64,
    out: *mut GbVerdict,
) -> GbStatus {
    guard(|| {
        let g = handle(h)?;
        let part = partition(modes_a, n_a, g.n_modes())?;
        let opts = ClassifyOptions {
            tol_sep: if tol_sep > 0.0 { tol_sep } else { SEPARABILITY_TOL },
            tol_ppt: (tol_ppt > 0.0).then_some(tol_ppt),
            ..ClassifyOptions::default()
        };
        let v = separability::classify(g, &part, &opts)?;
        write_out(
            out,
            GbVerdict {
                kind: match v.class {
                    EntanglementClass::Separable => GbClass::Separable,
                    EntanglementClass::BoundEntangled => GbClass::BoundEntangled,
                    EntanglementClass::FreeEntangled => GbClass::FreeEntangled,
                },
                ppt_margin: v.ppt_margin,
                slack: v.separability_slack.unwrap_or(f64::NAN),
                iterations: v.iterations,
            },
        )
    })
}

/// Symplectic eigenvalues in ascending order; `*len` as for
/// `gb_covariance_data`.
///
/// # Safety
/// As for `gb_covariance_data`.
#[no_mangle]
pub unsafe extern "C" fn gb_symplectic_eigenvalues(h: *const GbCovariance, buf: *mut f64, len: *mut usize) -> GbStatus {
    guard(|| {
        let nu = decomposition::symplectic_eigenvalues(handle(h)?)?;
        write_slice(&nu, buf, len)
    })
}
