//! C ABI over the `lunmeb` library.
//!
//! Bases are opaque [`LunmebBasis`] handles created by
//! [`lunmeb_basis_build_cyclic`] or [`lunmeb_basis_from_json`] and released
//! with [`lunmeb_basis_free`]. Every fallible call returns a [`LunmebStatus`];
//! on failure [`lunmeb_last_error`] describes what went wrong.
//!
//! Complex matrices cross the boundary as `2 * d * d` doubles, row-major, with
//! real and imaginary parts interleaved.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lunmeb::bipartite::SchmidtVector;
use lunmeb::cli::{exit_code_for, EXIT_VALIDATION};
use lunmeb::io::BasisFile;
use lunmeb::linalg::{c, Matrix, Tolerance};
use lunmeb::lunmeb::{
    build_cyclic_basis, extend, make_extension_problem, verify_candidate, BasisCandidate,
    SearchMethod, SearchParams,
};
use lunmeb::weyl::{weyl_operator, WeylIndex};
use lunmeb::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LunmebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The input was well formed but failed a mathematical check.
    Validation = 3,
    /// The extension search ended without a result.
    NotFound = 4,
    Parse = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LunmebMethod {
    AlternatingProjection = 0,
    ResidualDescent = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LunmebTolerance {
    pub verify_tol: f64,
    pub search_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LunmebSearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed_value: u64,
    pub method: LunmebMethod,
    pub tol: LunmebTolerance,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LunmebVerifyReport {
    pub size: usize,
    pub all_non_maximal: bool,
    pub orthonormal: bool,
    pub max_offdiagonal: f64,
    pub max_diagonal_deviation: f64,
    pub locally_connected: bool,
    pub disconnected_pairs: usize,
    pub max_connector_error: f64,
    pub all_pass: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LunmebExtendResult {
    pub found: bool,
    pub residual: f64,
    pub best_residual: f64,
    pub restarts_used: usize,
    pub iterations_total: usize,
}

/// Opaque basis handle.
pub struct LunmebBasis {
    inner: BasisCandidate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_for(err: &Error) -> LunmebStatus {
    match err {
        Error::Format(_) | Error::Io(_) => LunmebStatus::Parse,
        e if exit_code_for(e) == EXIT_VALIDATION => LunmebStatus::Validation,
        _ => LunmebStatus::InvalidArgument,
    }
}

fn fail(status: LunmebStatus, msg: impl Into<String>) -> LunmebStatus {
    set_last_error(msg);
    status
}

fn from_error(err: Error) -> LunmebStatus {
    fail(status_for(&err), err.to_string())
}

/// Runs `f`, converting panics into [`LunmebStatus::Panic`].
fn guard(f: impl FnOnce() -> LunmebStatus) -> LunmebStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(LunmebStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn tolerance(tol: *const LunmebTolerance) -> Result<Tolerance, Error> {
    match unsafe { tol.as_ref() } {
        None => Ok(Tolerance::default()),
        Some(t) => Tolerance::new(t.verify_tol, t.search_tol),
    }
}

fn write_matrix(m: &Matrix, out: *mut f64, out_len: usize) -> LunmebStatus {
    let need = 2 * m.rows() * m.cols();
    if out.is_null() {
        return fail(LunmebStatus::NullPointer, "output buffer is null");
    }
    if out_len < need {
        return fail(
            LunmebStatus::InvalidArgument,
            format!("output buffer holds {out_len} doubles, need {need}"),
        );
    }
    let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
    for (pair, z) in buf.chunks_exact_mut(2).zip(m.as_slice()) {
        pair[0] = z.re;
        pair[1] = z.im;
    }
    LunmebStatus::Ok
}

fn read_matrix(data: *const f64, len: usize, d: usize) -> Result<Matrix, LunmebStatus> {
    if data.is_null() {
        return Err(fail(LunmebStatus::NullPointer, "matrix buffer is null"));
    }
    if len != 2 * d * d {
        return Err(fail(
            LunmebStatus::InvalidArgument,
            format!("matrix buffer has {len} doubles, expected {}", 2 * d * d),
        ));
    }
    let buf = unsafe { std::slice::from_raw_parts(data, len) };
    let entries = buf.chunks_exact(2).map(|p| c(p[0], p[1])).collect();
    Matrix::from_row_major(d, d, entries).map_err(from_error)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lunmeb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lunmeb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn lunmeb_default_tolerance() -> LunmebTolerance {
    let t = Tolerance::default();
    LunmebTolerance {
        verify_tol: t.verify_tol,
        search_tol: t.search_tol,
    }
}

#[no_mangle]
pub extern "C" fn lunmeb_default_search_params() -> LunmebSearchParams {
    let p = SearchParams::default();
    LunmebSearchParams {
        restarts: p.restarts,
        max_iters: p.max_iters,
        seed_value: p.seed_value,
        method: LunmebMethod::AlternatingProjection,
        tol: lunmeb_default_tolerance(),
    }
}

/// Builds the cyclic basis for the Schmidt coefficients `schmidt[0..d]`,
/// which are normalised first. `tol` may be null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_build_cyclic(
    schmidt: *const f64,
    d: usize,
    tol: *const LunmebTolerance,
    out: *mut *mut LunmebBasis,
) -> LunmebStatus {
    guard(|| {
        if schmidt.is_null() || out.is_null() {
            return fail(LunmebStatus::NullPointer, "null argument");
        }
        if d == 0 {
            return fail(LunmebStatus::InvalidArgument, "d must be positive");
        }
        let raw = unsafe { std::slice::from_raw_parts(schmidt, d) };
        let built = tolerance(tol).and_then(|t| {
            let seed = SchmidtVector::normalized(raw)?;
            build_cyclic_basis(&seed, &t)
        });
        match built {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(LunmebBasis { inner })) };
                LunmebStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_free(basis: *mut LunmebBasis) {
    if !basis.is_null() {
        drop(unsafe { Box::from_raw(basis) });
    }
}

/// Local dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_dim(basis: *const LunmebBasis) -> usize {
    unsafe { basis.as_ref() }.map_or(0, |b| b.inner.d())
}

/// Number of members, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_len(basis: *const LunmebBasis) -> usize {
    unsafe { basis.as_ref() }.map_or(0, |b| b.inner.len())
}

/// Copies generator `index` into `out`, which must hold `2 * d * d` doubles.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_generator(
    basis: *const LunmebBasis,
    index: usize,
    out: *mut f64,
    out_len: usize,
) -> LunmebStatus {
    guard(|| {
        let Some(b) = (unsafe { basis.as_ref() }) else {
            return fail(LunmebStatus::NullPointer, "basis is null");
        };
        match b.inner.generators().get(index) {
            Some(g) => write_matrix(g, out, out_len),
            None => fail(
                LunmebStatus::InvalidArgument,
                format!(
                    "generator index {index} out of range (len {})",
                    b.inner.len()
                ),
            ),
        }
    })
}

/// Checks orthonormality, non-maximality and pairwise local connection. The
/// return value is `OK` whenever the check ran; inspect `all_pass`.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_verify(
    basis: *const LunmebBasis,
    tol: *const LunmebTolerance,
    out: *mut LunmebVerifyReport,
) -> LunmebStatus {
    guard(|| {
        let (Some(b), false) = (unsafe { basis.as_ref() }, out.is_null()) else {
            return fail(LunmebStatus::NullPointer, "null argument");
        };
        match tolerance(tol).and_then(|t| verify_candidate(&b.inner, &t)) {
            Ok(r) => {
                unsafe {
                    *out = LunmebVerifyReport {
                        size: r.size,
                        all_non_maximal: r.all_non_maximal,
                        orthonormal: r.orthonormal,
                        max_offdiagonal: r.max_offdiagonal,
                        max_diagonal_deviation: r.max_diagonal_deviation,
                        locally_connected: r.locally_connected,
                        disconnected_pairs: r.disconnected_pairs,
                        max_connector_error: r.max_connector_error,
                        all_pass: r.all_pass(),
                    }
                };
                LunmebStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Searches for a unitary extending the basis by one member.
///
/// `params` may be null for the defaults. `result` is always filled when the
/// search ran. On `OK` the unitary is written to `out_v` if it is non-null
/// (`2 * d * d` doubles); `NOT_FOUND` means the search gave up, which is not a
/// proof that no extension exists. The basis itself is left unchanged.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_extend(
    basis: *const LunmebBasis,
    params: *const LunmebSearchParams,
    result: *mut LunmebExtendResult,
    out_v: *mut f64,
    out_len: usize,
) -> LunmebStatus {
    guard(|| {
        let (Some(b), false) = (unsafe { basis.as_ref() }, result.is_null()) else {
            return fail(LunmebStatus::NullPointer, "null argument");
        };
        let p = match unsafe { params.as_ref() } {
            None => SearchParams::default(),
            Some(p) => match Tolerance::new(p.tol.verify_tol, p.tol.search_tol) {
                Ok(tol) => SearchParams {
                    restarts: p.restarts,
                    max_iters: p.max_iters,
                    tol,
                    seed_value: p.seed_value,
                    method: match p.method {
                        LunmebMethod::AlternatingProjection => SearchMethod::AlternatingProjection,
                        LunmebMethod::ResidualDescent => SearchMethod::ResidualDescent,
                    },
                },
                Err(e) => return from_error(e),
            },
        };
        let outcome = match make_extension_problem(&b.inner).and_then(|prob| extend(&prob, &p)) {
            Ok(o) => o,
            Err(e) => return from_error(e),
        };
        unsafe {
            *result = LunmebExtendResult {
                found: outcome.is_found(),
                residual: outcome.residual,
                best_residual: outcome.best_residual,
                restarts_used: outcome.restarts_used,
                iterations_total: outcome.iterations_total,
            }
        };
        match outcome.v {
            Some(v) if !out_v.is_null() => write_matrix(&v, out_v, out_len),
            Some(_) => LunmebStatus::Ok,
            None => fail(
                LunmebStatus::NotFound,
                format!(
                    "no extension found (best residual {:e})",
                    outcome.best_residual
                ),
            ),
        }
    })
}

/// Appends the member generated by the unitary in `v` (`2 * d * d` doubles).
/// Orthogonality is not checked here; call [`lunmeb_basis_verify`].
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_append(
    basis: *mut LunmebBasis,
    v: *const f64,
    len: usize,
    tol: *const LunmebTolerance,
) -> LunmebStatus {
    guard(|| {
        let Some(b) = (unsafe { basis.as_mut() }) else {
            return fail(LunmebStatus::NullPointer, "basis is null");
        };
        let m = match read_matrix(v, len, b.inner.d()) {
            Ok(m) => m,
            Err(status) => return status,
        };
        match tolerance(tol).and_then(|t| b.inner.push_generator(m, &t)) {
            Ok(()) => LunmebStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Parses a JSON basis file. `tol` may be null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_from_json(
    json: *const c_char,
    tol: *const LunmebTolerance,
    out: *mut *mut LunmebBasis,
) -> LunmebStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(LunmebStatus::NullPointer, "null argument");
        }
        let Ok(text) = unsafe { CStr::from_ptr(json) }.to_str() else {
            return fail(LunmebStatus::Parse, "JSON is not valid UTF-8");
        };
        let parsed = tolerance(tol).and_then(|t| BasisFile::from_json(text)?.to_candidate(&t));
        match parsed {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(LunmebBasis { inner })) };
                LunmebStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Serialises the basis. Release the string with [`lunmeb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lunmeb_basis_to_json(
    basis: *const LunmebBasis,
    out: *mut *mut c_char,
) -> LunmebStatus {
    guard(|| {
        let (Some(b), false) = (unsafe { basis.as_ref() }, out.is_null()) else {
            return fail(LunmebStatus::NullPointer, "null argument");
        };
        let text = BasisFile::from_candidate(&b.inner).to_json();
        let s = CString::new(text).expect("JSON contains no NUL bytes");
        unsafe { *out = s.into_raw() };
        LunmebStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn lunmeb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Writes the Weyl operator `U_{nm}` of dimension `d` into `out`.
#[no_mangle]
pub unsafe extern "C" fn lunmeb_weyl_operator(
    d: usize,
    n: usize,
    m: usize,
    out: *mut f64,
    out_len: usize,
) -> LunmebStatus {
    guard(|| match WeylIndex::new(n, m, d) {
        Ok(idx) => write_matrix(&weyl_operator(idx), out, out_len),
        Err(e) => from_error(e),
    })
}
