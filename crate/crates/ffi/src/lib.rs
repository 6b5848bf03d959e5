//! C ABI over `coarse-complex`.
//!
//! Complexes and metric spaces live behind opaque handles created by the
//! `*_parse` functions and released by the matching `*_free`. Every fallible
//! call returns a [`CcStatus`]; on failure the message is kept per thread and
//! can be copied out with [`cc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coarse_complex::complex::AbsoluteComplex;
use coarse_complex::duality::{glue_pair, intersection_form, intersection_form_with, ManifoldPairDescription};
use coarse_complex::hodge::{betti_number, spectral_gap};
use coarse_complex::io::{parse_complex, parse_metric, GlueJson};
use coarse_complex::metric::{gh_distance, lipschitz_distance, lipschitz_top_distance, FiniteMetricSpace};
use coarse_complex::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Internal = 5,
    Panic = 6,
}

/// Opaque cell complex.
pub struct CcComplex(AbsoluteComplex);

/// Opaque finite metric space.
pub struct CcMetric(FiniteMetricSpace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CcStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => CcStatus::Parse,
        e if e.is_validation() => CcStatus::Validation,
        _ => CcStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), CcStatus>) -> CcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside coarse-complex");
            CcStatus::Panic
        }
    }
}

fn lib<T>(r: coarse_complex::Result<T>) -> Result<T, CcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, CcStatus> {
    if s.is_null() {
        set_error("null string");
        return Err(CcStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        CcStatus::InvalidUtf8
    })
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, CcStatus> {
    h.as_ref().ok_or_else(|| {
        set_error("null handle");
        CcStatus::NullPointer
    })
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), CcStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(CcStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parses `.cx` text into a new complex handle.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_parse(src: *const c_char, out: *mut *mut CcComplex) -> CcStatus {
    guard(|| {
        let k = lib(parse_complex(text(src)?))?.into_complex();
        write(out, Box::into_raw(Box::new(CcComplex(k))))
    })
}

/// # Safety
/// `k` must be null or a handle from [`cc_complex_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_free(k: *mut CcComplex) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Number of cells.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_num_cells(k: *const CcComplex, out: *mut usize) -> CcStatus {
    guard(|| write(out, handle(k)?.0.num_cells()))
}

/// Dimension, or -1 for the empty complex.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_dim(k: *const CcComplex, out: *mut i64) -> CcStatus {
    guard(|| write(out, handle(k)?.0.dim().map_or(-1, |d| d as i64)))
}

/// Betti number in degree `q` by exact rank.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_betti(k: *const CcComplex, q: usize, out: *mut usize) -> CcStatus {
    guard(|| write(out, betti_number(&handle(k)?.0, q)))
}

/// Smallest positive eigenvalue of the degree-`q` Laplacian.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_spectral_gap(k: *const CcComplex, q: usize, tol: f64, out: *mut f64) -> CcStatus {
    guard(|| write(out, spectral_gap(&handle(k)?.0, q, tol).gap))
}

/// Signature of a closed oriented complex of dimension divisible by 4, with
/// its first top cell positively oriented.
///
/// # Safety
/// `k` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_complex_signature(k: *const CcComplex, out: *mut i64) -> CcStatus {
    guard(|| write(out, lib(intersection_form(&handle(k)?.0))?.signature))
}

/// Signature of the complex obtained by gluing `core1` to `core0` along the
/// identification in `glue_json` (`{"pairs": [[id1, id0], ...], "orientation": [...]}`).
///
/// # Safety
/// Handles must be live; `glue_json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cc_pair_signature(
    core1: *const CcComplex,
    core0: *const CcComplex,
    glue_json: *const c_char,
    out: *mut i64,
) -> CcStatus {
    guard(|| {
        let g: GlueJson = lib(serde_json::from_str(text(glue_json)?).map_err(Error::from))?;
        let pair = ManifoldPairDescription {
            core1: handle(core1)?.0.clone(),
            core0: handle(core0)?.0.clone(),
            identification: g.pairs,
            orientation: g.orientation,
        };
        let glued = lib(glue_pair(&pair))?;
        write(out, lib(intersection_form_with(&glued.complex, &glued.fundamental))?.signature)
    })
}

/// Parses `.ms` text into a new metric handle.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_metric_parse(src: *const c_char, out: *mut *mut CcMetric) -> CcStatus {
    guard(|| {
        let m = lib(parse_metric(text(src)?))?;
        write(out, Box::into_raw(Box::new(CcMetric(m))))
    })
}

/// # Safety
/// `m` must be null or a handle from [`cc_metric_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_metric_free(m: *mut CcMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_metric_len(m: *const CcMetric, out: *mut usize) -> CcStatus {
    guard(|| write(out, handle(m)?.0.len()))
}

/// Bracket `[lower, upper]` of the Gromov-Hausdorff distance, of width at
/// most `tol`.
///
/// # Safety
/// Handles must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cc_gh_distance(
    x: *const CcMetric,
    y: *const CcMetric,
    tol: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> CcStatus {
    guard(|| {
        let r = lib(gh_distance(&handle(x)?.0, &handle(y)?.0, tol))?;
        write(lower, r.lower_f64())?;
        write(upper, r.upper_f64())
    })
}

/// Lipschitz distance by exhaustive enumeration of map pairs.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_lipschitz_distance(
    x: *const CcMetric,
    y: *const CcMetric,
    max_size: usize,
    out: *mut f64,
) -> CcStatus {
    guard(|| write(out, lib(lipschitz_distance(&handle(x)?.0, &handle(y)?.0, max_size))?))
}

/// Lipschitz distance over bijections; infinity when the sizes differ.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_lipschitz_top_distance(x: *const CcMetric, y: *const CcMetric, out: *mut f64) -> CcStatus {
    guard(|| write(out, lib(lipschitz_top_distance(&handle(x)?.0, &handle(y)?.0))?))
}
