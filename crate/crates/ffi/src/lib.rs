//! C ABI for picknorm.
//!
//! Every entry point returns a [`PnStatus`]; on failure the thread-local
//! message from [`pn_last_error_message`] explains it. Handles are opaque and
//! owned by the caller until passed to the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use picknorm::cli::{CliError, ProblemFile, ResultDocument};
use picknorm::gleason::{self, DEFAULT_DISTANCE_TOLERANCE, DEFAULT_PART_SLACK};
use picknorm::{compute_np_norm, Error, InterpolationProblem, NormResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed problem: parse error, bad site, duplicate, length mismatch.
    Invalid = 3,
    /// The solver gave up; a partial result may still have been returned.
    Stall = 4,
    Panic = 5,
}

/// A validated interpolation problem.
pub struct PnProblem {
    file: ProblemFile,
    problem: InterpolationProblem,
}

/// A certified bracket for the NP norm.
pub struct PnResult {
    doc: ResultDocument,
    result: NormResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &CliError) -> PnStatus {
    match e {
        CliError::Invalid(_) | CliError::Io(_) => PnStatus::Invalid,
        CliError::Stall(_) => PnStatus::Stall,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), (PnStatus, String)>) -> PnStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PnStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (PnStatus, String)> {
    if s.is_null() {
        return Err((PnStatus::NullPointer, "null string argument".into()));
    }
    // SAFETY: the caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|e| (PnStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> Result<*mut c_char, (PnStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| (PnStatus::Panic, e.to_string()))
}

fn cli_err(e: CliError) -> (PnStatus, String) {
    (status_of(&e), e.to_string())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next `pn_` call on the same thread.
#[no_mangle]
pub extern "C" fn pn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a problem document (the CLI's JSON problem-file format).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_problem_from_json(json: *const c_char, out: *mut *mut PnProblem) -> PnStatus {
    guarded(|| {
        if out.is_null() {
            return Err((PnStatus::NullPointer, "null output pointer".into()));
        }
        // SAFETY: forwarded caller contract.
        let text = unsafe { read_str(json) }?;
        let file = ProblemFile::parse(text).map_err(cli_err)?;
        let problem = file.problem(None).map_err(cli_err)?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(PnProblem { file, problem })) };
        Ok(())
    })
}

/// Number of interpolation sites.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_problem_len(problem: *const PnProblem) -> usize {
    // SAFETY: caller contract.
    unsafe { problem.as_ref() }.map_or(0, |p| p.problem.sites.len())
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pn_problem_free(problem: *mut PnProblem) {
    if !problem.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Brackets the NP norm. `tolerance <= 0` keeps the problem's own tolerance.
/// On [`PnStatus::Stall`] `*out` holds the best partial bracket when one
/// exists and is null otherwise.
///
/// # Safety
/// `problem` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_compute(problem: *const PnProblem, tolerance: f64, out: *mut *mut PnResult) -> PnStatus {
    guarded(|| {
        if out.is_null() {
            return Err((PnStatus::NullPointer, "null output pointer".into()));
        }
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = ptr::null_mut() };
        // SAFETY: caller contract.
        let p = unsafe { problem.as_ref() }.ok_or((PnStatus::NullPointer, "null problem".to_string()))?;
        let mut ip = p.problem.clone();
        if tolerance > 0.0 {
            ip = ip.with_tolerance(tolerance);
        }
        let (result, stalled, reason) = match compute_np_norm(&ip) {
            Ok(r) => (r, false, String::new()),
            Err(Error::SolverStall { partial: Some(r), reason }) => (*r, true, reason),
            Err(e) => return Err(cli_err(e.into())),
        };
        let doc = ResultDocument::new(&p.file, &ip, &result, stalled);
        // SAFETY: as above.
        unsafe { *out = Box::into_raw(Box::new(PnResult { doc, result })) };
        if stalled {
            Err((PnStatus::Stall, format!("solver stalled: {reason}")))
        } else {
            Ok(())
        }
    })
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_result_lower(result: *const PnResult) -> f64 {
    // SAFETY: caller contract.
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.result.lower)
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_result_upper(result: *const PnResult) -> f64 {
    // SAFETY: caller contract.
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.result.upper)
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_result_iterations(result: *const PnResult) -> usize {
    // SAFETY: caller contract.
    unsafe { result.as_ref() }.map_or(0, |r| r.result.iterations)
}

/// 1 when the bracket is a partial result from a stalled solve.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pn_result_stalled(result: *const PnResult) -> i32 {
    // SAFETY: caller contract.
    unsafe { result.as_ref() }.map_or(0, |r| r.doc.stalled as i32)
}

/// Full result document as JSON; free with [`pn_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_result_to_json(result: *const PnResult, out: *mut *mut c_char) -> PnStatus {
    guarded(|| {
        if out.is_null() {
            return Err((PnStatus::NullPointer, "null output pointer".into()));
        }
        // SAFETY: caller contract.
        let r = unsafe { result.as_ref() }.ok_or((PnStatus::NullPointer, "null result".to_string()))?;
        let text = serde_json::to_string_pretty(&r.doc).map_err(|e| (PnStatus::Panic, e.to_string()))?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = into_c_string(text)? };
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pn_result_free(result: *mut PnResult) {
    if !result.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Gleason distance matrix and partition of the problem's sites as JSON;
/// `theorem4 != 0` appends the consistency report. Free with
/// [`pn_string_free`].
///
/// # Safety
/// `problem` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pn_gleason_json(problem: *const PnProblem, theorem4: i32, out: *mut *mut c_char) -> PnStatus {
    guarded(|| {
        if out.is_null() {
            return Err((PnStatus::NullPointer, "null output pointer".into()));
        }
        // SAFETY: caller contract.
        let p = unsafe { problem.as_ref() }.ok_or((PnStatus::NullPointer, "null problem".to_string()))?;
        let tol = p.file.tolerance.unwrap_or(DEFAULT_DISTANCE_TOLERANCE);
        let backend = &p.problem.backend;
        let sites = &p.problem.sites;
        let mut report = gleason::part_partition(backend, sites, DEFAULT_PART_SLACK, tol)
            .map_err(|e| cli_err(e.into()))?;
        if theorem4 != 0 {
            report.theorem4 = Some(gleason::theorem4_check(backend, sites, tol).map_err(|e| cli_err(e.into()))?);
        }
        let text = serde_json::to_string_pretty(&report).map_err(|e| (PnStatus::Panic, e.to_string()))?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = into_c_string(text)? };
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pn_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}
