//! C ABI for the monobreak analyzer.
//!
//! Handles are opaque: create them with the `*_new` / [`mb_analyze`]
//! functions and release them with the matching `*_free`. Every fallible
//! function returns an [`MbStatus`]; on failure, [`mb_last_error_message`]
//! describes the error for the calling thread.
//!
//! Strings passed in are NUL-terminated UTF-8. Strings handed out by
//! [`mb_analysis_render`] are owned by the caller and must be released with
//! [`mb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use monobreak::{analyze, Analysis, AnalysisOptions, Betweenness, Error, ScanConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Project directory or input file missing or unreadable.
    Io = 3,
    /// Malformed ops data or other invalid input.
    InvalidInput = 4,
    /// Invalid scanner configuration file.
    Config = 5,
    /// Inconsistent options, such as static-only together with ops data.
    Usage = 6,
    /// Internal panic caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbFormat {
    Text = 0,
    Json = 1,
    Dot = 2,
}

/// Analysis settings.
pub struct MbOptions {
    inner: AnalysisOptions,
}

/// A finished analysis.
pub struct MbAnalysis {
    inner: Analysis,
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

fn status_of(err: &Error) -> MbStatus {
    match err {
        Error::ProjectDir { .. } | Error::NotADirectory { .. } | Error::Io { .. } => MbStatus::Io,
        Error::OpsFormat(_) | Error::OpsRecord { .. } | Error::ModulePath(_) | Error::Partition(_) => {
            MbStatus::InvalidInput
        }
        Error::Config { .. } => MbStatus::Config,
        Error::Usage(_) | Error::TooManyServices { .. } => MbStatus::Usage,
    }
}

fn fail(status: MbStatus, msg: impl Into<String>) -> MbStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting panics into [`MbStatus::Panic`].
fn guard(f: impl FnOnce() -> MbStatus) -> MbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(MbStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, MbStatus> {
    if p.is_null() {
        return Err(fail(MbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| fail(MbStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New options with defaults: static analysis, weighted betweenness,
/// best-modularity service count.
#[no_mangle]
pub extern "C" fn mb_options_new() -> *mut MbOptions {
    Box::into_raw(Box::new(MbOptions { inner: AnalysisOptions::default() }))
}

/// # Safety
/// `opts` must be null or a pointer from [`mb_options_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_options_free(opts: *mut MbOptions) {
    if !opts.is_null() {
        drop(Box::from_raw(opts));
    }
}

/// Sets the ops-JSON file to read. Null clears it.
///
/// # Safety
/// `opts` must be a live options handle; `path` null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mb_options_set_ops_path(opts: *mut MbOptions, path: *const c_char) -> MbStatus {
    guard(|| {
        let Some(opts) = opts.as_mut() else {
            return fail(MbStatus::NullPointer, "options handle is null");
        };
        if path.is_null() {
            opts.inner.ops_path = None;
            return MbStatus::Ok;
        }
        match path_arg(path, "ops path") {
            Ok(p) => {
                opts.inner.ops_path = Some(p);
                MbStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `opts` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn mb_options_set_static_only(opts: *mut MbOptions, static_only: bool) -> MbStatus {
    guard(|| match opts.as_mut() {
        Some(o) => {
            o.inner.static_only = static_only;
            MbStatus::Ok
        }
        None => fail(MbStatus::NullPointer, "options handle is null"),
    })
}

/// Requested number of services; 0 selects the best-modularity cut.
///
/// # Safety
/// `opts` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn mb_options_set_services(opts: *mut MbOptions, services: usize) -> MbStatus {
    guard(|| match opts.as_mut() {
        Some(o) => {
            o.inner.services = (services > 0).then_some(services);
            MbStatus::Ok
        }
        None => fail(MbStatus::NullPointer, "options handle is null"),
    })
}

/// # Safety
/// `opts` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn mb_options_set_unweighted_betweenness(opts: *mut MbOptions, unweighted: bool) -> MbStatus {
    guard(|| match opts.as_mut() {
        Some(o) => {
            o.inner.betweenness = if unweighted { Betweenness::Unweighted } else { Betweenness::Weighted };
            MbStatus::Ok
        }
        None => fail(MbStatus::NullPointer, "options handle is null"),
    })
}

/// Loads scanner settings (base-class names, ignored directories) from a
/// TOML file.
///
/// # Safety
/// `opts` must be a live options handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mb_options_load_config(opts: *mut MbOptions, path: *const c_char) -> MbStatus {
    guard(|| {
        let Some(opts) = opts.as_mut() else {
            return fail(MbStatus::NullPointer, "options handle is null");
        };
        let path = match path_arg(path, "config path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match ScanConfig::from_toml_file(&path) {
            Ok(scan) => {
                opts.inner.scan = scan;
                MbStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Analyzes the project at `project_dir`. `opts` may be null for defaults.
/// On success stores a new handle in `*out`; on failure `*out` is null.
///
/// # Safety
/// `project_dir` must be a NUL-terminated string, `opts` null or a live
/// options handle, and `out` a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn mb_analyze(
    project_dir: *const c_char,
    opts: *const MbOptions,
    out: *mut *mut MbAnalysis,
) -> MbStatus {
    guard(|| {
        if out.is_null() {
            return fail(MbStatus::NullPointer, "output pointer is null");
        }
        *out = ptr::null_mut();
        let dir = match path_arg(project_dir, "project directory") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let default = AnalysisOptions::default();
        let options = opts.as_ref().map_or(&default, |o| &o.inner);
        match analyze(&dir, options) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MbAnalysis { inner }));
                MbStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Renders the report (text or JSON) or the dependency graph (DOT). The
/// string stored in `*out` must be released with [`mb_string_free`].
///
/// # Safety
/// `analysis` must be a live analysis handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_analysis_render(
    analysis: *const MbAnalysis,
    format: MbFormat,
    out: *mut *mut c_char,
) -> MbStatus {
    guard(|| {
        if out.is_null() {
            return fail(MbStatus::NullPointer, "output pointer is null");
        }
        *out = ptr::null_mut();
        let Some(a) = analysis.as_ref() else {
            return fail(MbStatus::NullPointer, "analysis handle is null");
        };
        let text = match format {
            MbFormat::Text => a.inner.report.render_text(),
            MbFormat::Json => a.inner.report.render_json(),
            MbFormat::Dot => a.inner.render_dot(),
        };
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                MbStatus::Ok
            }
            Err(_) => fail(MbStatus::InvalidInput, "rendered output contains a NUL byte"),
        }
    })
}

/// Number of proposed services, or 0 for a null handle.
///
/// # Safety
/// `analysis` must be null or a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn mb_analysis_service_count(analysis: *const MbAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.inner.report.services.len())
}

/// Number of warnings collected during the analysis, or 0 for a null handle.
///
/// # Safety
/// `analysis` must be null or a live analysis handle.
#[no_mangle]
pub unsafe extern "C" fn mb_analysis_warning_count(analysis: *const MbAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.inner.report.warnings.len())
}

/// # Safety
/// `analysis` must be null or a handle from [`mb_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_analysis_free(analysis: *mut MbAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// # Safety
/// `s` must be null or a string from [`mb_analysis_render`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
