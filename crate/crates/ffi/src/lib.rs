//! C ABI for atmod.
//!
//! Theories live behind the opaque `AtmodTheory` handle. Functions return an
//! `AtmodStatus`; on failure `atmod_last_error` describes the problem. Strings
//! handed out by the library are released with `atmod_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use atmod::analysis::{AnalysisError, Options, Postulate};
use atmod::kripke::{entails_dep, entails_pdl};
use atmod::report::{analysis_json, analyze, diagnose, render_json, DiagnoseOptions, Search};
use atmod::{parse_query, parse_theory, validate, ActionTheory};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtmodStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidTheory = 4,
    InvalidArgument = 5,
    Resource = 6,
    Internal = 7,
    Panic = 8,
}

/// A parsed, well-formed action theory.
pub struct AtmodTheory {
    theory: ActionTheory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AtmodStatus, String);

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Failure {
        let status = if e.is_resource() {
            AtmodStatus::Resource
        } else if matches!(e, AnalysisError::Disagreement { .. }) {
            AtmodStatus::Internal
        } else {
            AtmodStatus::InvalidArgument
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `body`, recording any failure or panic for `atmod_last_error`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AtmodStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AtmodStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AtmodStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AtmodStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(AtmodStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn theory<'a>(t: *const AtmodTheory) -> Result<&'a ActionTheory, Failure> {
    t.as_ref().map(|h| &h.theory).ok_or_else(|| Failure(AtmodStatus::NullArgument, "theory is null".into()))
}

unsafe fn hand_out(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(AtmodStatus::NullArgument, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|e| Failure(AtmodStatus::Internal, e.to_string()))?.into_raw();
    Ok(())
}

/// Parses and validates `source`, storing a new handle in `*out`.
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn atmod_theory_parse(source: *const c_char, out: *mut *mut AtmodTheory) -> AtmodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(AtmodStatus::NullArgument, "output pointer is null".into()));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let t = parse_theory(src).map_err(|e| Failure(AtmodStatus::ParseError, e.to_string()))?;
        let bad = validate(&t);
        if !bad.is_empty() {
            let msg = bad.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n");
            return Err(Failure(AtmodStatus::InvalidTheory, msg));
        }
        *out = Box::into_raw(Box::new(AtmodTheory { theory: t }));
        Ok(())
    })
}

/// Releases a handle from `atmod_theory_parse`; null is ignored.
///
/// # Safety
/// `t` must come from `atmod_theory_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn atmod_theory_free(t: *mut AtmodTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Checks postulates and writes the JSON report to `*out`.
///
/// `postulates` is a comma-separated list such as `"PS,PI"`; null selects the default suite.
/// Violations are part of the report and still return `Ok`.
///
/// # Safety
/// Pointers must be valid; `postulates` may be null.
#[no_mangle]
pub unsafe extern "C" fn atmod_check_json(
    t: *const AtmodTheory,
    postulates: *const c_char,
    out: *mut *mut c_char,
) -> AtmodStatus {
    guard(|| {
        let t = theory(t)?;
        let postulates = if postulates.is_null() {
            Postulate::DEFAULT.to_vec()
        } else {
            text(postulates, "postulates")?
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    Postulate::parse(p).ok_or_else(|| {
                        Failure(AtmodStatus::InvalidArgument, format!("unknown postulate `{}`", p.trim()))
                    })
                })
                .collect::<Result<_, _>>()?
        };
        let d = diagnose(t, &DiagnoseOptions { analysis: Options::default(), postulates, bound: 2 })?;
        if d.oracle.crosscheck == "fail" {
            return Err(Failure(AtmodStatus::Internal, d.oracle.failures.join("; ")));
        }
        hand_out(render_json(&d), out)
    })
}

/// Runs the `"static"` or `"inexec"` search for `action` and writes the findings as JSON.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn atmod_analyze_json(
    t: *const AtmodTheory,
    action: *const c_char,
    search: *const c_char,
    out: *mut *mut c_char,
) -> AtmodStatus {
    guard(|| {
        let t = theory(t)?;
        let action = text(action, "action")?;
        let kind = text(search, "search")?;
        let search = Search::parse(kind)
            .ok_or_else(|| Failure(AtmodStatus::InvalidArgument, format!("unknown search `{kind}`")))?;
        t.action_index(action).map_err(|e| Failure(AtmodStatus::InvalidArgument, e.to_string()))?;
        let a = analyze(t, action, search, &Options::default())?;
        hand_out(analysis_json(t, action, search, &a.rows), out)
    })
}

/// Decides whether the theory entails `query`, in plain modal logic when `pdl` is set.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn atmod_query(
    t: *const AtmodTheory,
    query: *const c_char,
    pdl: bool,
    entailed: *mut bool,
) -> AtmodStatus {
    guard(|| {
        let t = theory(t)?;
        let q = parse_query(text(query, "query")?).map_err(|e| Failure(AtmodStatus::ParseError, e.to_string()))?;
        if entailed.is_null() {
            return Err(Failure(AtmodStatus::NullArgument, "output pointer is null".into()));
        }
        let got = if pdl { entails_pdl(t, &q) } else { entails_dep(t, &q) };
        *entailed = got.map_err(|e| Failure::from(AnalysisError::from(e)))?;
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn atmod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message for the last failure on this thread, or null.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn atmod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn atmod_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
