use std::ffi::{c_char, CStr, CString};
use std::ptr;

use atmod_ffi::*;

fn fixture(name: &str) -> CString {
    let path = format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn parse(src: &CString) -> *mut AtmodTheory {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { atmod_theory_parse(src.as_ptr(), &mut t) }, AtmodStatus::Ok);
    assert!(!t.is_null());
    t
}

fn take(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { atmod_string_free(s) };
    text
}

/// Looks for a key/value pair in pretty-printed JSON.
fn has(json: &str, key: &str, value: &str) -> bool {
    json.contains(&format!("\"{key}\": {value}"))
}

fn last_error() -> String {
    let p = atmod_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn check_reports_violations() {
    let t = parse(&fixture("yale.at"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { atmod_check_json(t, ptr::null(), &mut out) }, AtmodStatus::Ok);
    let j = take(out);
    assert!(has(&j, "formula", "\"alive\""));
    assert!(has(&j, "crosscheck", "\"pass\""));
    let only = CString::new("PC,PX").unwrap();
    assert_eq!(unsafe { atmod_check_json(t, only.as_ptr(), &mut out) }, AtmodStatus::Ok);
    assert!(!has(&take(out), "satisfied", "false"));
    let bad = CString::new("PQ").unwrap();
    assert_eq!(unsafe { atmod_check_json(t, bad.as_ptr(), &mut out) }, AtmodStatus::InvalidArgument);
    assert!(last_error().contains("PQ"));
    unsafe { atmod_theory_free(t) };
}

#[test]
fn analyze_both_searches() {
    let t = parse(&fixture("coffee.at"));
    let (drink, inexec) = (CString::new("drink").unwrap(), CString::new("inexec").unwrap());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { atmod_analyze_json(t, drink.as_ptr(), inexec.as_ptr(), &mut out) }, AtmodStatus::Ok);
    assert!(has(&take(out), "law", "\"sugar & salt => [drink] false\""));
    let nope = CString::new("fly").unwrap();
    assert_eq!(
        unsafe { atmod_analyze_json(t, nope.as_ptr(), inexec.as_ptr(), &mut out) },
        AtmodStatus::InvalidArgument
    );
    assert_eq!(unsafe { atmod_analyze_json(t, drink.as_ptr(), nope.as_ptr(), &mut out) }, AtmodStatus::InvalidArgument);
    unsafe { atmod_theory_free(t) };
}

#[test]
fn queries() {
    let t = parse(&fixture("shooting.at"));
    let q = CString::new("hasGun => [load] hasGun").unwrap();
    let mut yes = false;
    assert_eq!(unsafe { atmod_query(t, q.as_ptr(), false, &mut yes) }, AtmodStatus::Ok);
    assert!(yes);
    assert_eq!(unsafe { atmod_query(t, q.as_ptr(), true, &mut yes) }, AtmodStatus::Ok);
    assert!(!yes);
    let bad = CString::new("[load").unwrap();
    assert_eq!(unsafe { atmod_query(t, bad.as_ptr(), false, &mut yes) }, AtmodStatus::ParseError);
    unsafe { atmod_theory_free(t) };
}

#[test]
fn error_codes() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { atmod_theory_parse(ptr::null(), &mut t) }, AtmodStatus::NullArgument);
    let src = CString::new("theory x { fluents p; actions a; static { p & ; } }").unwrap();
    assert_eq!(unsafe { atmod_theory_parse(src.as_ptr(), &mut t) }, AtmodStatus::ParseError);
    assert!(t.is_null());
    assert!(last_error().contains("1:"));
    let src = CString::new("theory x { fluents p; actions a; static { p & ~p; } }").unwrap();
    assert_eq!(unsafe { atmod_theory_parse(src.as_ptr(), &mut t) }, AtmodStatus::InvalidTheory);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { atmod_theory_parse(bytes.as_ptr().cast(), &mut t) }, AtmodStatus::InvalidUtf8);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { atmod_check_json(ptr::null(), ptr::null(), &mut out) }, AtmodStatus::NullArgument);
    // a successful call clears the message
    let ok = parse(&fixture("empty.at"));
    assert!(atmod_last_error().is_null());
    unsafe { atmod_theory_free(ok) };
    unsafe { atmod_theory_free(ptr::null_mut()) };
    unsafe { atmod_string_free(ptr::null_mut()) };
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(atmod_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(format!("{}/include/atmod.h", env!("CARGO_MANIFEST_DIR"))).unwrap();
    for name in [
        "atmod_theory_parse",
        "atmod_theory_free",
        "atmod_check_json",
        "atmod_analyze_json",
        "atmod_query",
        "atmod_string_free",
        "atmod_last_error",
        "typedef struct AtmodTheory AtmodTheory",
        "ATMOD_STATUS_RESOURCE",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

/// Compiles a C program against the header and the static library when a C compiler is present.
#[test]
fn c_program_links() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    // the test binary sits in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile = exe.parent().unwrap().parent().unwrap();
    let lib = profile.join("libatmod_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
