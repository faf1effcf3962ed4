use std::ffi::{c_char, CStr, CString};
use std::ptr;

use anticyc_ffi::*;
use serde_json::Value;

const TOY_WEIGHT: &str = r#"{"n":1,"mu":[2,-2],"lambda":[0]}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_json(ptr: *mut c_char) -> Value {
    assert!(!ptr.is_null());
    let value = serde_json::from_str(CStr::from_ptr(ptr).to_str().unwrap()).unwrap();
    ac_string_free(ptr);
    value
}

fn last_error() -> String {
    let ptr = ac_last_error();
    assert!(!ptr.is_null());
    unsafe { CStr::from_ptr(ptr) }.to_string_lossy().into_owned()
}

#[test]
fn crit_reports_the_critical_range() {
    let mut out = ptr::null_mut();
    let weight = cstr(r#"{"n":1,"mu":[0,-5],"lambda":[0]}"#);
    assert_eq!(unsafe { ac_crit(weight.as_ptr(), &mut out) }, AcStatus::Ok);
    let report = unsafe { take_json(out) };
    assert!(report["crit"].is_array());
    assert!(ac_last_error().is_null());
}

#[test]
fn errors_carry_status_and_message() {
    let mut out = ptr::null_mut();
    let bad = cstr(r#"{"n":1,"mu":[0]}"#);
    assert_eq!(unsafe { ac_crit(bad.as_ptr(), &mut out) }, AcStatus::Schema);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let garbage = cstr("not json");
    assert_eq!(unsafe { ac_crit(garbage.as_ptr(), &mut out) }, AcStatus::Schema);
    assert_eq!(unsafe { ac_crit(ptr::null(), &mut out) }, AcStatus::NullArgument);
    assert!(last_error().contains("weight_json"));

    let mut model = ptr::null_mut();
    let name = cstr("no-such-model");
    assert_ne!(unsafe { ac_model_load_bundled(name.as_ptr(), &mut model) }, AcStatus::Ok);
    assert!(model.is_null());
    assert_eq!(unsafe { ac_verify_criterion(0, &mut out) }, AcStatus::Precondition);
}

#[test]
fn eigenform_to_l_function_round_trip() {
    unsafe {
        let mut model = ptr::null_mut();
        let name = cstr("n1-p3-one-class");
        assert_eq!(ac_model_load_bundled(name.as_ptr(), &mut model), AcStatus::Ok);

        let weight = cstr(TOY_WEIGHT);
        let mut eigen = ptr::null_mut();
        assert_eq!(ac_eigenform_find(model, weight.as_ptr(), 1, 8, 6, &mut eigen), AcStatus::Ok, "{}", last_error());
        let mut out = ptr::null_mut();
        assert_eq!(ac_eigenform_describe(eigen, &mut out), AcStatus::Ok);
        let description = take_json(out);
        assert_eq!(description["slope"], 1);

        let mut l = ptr::null_mut();
        assert_eq!(ac_lfunction_build(model, eigen, 2, &mut l), AcStatus::Ok, "{}", last_error());
        let chi = cstr(r#"{"j":0,"beta":1,"gen_exponent":1}"#);
        assert_eq!(ac_lfunction_eval(l, chi.as_ptr(), &mut out), AcStatus::Ok, "{}", last_error());
        let value = take_json(out);
        assert_eq!(value["accessible"], true);
        assert!(value["interpolation_factor"].is_object());

        let outside = cstr(r#"{"j":5,"beta":0,"gen_exponent":0}"#);
        assert_eq!(ac_lfunction_eval(l, outside.as_ptr(), &mut out), AcStatus::Ok);
        assert_eq!(take_json(out)["tag"], "no interpolation semantics");

        let truncated = *b"ACMT";
        let mut loaded = ptr::null_mut();
        assert_eq!(ac_lfunction_load(truncated.as_ptr(), truncated.len(), &mut loaded), AcStatus::Schema);
        assert!(loaded.is_null());

        ac_lfunction_free(l);
        ac_eigenform_free(eigen);
        ac_model_free(model);
        ac_model_free(ptr::null_mut());
        ac_string_free(ptr::null_mut());
    }
}

#[test]
fn criterion_reports_match_the_library() {
    let mut out = ptr::null_mut();
    let status = unsafe { ac_verify_criterion(1, &mut out) };
    let report = unsafe { take_json(out) };
    assert_eq!(report["id"], 1);
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(status == AcStatus::Ok, passed);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/anticyc.h")).unwrap();
    for name in [
        "ac_last_error",
        "ac_string_free",
        "ac_crit",
        "ac_model_load_json",
        "ac_model_load_bundled",
        "ac_model_free",
        "ac_eigenform_find",
        "ac_eigenform_describe",
        "ac_eigenform_free",
        "ac_lfunction_build",
        "ac_lfunction_load",
        "ac_lfunction_eval",
        "ac_lfunction_free",
        "ac_verify_criterion",
        "AC_STATUS_NULL_ARGUMENT",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    use std::process::Command;
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler available; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|deps| deps.parent()).unwrap();
    let lib = profile_dir.join("libanticyc_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = env!("CARGO_MANIFEST_DIR");
    let binary = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("anticyc-smoke");
    let status = Command::new("cc")
        .args(["-Wall", "-Werror", "-I", &format!("{manifest}/include"), &format!("{manifest}/tests/c/smoke.c")])
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&binary)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&binary).output().unwrap();
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["accessible"], true);
}
