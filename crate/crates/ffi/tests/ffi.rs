use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use claimcheck_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = cc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    cc_string_free(s);
    out
}

#[test]
fn verdict_helpers() {
    let mut v = cc_verdict::CC_VERDICT_SUPPORTED;
    unsafe {
        assert_eq!(
            cc_parse_verdict_label(c("Conflicting Evidence/Cherrypicking").as_ptr(), &mut v),
            cc_status::CC_OK
        );
        assert_eq!(v, cc_verdict::CC_VERDICT_CONFLICTING_EVIDENCE);
        assert_eq!(
            cc_parse_verdict_label(c("maybe").as_ptr(), &mut v),
            cc_status::CC_ERR_UNPARSEABLE
        );
        assert!(last_error().contains("maybe"));
        assert_eq!(
            cc_parse_verdict_label(ptr::null(), &mut v),
            cc_status::CC_ERR_NULL_ARGUMENT
        );
        assert_eq!(
            cc_extract_judgement(c("`Refuted`").as_ptr(), ptr::null_mut()),
            cc_status::CC_ERR_NULL_ARGUMENT
        );
        assert_eq!(
            cc_extract_judgement(c("a `Supported` b `Refuted`").as_ptr(), &mut v),
            cc_status::CC_OK
        );
        assert_eq!(v, cc_verdict::CC_VERDICT_REFUTED);
        let bad = [0xffu8, 0];
        assert_eq!(
            cc_extract_judgement(bad.as_ptr().cast(), &mut v),
            cc_status::CC_ERR_INVALID_UTF8
        );
    }
    // Success clears the previous error.
    unsafe { cc_parse_verdict_label(c("supported").as_ptr(), &mut v) };
    assert!(cc_last_error_message().is_null());
}

#[test]
fn subset_indices_match_core() {
    let mut out = vec![0usize; 100];
    let status = unsafe { cc_sample_subset_indices(500, 100, 42, out.as_mut_ptr()) };
    assert_eq!(status, cc_status::CC_OK);
    assert_eq!(out, claimcheck::eval::sample_indices(500, 100, 42).unwrap());
    let status = unsafe { cc_sample_subset_indices(5, 6, 42, out.as_mut_ptr()) };
    assert_eq!(status, cc_status::CC_ERR_INVALID_ARGUMENT);
}

#[test]
fn offline_pipeline_round_trip() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            cc_pipeline_new(c(r#"{"backend": {"offline": true}, "think": "TFTF"}"#).as_ptr(), &mut p),
            cc_status::CC_OK
        );
        let mut r = ptr::null_mut();
        assert_eq!(
            cc_pipeline_check(
                p,
                c("The moon is made of cheese.").as_ptr(),
                c("2020-01-01").as_ptr(),
                &mut r
            ),
            cc_status::CC_OK
        );
        let mut v = cc_verdict::CC_VERDICT_SUPPORTED;
        assert_eq!(cc_report_verdict(r, &mut v), cc_status::CC_OK);
        assert_eq!(v, cc_verdict::CC_VERDICT_NOT_ENOUGH_EVIDENCE);

        let mut s = ptr::null_mut();
        assert_eq!(cc_report_to_json(r, &mut s), cc_status::CC_OK);
        let json = take(s);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let think = &value["config_snapshot"]["think_matrix"];
        assert_eq!(
            [
                &think["planning"],
                &think["summarization"],
                &think["synthesis"],
                &think["evaluation"]
            ],
            [true, false, true, false]
        );
        let mut r2 = ptr::null_mut();
        assert_eq!(cc_report_from_json(c(&json).as_ptr(), &mut r2), cc_status::CC_OK);
        assert_eq!(cc_report_to_markdown(r2, &mut s), cc_status::CC_OK);
        assert!(take(s).starts_with("# Fact-Checking Report"));

        assert_eq!(
            cc_pipeline_check(p, c("  ").as_ptr(), ptr::null(), &mut r2),
            cc_status::CC_ERR_INVALID_ARGUMENT
        );
        assert!(r2.is_null());
        assert_eq!(
            cc_pipeline_check(p, c("x").as_ptr(), c("27/10/2020").as_ptr(), &mut r2),
            cc_status::CC_ERR_INVALID_ARGUMENT
        );
        cc_report_free(r);
        cc_report_free(ptr::null_mut());
        cc_pipeline_free(p);
    }
}

#[test]
fn failed_run_and_bad_config() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            cc_pipeline_new(c(r#"{"nope": 1}"#).as_ptr(), &mut p),
            cc_status::CC_ERR_INVALID_CONFIG
        );
        assert!(p.is_null());
        assert_eq!(
            cc_pipeline_new(c(r#"{"think": "TTT"}"#).as_ptr(), &mut p),
            cc_status::CC_ERR_INVALID_CONFIG
        );
        // No search backend configured.
        assert_eq!(cc_pipeline_new(ptr::null(), &mut p), cc_status::CC_ERR_INVALID_CONFIG);
        assert!(last_error().contains("search"));

        // An unreachable endpoint yields a failed report rather than an error.
        let cfg = r#"{"backend": {"llm_base_url": "http://127.0.0.1:9/v1", "fixtures_dir": "/nonexistent"}}"#;
        assert_eq!(
            cc_pipeline_new(c(cfg).as_ptr(), &mut p),
            cc_status::CC_ERR_INVALID_CONFIG
        );
        let dir = tempfile::tempdir().unwrap();
        let cfg = format!(
            r#"{{"backend": {{"llm_base_url": "http://127.0.0.1:9/v1", "fixtures_dir": {:?}}}}}"#,
            dir.path().to_str().unwrap()
        );
        assert_eq!(cc_pipeline_new(c(&cfg).as_ptr(), &mut p), cc_status::CC_OK);
        let mut r = ptr::null_mut();
        assert_eq!(
            cc_pipeline_check(p, c("claim").as_ptr(), ptr::null(), &mut r),
            cc_status::CC_OK
        );
        let mut v = cc_verdict::CC_VERDICT_SUPPORTED;
        assert_eq!(cc_report_verdict(r, &mut v), cc_status::CC_ERR_RUN_FAILED);
        assert!(last_error().contains("Planning"));
        cc_report_free(r);
        cc_pipeline_free(p);
    }
}

#[test]
fn c_smoke_program() {
    let Some(compiler) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("SKIP: no C compiler");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in target/<profile>/deps; the staticlib sits one up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let staticlib = lib_dir.join("libclaimcheck_ffi.a");
    if !staticlib.exists() {
        eprintln!("SKIP: {} not built", staticlib.display());
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new(compiler)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C smoke program failed to compile");
    let output = Command::new(&bin).output().unwrap();
    assert!(
        output.status.success(),
        "smoke failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), "ok");
}
