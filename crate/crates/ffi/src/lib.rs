//! C ABI for the claimcheck pipeline.
//!
//! Every fallible function returns a [`cc_status`]; on failure a message is
//! available from [`cc_last_error_message`] on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! released with [`cc_string_free`]. Handles are released with their
//! matching `_free` function.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde::Deserialize;

use claimcheck::backend::BackendConfig;
use claimcheck::domain::{parse_verdict_label, Claim, FactCheckReport, PipelineConfig, ThinkMatrix, Verdict};
use claimcheck::eval::sample_indices;
use claimcheck::pipeline::{extract_judgement, Pipeline};
use claimcheck::report::report_to_markdown;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum cc_status {
    CC_OK = 0,
    CC_ERR_NULL_ARGUMENT = 1,
    CC_ERR_INVALID_UTF8 = 2,
    CC_ERR_INVALID_CONFIG = 3,
    CC_ERR_INVALID_ARGUMENT = 4,
    /// No verdict label could be recognized.
    CC_ERR_UNPARSEABLE = 5,
    /// The run ended without a verdict; the report records why.
    CC_ERR_RUN_FAILED = 6,
    CC_ERR_RUNTIME = 7,
    CC_ERR_PANIC = 8,
}

/// Verdict labels, in the order Supported, Refuted, Conflicting
/// Evidence/Cherrypicking, Not Enough Evidence.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum cc_verdict {
    CC_VERDICT_SUPPORTED = 0,
    CC_VERDICT_REFUTED = 1,
    CC_VERDICT_CONFLICTING_EVIDENCE = 2,
    CC_VERDICT_NOT_ENOUGH_EVIDENCE = 3,
}

impl From<Verdict> for cc_verdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Supported => cc_verdict::CC_VERDICT_SUPPORTED,
            Verdict::Refuted => cc_verdict::CC_VERDICT_REFUTED,
            Verdict::ConflictingEvidence => cc_verdict::CC_VERDICT_CONFLICTING_EVIDENCE,
            Verdict::NotEnoughEvidence => cc_verdict::CC_VERDICT_NOT_ENOUGH_EVIDENCE,
        }
    }
}

/// Opaque pipeline handle.
pub struct cc_pipeline_t {
    runtime: tokio::runtime::Runtime,
    pipeline: Pipeline,
    config: PipelineConfig,
}

/// Opaque report handle.
pub struct cc_report_t {
    report: FactCheckReport,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct FfiConfig {
    backend: BackendConfig,
    pipeline: PipelineConfig,
    /// Overrides `pipeline.think_matrix`: "all", "none" or e.g. "TFTT".
    think: Option<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(cc_status, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> cc_status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => cc_status::CC_OK,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            cc_status::CC_ERR_PANIC
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(cc_status::CC_ERR_NULL_ARGUMENT, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(cc_status::CC_ERR_INVALID_UTF8, format!("{name} is not valid UTF-8")))
}

fn check_out<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(cc_status::CC_ERR_NULL_ARGUMENT, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version string (static).
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a pipeline from a JSON configuration:
/// `{"backend": {...}, "pipeline": {...}, "think": "TTTT"}`; every key is
/// optional. `config_json` may be NULL for defaults.
///
/// # Safety
/// `config_json` must be NULL or a NUL-terminated string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_pipeline_new(config_json: *const c_char, out: *mut *mut cc_pipeline_t) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let invalid = |m: String| Failure(cc_status::CC_ERR_INVALID_CONFIG, m);
        let mut cfg: FfiConfig = if config_json.is_null() {
            FfiConfig::default()
        } else {
            serde_json::from_str(read_str(config_json, "config_json")?).map_err(|e| invalid(e.to_string()))?
        };
        if let Some(think) = &cfg.think {
            cfg.pipeline.think_matrix = think.parse::<ThinkMatrix>().map_err(|e| invalid(e.to_string()))?;
        }
        cfg.pipeline.validate().map_err(|e| invalid(e.to_string()))?;
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .map_err(|e| Failure(cc_status::CC_ERR_RUNTIME, e.to_string()))?;
        let pipeline = {
            let _enter = runtime.enter();
            cfg.backend.build().map_err(|e| invalid(e.to_string()))?
        };
        *out = Box::into_raw(Box::new(cc_pipeline_t {
            runtime,
            pipeline,
            config: cfg.pipeline,
        }));
        Ok(())
    })
}

/// # Safety
/// `pipeline` must be NULL or a handle from [`cc_pipeline_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn cc_pipeline_free(pipeline: *mut cc_pipeline_t) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Fact-checks one claim, blocking until the run ends. `claim_date` is
/// NULL or `YYYY-MM-DD`. A report is produced even when the run fails;
/// inspect it with [`cc_report_verdict`].
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cc_pipeline_check(
    pipeline: *const cc_pipeline_t,
    claim_text: *const c_char,
    claim_date: *const c_char,
    out: *mut *mut cc_report_t,
) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let p = pipeline
            .as_ref()
            .ok_or_else(|| Failure(cc_status::CC_ERR_NULL_ARGUMENT, "pipeline is null".into()))?;
        let text = read_str(claim_text, "claim_text")?;
        let bad = |m: String| Failure(cc_status::CC_ERR_INVALID_ARGUMENT, m);
        let mut claim = Claim::new("ffi", text).map_err(|e| bad(e.to_string()))?;
        if !claim_date.is_null() {
            let raw = read_str(claim_date, "claim_date")?;
            let date = raw
                .parse()
                .map_err(|_| bad(format!("claim_date {raw:?} is not YYYY-MM-DD")))?;
            claim = claim.with_date(date);
        }
        let output = p.runtime.block_on(p.pipeline.run(claim, p.config.clone(), "ffi", None));
        *out = Box::into_raw(Box::new(cc_report_t { report: output.report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn cc_report_free(report: *mut cc_report_t) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses a report from its JSON encoding.
///
/// # Safety
/// `json` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_report_from_json(json: *const c_char, out: *mut *mut cc_report_t) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let report = FactCheckReport::from_json(read_str(json, "json")?)
            .map_err(|e| Failure(cc_status::CC_ERR_INVALID_ARGUMENT, e.to_string()))?;
        *out = Box::into_raw(Box::new(cc_report_t { report }));
        Ok(())
    })
}

/// Final verdict of a report; `CC_ERR_RUN_FAILED` when the run failed.
///
/// # Safety
/// `report` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_report_verdict(report: *const cc_report_t, out: *mut cc_verdict) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        let r = report
            .as_ref()
            .ok_or_else(|| Failure(cc_status::CC_ERR_NULL_ARGUMENT, "report is null".into()))?;
        match (r.report.judgement(), r.report.failure()) {
            (Some(j), _) => {
                *out = j.verdict.into();
                Ok(())
            }
            (None, failure) => Err(Failure(
                cc_status::CC_ERR_RUN_FAILED,
                failure.map_or_else(
                    || "no verdict".to_string(),
                    |f| format!("failed during {}: {}", f.stage, f.message),
                ),
            )),
        }
    })
}

unsafe fn report_string(
    report: *const cc_report_t,
    out: *mut *mut c_char,
    render: fn(&FactCheckReport) -> String,
) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let r = report
            .as_ref()
            .ok_or_else(|| Failure(cc_status::CC_ERR_NULL_ARGUMENT, "report is null".into()))?;
        *out = into_c_string(render(&r.report));
        Ok(())
    })
}

/// Markdown rendering of a report. Free the result with [`cc_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_report_to_markdown(report: *const cc_report_t, out: *mut *mut c_char) -> cc_status {
    report_string(report, out, report_to_markdown)
}

/// JSON encoding of a report. Free the result with [`cc_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_report_to_json(report: *const cc_report_t, out: *mut *mut c_char) -> cc_status {
    report_string(report, out, FactCheckReport::to_json)
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Recognizes a verdict label such as "Refuted" or
/// "conflicting evidence/cherrypicking".
///
/// # Safety
/// `label` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_parse_verdict_label(label: *const c_char, out: *mut cc_verdict) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        let v = parse_verdict_label(read_str(label, "label")?)
            .map_err(|e| Failure(cc_status::CC_ERR_UNPARSEABLE, e.to_string()))?;
        *out = v.into();
        Ok(())
    })
}

/// Extracts the verdict from an evaluation answer (last backtick-enclosed
/// label wins).
///
/// # Safety
/// `answer` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn cc_extract_judgement(answer: *const c_char, out: *mut cc_verdict) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        let j = extract_judgement(read_str(answer, "answer")?)
            .map_err(|e| Failure(cc_status::CC_ERR_UNPARSEABLE, e.to_string()))?;
        *out = j.verdict.into();
        Ok(())
    })
}

/// Writes `n` indices of a seeded sample of `0..len` to `out`, which must
/// hold `n` elements. Identical to the Rust harness' subsetting.
///
/// # Safety
/// `out` must point to `n` writable `size_t` slots.
#[no_mangle]
pub unsafe extern "C" fn cc_sample_subset_indices(len: usize, n: usize, seed: u64, out: *mut usize) -> cc_status {
    guard(|| {
        check_out(out, "out")?;
        let idx =
            sample_indices(len, n, seed).map_err(|e| Failure(cc_status::CC_ERR_INVALID_ARGUMENT, e.to_string()))?;
        ptr::copy_nonoverlapping(idx.as_ptr(), out, idx.len());
        Ok(())
    })
}
