// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! C ABI over the slitport simulator.
//!
//! Scripts are loaded into an opaque [`SlitportProgram`] and run into an
//! opaque [`SlitportReport`]. Every fallible call returns a
//! [`SlitportStatus`]; the message of the last failure on the calling thread
//! is available from [`slitport_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64 as C64;
use slitport::protocol::{run_protocol, Mode, ProtocolError, RunInputs, RunOptions, RunReport};
use slitport::script::{parse, validate, Diagnostic, ProtocolScript, PAPER_SCENARIO};


/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlitportStatus
{
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    InvalidInputs = 5,
    ProtocolError = 6,
    ImpossibleOutcome = 7,
    NoValue = 8,
    Panic = 9,
}

/// Parsed script together with the run inputs it will be validated against.
pub struct SlitportProgram
{
    script: ProtocolScript,
    inputs: RunInputs,
}

/// Outcome of a completed run.
pub struct SlitportReport
{
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>)
{
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error()
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn diagnostics(errors: &[Diagnostic]) -> String
{
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn guard(f: impl FnOnce() -> Result<(), (SlitportStatus, String)>) -> SlitportStatus
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f))
    {
        Ok(Ok(())) => SlitportStatus::Ok,
        Ok(Err((status, msg))) =>
        {
            set_error(msg);
            status
        }
        Err(_) =>
        {
            set_error("panic inside slitport");
            SlitportStatus::Panic
        }
    }
}

fn null(what: &str) -> (SlitportStatus, String)
{
    (SlitportStatus::NullArgument, format!("{what} is null"))
}

unsafe fn program_ref<'a>(p: *const SlitportProgram) -> Result<&'a SlitportProgram, (SlitportStatus, String)>
{
    p.as_ref().ok_or_else(|| null("program"))
}

unsafe fn report_ref<'a>(r: *const SlitportReport) -> Result<&'a SlitportReport, (SlitportStatus, String)>
{
    r.as_ref().ok_or_else(|| null("report"))
}

fn protocol_status(e: &ProtocolError) -> SlitportStatus
{
    if e.is_impossible_outcome() || matches!(e, ProtocolError::Undetected { .. })
    {
        SlitportStatus::ImpossibleOutcome
    }
    else
    {
        SlitportStatus::ProtocolError
    }
}

fn load(text: &str, out: *mut *mut SlitportProgram) -> Result<(), (SlitportStatus, String)>
{
    let script = parse(text).map_err(|e| (SlitportStatus::ParseError, diagnostics(&e)))?;
    let inputs = script.inputs();
    validate(&script, &inputs).map_err(|e| (SlitportStatus::ValidationError, diagnostics(&e)))?;
    // SAFETY: checked non-null by the callers.
    unsafe { *out = Box::into_raw(Box::new(SlitportProgram { script, inputs })) };
    Ok(())
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next slitport call on the same thread.
#[no_mangle]
pub extern "C" fn slitport_last_error() -> *const c_char
{
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn slitport_version() -> *const c_char
{
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse and validate a script. On success `*out` owns a new program.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_parse(text: *const c_char, out: *mut *mut SlitportProgram)
    -> SlitportStatus
{
    guard(|| {
        if out.is_null()
        {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if text.is_null()
        {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str()
            .map_err(|e| (SlitportStatus::InvalidUtf8, format!("script is not UTF-8: {e}")))?;
        load(text, out)
    })
}

/// Load the built-in teleportation scenario.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_paper(out: *mut *mut SlitportProgram) -> SlitportStatus
{
    guard(|| {
        if out.is_null()
        {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        load(PAPER_SCENARIO, out)
    })
}

/// Replace the teleported input `cb|b⟩ + cc|c⟩`.
///
/// # Safety
/// `program` must come from this library and not be freed.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_set_input(program: *mut SlitportProgram, cb_re: f64, cb_im: f64,
    cc_re: f64, cc_im: f64) -> SlitportStatus
{
    guard(|| {
        let p = program.as_mut().ok_or_else(|| null("program"))?;
        let inputs = RunInputs { cb: C64::new(cb_re, cb_im), cc: C64::new(cc_re, cc_im), ..p.inputs };
        inputs.check().map_err(|e| (SlitportStatus::InvalidInputs, e.to_string()))?;
        p.inputs = inputs;
        Ok(())
    })
}

/// Replace the `$alpha`, `$truncation` and `$gt` parameters.
///
/// # Safety
/// `program` must come from this library and not be freed.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_set_params(program: *mut SlitportProgram, alpha: f64, truncation: usize,
    gt: f64) -> SlitportStatus
{
    guard(|| {
        let p = program.as_mut().ok_or_else(|| null("program"))?;
        let inputs = RunInputs { alpha, truncation, gt, ..p.inputs };
        inputs.check().map_err(|e| (SlitportStatus::InvalidInputs, e.to_string()))?;
        validate(&p.script, &inputs).map_err(|e| (SlitportStatus::ValidationError, diagnostics(&e)))?;
        p.inputs = inputs;
        Ok(())
    })
}

/// Run the program. `sample` nonzero draws outcomes from a generator seeded
/// with `seed`; zero post-selects the scripted outcomes. On success `*out`
/// owns a new report.
///
/// # Safety
/// `program` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_run(program: *const SlitportProgram, sample: i32, seed: u64,
    out: *mut *mut SlitportReport) -> SlitportStatus
{
    guard(|| {
        if out.is_null()
        {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = program_ref(program)?;
        let prog = validate(&p.script, &p.inputs).map_err(|e| (SlitportStatus::ValidationError, diagnostics(&e)))?;
        let mode = if sample != 0 { Mode::Sample { seed } } else { Mode::PostSelect };
        let opts = RunOptions { mode, ..RunOptions::default() };
        let report = run_protocol(&prog.layout, &prog.steps, &p.inputs, opts)
            .map_err(|f| (protocol_status(&f.error), f.error.to_string()))?;
        *out = Box::into_raw(Box::new(SlitportReport { report }));
        Ok(())
    })
}

/// Release a program. Null is ignored.
///
/// # Safety
/// `program` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slitport_program_free(program: *mut SlitportProgram)
{
    if !program.is_null()
    {
        drop(Box::from_raw(program));
    }
}

/// Fidelity of the teleported path register with the input.
/// Returns `NoValue` when the script teleports nothing.
///
/// # Safety
/// `report` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_final_fidelity(report: *const SlitportReport, out: *mut f64)
    -> SlitportStatus
{
    guard(|| {
        let r = report_ref(report)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.report.final_fidelity.ok_or((SlitportStatus::NoValue, "run has no teleported register".into()))?;
        Ok(())
    })
}

/// Product of all measurement probabilities, or NaN for a null report.
///
/// # Safety
/// `report` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_cumulative_probability(report: *const SlitportReport) -> f64
{
    report.as_ref().map_or(f64::NAN, |r| r.report.cumulative_probability)
}

/// Number of executed steps, or zero for a null report.
///
/// # Safety
/// `report` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_step_count(report: *const SlitportReport) -> usize
{
    report.as_ref().map_or(0, |r| r.report.steps.len())
}

/// Probability of step `index`.
///
/// # Safety
/// `report` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_step_probability(report: *const SlitportReport, index: usize,
    out: *mut f64) -> SlitportStatus
{
    guard(|| {
        let r = report_ref(report)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let step = r.report.steps.get(index)
            .ok_or((SlitportStatus::NoValue, format!("step {index} out of range")))?;
        *out = step.probability;
        Ok(())
    })
}

/// Canonical JSON of the report. Free the result with
/// [`slitport_string_free`]. Returns null on failure.
///
/// # Safety
/// `report` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_to_json(report: *const SlitportReport) -> *mut c_char
{
    let mut text = ptr::null_mut();
    guard(|| {
        let r = report_ref(report)?;
        text = CString::new(r.report.to_json())
            .map_err(|e| (SlitportStatus::Panic, e.to_string()))?
            .into_raw();
        Ok(())
    });
    text
}

/// Release a report. Null is ignored.
///
/// # Safety
/// `report` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slitport_report_free(report: *mut SlitportReport)
{
    if !report.is_null()
    {
        drop(Box::from_raw(report));
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn slitport_string_free(s: *mut c_char)
{
    if !s.is_null()
    {
        drop(CString::from_raw(s));
    }
}
