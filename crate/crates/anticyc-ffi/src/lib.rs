//! C interface to anticyc.
//!
//! Objects cross the boundary as opaque handles created by `ac_*_load`/`ac_*_find`/`ac_*_build`
//! and released with the matching `ac_*_free`. Every entry point returns an [`AcStatus`]; on
//! failure a message is available from [`ac_last_error`] on the same thread. Reports are
//! returned as JSON strings owned by the caller and released with [`ac_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anticyc::autforms::{bundled_model, find_eigenform, working_degree, ClassSetModel, EigenForm};
use anticyc::cli::{self, CliError};
use anticyc::coeff::ring_make;
use anticyc::lfun::{build_lp, AnticyclotomicCharacter, PadicLFunction};
use anticyc::verify::run_criterion;
use anticyc::weights::Weight;

/// Result of every call. Nonzero values match the command-line exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    Precondition = 2,
    Verification = 3,
    Schema = 4,
    NullArgument = 5,
    Panic = 6,
}

/// A class-set model of definite unitary automorphic forms.
pub struct AcModel(ClassSetModel);

/// A U_p-eigenform together with the moment degree it was computed to.
pub struct AcEigenform {
    eigen: EigenForm,
    degree: u32,
}

/// A p-adic L-function as a distribution on Z_p^×.
pub struct AcLFunction(PadicLFunction);

enum Failure {
    Null(&'static str),
    Cli(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AcStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AcStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed for {name}"));
            AcStatus::NullArgument
        }
        Ok(Err(Failure::Cli(e))) => {
            let status = match &e {
                CliError::Precondition(_) => AcStatus::Precondition,
                CliError::Verification(_) => AcStatus::Verification,
                CliError::Schema(_) => AcStatus::Schema,
            };
            set_error(match e {
                CliError::Verification(report) => report.to_string(),
                other => other.to_string(),
            });
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            AcStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| Failure::Cli(CliError::Schema(format!("{name} is not UTF-8: {e}"))))
}

unsafe fn handle<'a, T>(ptr: *const T, name: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(name))
}

unsafe fn store<T>(out: *mut *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store_json(out: *mut *mut c_char, value: &serde_json::Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out_json"));
    }
    *out = CString::new(value.to_string()).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, Failure> {
    serde_json::from_str(json).map_err(|e| Failure::Cli(CliError::Schema(e.to_string())))
}

fn weight(json: &str) -> Result<Weight, Failure> {
    let w: Weight = parse(json)?;
    w.validate().map_err(CliError::from)?;
    Ok(w)
}

/// Message describing the last failure on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Critical range and h-invariant of a weight given as JSON.
///
/// # Safety
/// `weight_json` must be a nul-terminated string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_crit(weight_json: *const c_char, out_json: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let w = weight(text(weight_json, "weight_json")?)?;
        store_json(out_json, &cli::crit(&w)?)
    })
}

/// Loads a model from its JSON description.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_model_load_json(json: *const c_char, out: *mut *mut AcModel) -> AcStatus {
    guard(|| {
        let model = ClassSetModel::from_json_str(text(json, "json")?).map_err(CliError::from)?;
        store(out, AcModel(model), "out")
    })
}

/// Loads one of the models shipped with the library by name.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_model_load_bundled(name: *const c_char, out: *mut *mut AcModel) -> AcStatus {
    guard(|| {
        let model = bundled_model(text(name, "name")?).map_err(CliError::from)?;
        store(out, AcModel(model), "out")
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from `ac_model_load_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_model_free(model: *mut AcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Finds the U_p-eigenform of the given slope and weight, to `precision` digits and moment degree `degree`.
///
/// # Safety
/// `model` must be a live handle, `weight_json` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_eigenform_find(
    model: *const AcModel,
    weight_json: *const c_char,
    slope: u32,
    precision: u32,
    degree: u32,
    out: *mut *mut AcEigenform,
) -> AcStatus {
    guard(|| {
        let model = &handle(model, "model")?.0;
        let w = weight(text(weight_json, "weight_json")?)?;
        let ring = ring_make(model.p, precision, 1, 0, 0).map_err(CliError::from)?;
        let eigen = find_eigenform(model, &w, &ring, working_degree(degree, &ring), slope).map_err(CliError::from)?;
        store(out, AcEigenform { eigen, degree }, "out")
    })
}

/// Eigenvalue, slope and certified precision of an eigenform as JSON.
///
/// # Safety
/// `eigen` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_eigenform_describe(eigen: *const AcEigenform, out_json: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let e = &handle(eigen, "eigen")?.eigen;
        let report = serde_json::json!({
            "weight": e.weight,
            "slope": e.slope,
            "alpha": cli::scalar_json(&e.alpha),
            "precision": e.precision,
        });
        store_json(out_json, &report)
    })
}

/// Releases an eigenform. Null is ignored.
///
/// # Safety
/// `eigen` must be null or a handle from `ac_eigenform_find` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_eigenform_free(eigen: *mut AcEigenform) {
    if !eigen.is_null() {
        drop(Box::from_raw(eigen));
    }
}

/// Builds the p-adic L-function of an eigenform at conductor level `beta`.
///
/// # Safety
/// `model` and `eigen` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_lfunction_build(model: *const AcModel, eigen: *const AcEigenform, beta: u32, out: *mut *mut AcLFunction) -> AcStatus {
    guard(|| {
        let model = &handle(model, "model")?.0;
        let eigen = handle(eigen, "eigen")?;
        let l = build_lp(model, &eigen.eigen, beta, eigen.degree).map_err(CliError::from)?;
        store(out, AcLFunction(l), "out")
    })
}

/// Decodes an L-function from the moment-table bytes written by `lp-build`.
///
/// # Safety
/// `bytes` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_lfunction_load(bytes: *const u8, len: usize, out: *mut *mut AcLFunction) -> AcStatus {
    guard(|| {
        if bytes.is_null() {
            return Err(Failure::Null("bytes"));
        }
        let l = cli::lfunction_from_bytes(std::slice::from_raw_parts(bytes, len))?;
        store(out, AcLFunction(l), "out")
    })
}

/// Evaluates an L-function at a character given as JSON `{"j", "beta", "gen_exponent"}`.
///
/// # Safety
/// `l` must be a live handle, `character_json` a nul-terminated string, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_lfunction_eval(l: *const AcLFunction, character_json: *const c_char, out_json: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let l = &handle(l, "l")?.0;
        let chi: AnticyclotomicCharacter = parse(text(character_json, "character_json")?)?;
        store_json(out_json, &cli::character_report(l, &chi)?)
    })
}

/// Releases an L-function. Null is ignored.
///
/// # Safety
/// `l` must be null or a handle from `ac_lfunction_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ac_lfunction_free(l: *mut AcLFunction) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Runs one acceptance criterion (1 to 12). The report is written even when the check fails,
/// in which case the status is `Verification`.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_verify_criterion(id: u8, out_json: *mut *mut c_char) -> AcStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(Failure::Null("out_json"));
        }
        if !(1..=12).contains(&id) {
            return Err(CliError::Precondition(format!("unknown criterion {id}")).into());
        }
        let report = run_criterion(id);
        let value = serde_json::to_value(&report).expect("report serializes");
        store_json(out_json, &value)?;
        if report.passed {
            Ok(())
        } else {
            Err(CliError::Verification(value).into())
        }
    })
}
