//! C ABI for `taildom`.
//!
//! Every fallible function returns a [`TdStatus`]; on anything but
//! `TD_STATUS_OK` a message is available from [`td_last_error`] on the same
//! thread. Models and tails are opaque handles released with their `_free`
//! function. Strings returned through out-parameters are released with
//! [`td_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use taildom::cli::{execute, parse_config, report_body, resolve_with, Args};
use taildom::regularity::{constant_audit, hull_distance, MetricModel};
use taildom::stats::{log_indexed_norm, EmpiricalTail};
use taildom::stochastic::{sample_norms, RandomVectorModel};
use taildom::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    InvalidModel = 4,
    ShapeMismatch = 5,
    InvalidConfig = 6,
    Degenerate = 7,
    ContractViolated = 8,
    Io = 9,
    Internal = 10,
}

impl From<&Error> for TdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_) => TdStatus::InvalidParameter,
            Error::Model(_) => TdStatus::InvalidModel,
            Error::Shape(_) => TdStatus::ShapeMismatch,
            Error::Config(_) | Error::Json(_) => TdStatus::InvalidConfig,
            Error::Degenerate(_) => TdStatus::Degenerate,
            Error::Contract(_) => TdStatus::ContractViolated,
            Error::Io(_) | Error::Csv(_) => TdStatus::Io,
        }
    }
}

/// Opaque random vector model.
pub struct TdModel(RandomVectorModel);

/// Opaque empirical tail of a real sample.
pub struct TdTail(EmpiricalTail);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TdTailEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TdHullResult {
    pub distance: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(TdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(TdStatus::from(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TdStatus::Internal
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(TdStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|_| Failure(TdStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn td_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a model from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_model_from_json(json: *const c_char, out: *mut *mut TdModel) -> TdStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = str_arg(json, "json")?;
        let model = RandomVectorModel::from_json(text)?;
        model.validate()?;
        *out = Box::into_raw(Box::new(TdModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`td_model_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn td_model_free(model: *mut TdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_model_dim(model: *const TdModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim)
}

/// Content hash of the model; free with [`td_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_model_id(model: *const TdModel, out: *mut *mut c_char) -> TdStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        *out = into_c_string((*model).0.id());
        Ok(())
    })
}

/// Writes `count` samples of `‖V‖` into `out`.
///
/// # Safety
/// `model` must be a live handle and `out` must hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn td_sample_norms(
    model: *const TdModel,
    count: usize,
    seed: u64,
    stream: u64,
    out: *mut f64,
) -> TdStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let norms = sample_norms(&(*model).0, count, seed, stream)?;
        std::slice::from_raw_parts_mut(out, count).copy_from_slice(&norms);
        Ok(())
    })
}

/// Empirical tail of `len` values with DKW level `delta`.
///
/// # Safety
/// `values` must hold `len` doubles and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_tail_new(values: *const f64, len: usize, delta: f64, out: *mut *mut TdTail) -> TdStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = slice_arg(values, len, "values")?;
        *out = Box::into_raw(Box::new(TdTail(EmpiricalTail::new(v.to_vec(), delta)?)));
        Ok(())
    })
}

/// `P̂(V >= t)` with its DKW band.
///
/// # Safety
/// `tail` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_tail_survival(tail: *const TdTail, t: f64, out: *mut TdTailEstimate) -> TdStatus {
    guard(|| {
        non_null(tail, "tail")?;
        non_null(out, "out")?;
        let s = (*tail).0.survival(t);
        *out = TdTailEstimate { estimate: s.estimate, lower: s.lower, upper: s.upper };
        Ok(())
    })
}

/// # Safety
/// `tail` must be NULL or a handle from [`td_tail_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn td_tail_free(tail: *mut TdTail) {
    if !tail.is_null() {
        drop(Box::from_raw(tail));
    }
}

/// `(mean |v|^p)^(1/p)` with `p = ln(n + 2)`.
///
/// # Safety
/// `samples` must hold `len` doubles and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_log_indexed_norm(samples: *const f64, len: usize, n: usize, out: *mut f64) -> TdStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = log_indexed_norm(slice_arg(samples, len, "samples")?, n)?;
        Ok(())
    })
}

/// `e^2 + Σ_n ∫_{e^2}^∞ t^(-ln(n+2)) dt`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_constant_audit(out: *mut f64) -> TdStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = constant_audit().value;
        Ok(())
    })
}

/// Distance from `point` to the symmetric convex hull of `count` generators
/// (row-major `count x dim`) in the metric of the `dim x dim` second-moment
/// matrix `covariance` (row-major).
///
/// # Safety
/// Array arguments must hold the stated number of doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn td_hull_distance(
    point: *const f64,
    dim: usize,
    generators: *const f64,
    count: usize,
    covariance: *const f64,
    tol: f64,
    max_iter: usize,
    out: *mut TdHullResult,
) -> TdStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = slice_arg(point, dim, "point")?;
        let g = slice_arg(generators, count * dim, "generators")?;
        let c = slice_arg(covariance, dim * dim, "covariance")?;
        let metric = MetricModel::from_matrix(dim, c)?;
        let gens: Vec<Vec<f64>> = g.chunks_exact(dim.max(1)).map(<[f64]>::to_vec).collect();
        let h = hull_distance(p, &gens, &metric, tol, max_iter)?;
        *out = TdHullResult { distance: h.distance, lower_bound: h.lower_bound, iterations: h.iterations, converged: h.converged };
        Ok(())
    })
}

/// Runs an experiment described by a JSON config (the CLI config-file
/// format) and returns the JSON report body through `report`. `outcome`
/// receives the CLI exit status: 0 pass, 1 fail, 2 inconclusive.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `report` and `outcome`
/// must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn td_run_experiment(config_json: *const c_char, report: *mut *mut c_char, outcome: *mut i32) -> TdStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(outcome, "outcome")?;
        let file = parse_config(str_arg(config_json, "config_json")?)?;
        let inv = resolve_with(file, &Args::default())?;
        let out = execute(&inv.config)?;
        let body = serde_json::to_string_pretty(&report_body(&inv.config, &out)).map_err(Error::from)?;
        *report = into_c_string(body);
        *outcome = out.outcome.exit_code();
        Ok(())
    })
}
