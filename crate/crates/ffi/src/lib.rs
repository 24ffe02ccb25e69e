//! C ABI for the edgeplacer simulator.
//!
//! Conventions:
//! - Every fallible function returns an [`EpStatus`]; results come back through
//!   out-pointers, which are left untouched on failure.
//! - On failure a human-readable message is stored per thread and can be read
//!   with [`ep_last_error_message`].
//! - Handles ([`EpConfig`], [`EpRun`]) are opaque and must be released with
//!   their `*_free` function. Strings returned as `char *` are released with
//!   [`ep_string_free`].
//! - Panics never cross the boundary; they are reported as `EP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use edgeplacer::harness::output::write_sweep_summary;
use edgeplacer::harness::{sweep, ExperimentConfig, RunRecord};
use edgeplacer::queue::{lyapunov, update_queue};
use edgeplacer::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration could not be parsed or failed validation.
    Config = 3,
    /// The mobility trace could not be read or is malformed.
    Trace = 4,
    /// A numeric argument or index is out of its domain.
    InvalidInput = 5,
    /// The simulation failed for another reason (I/O, infeasibility, ...).
    Run = 6,
    /// The library panicked; the handle involved should be considered unusable.
    Panic = 7,
}

/// Opaque experiment configuration.
pub struct EpConfig {
    inner: ExperimentConfig,
}

/// Opaque result of one simulation run.
pub struct EpRun {
    record: RunRecord,
}

/// Aggregate metrics of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpRunSummary {
    pub horizon: usize,
    pub avg_latency_s: f64,
    pub avg_cost: f64,
    pub avg_queue: f64,
    pub final_queue: f64,
    pub total_cost: f64,
    pub negative_w_frames: usize,
    pub max_frame_deviation: f64,
    /// Whether total cost <= horizon * budget + final queue holds exactly.
    pub budget_holds: bool,
    /// Whether every in-frame queue deviation is within its bound.
    pub frame_bound_holds: bool,
}

/// One slot of a run: decision, outcome, and the queue and weight seen by the decision.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpSlot {
    pub t: usize,
    pub placement: usize,
    pub latency_s: f64,
    pub cost: f64,
    pub q: f64,
    pub w: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let c = CString::new(message).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> EpStatus {
    if err.is_config() {
        EpStatus::Config
    } else if err.is_trace() {
        EpStatus::Trace
    } else {
        match err {
            Error::NegativeInput { .. } | Error::PlacementOutOfRange { .. } | Error::InvalidObservation { .. } => {
                EpStatus::InvalidInput
            }
            _ => EpStatus::Run,
        }
    }
}

struct Failure(EpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EpStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EpStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            EpStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(EpStatus::NullPointer, format!("{name} is NULL"))
}

/// # Safety
/// `ptr` is NULL or points to a NUL-terminated string valid for the call.
unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| Failure(EpStatus::InvalidUtf8, format!("{name}: {e}")))
}

/// # Safety
/// `ptr` is NULL or valid for writes of `T`.
unsafe fn write_out<T>(ptr: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    ptr.write(value);
    Ok(())
}

/// Boxes `value` into `*out`; nothing is allocated when `out` is NULL.
///
/// # Safety
/// `out` is NULL or valid for writes.
unsafe fn box_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Hands `text` to the caller as `*out`; nothing is allocated when `out` is NULL.
///
/// # Safety
/// `out` is NULL or valid for writes.
unsafe fn string_out(out: *mut *mut c_char, text: Vec<u8>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(text).map_err(|e| Failure(EpStatus::Run, e.to_string()))?;
    out.write(c.into_raw());
    Ok(())
}

/// # Safety
/// `ptr` is NULL or a live handle created by this library.
unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or NULL if the last call
/// succeeded. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ep_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a configuration with every field at its default.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_config_new(out: *mut *mut EpConfig) -> EpStatus {
    guard(|| box_out(out, EpConfig { inner: ExperimentConfig::default() }))
}

/// Parses a JSON configuration. Relative paths inside it resolve against the
/// current working directory.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_config_from_json(json: *const c_char, out: *mut *mut EpConfig) -> EpStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let inner = ExperimentConfig::from_json(text)?;
        box_out(out, EpConfig { inner })
    })
}

/// Loads a JSON configuration file. Relative paths inside it resolve against
/// the file's directory.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_config_load(path: *const c_char, out: *mut *mut EpConfig) -> EpStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        let inner = ExperimentConfig::load(Path::new(path))?;
        box_out(out, EpConfig { inner })
    })
}

/// Applies a dotted `key=value` override such as `policy.v` = `900`. The
/// configuration is unchanged when the override is rejected.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ep_config_set(config: *mut EpConfig, key: *const c_char, value: *const c_char) -> EpStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let key = read_str(key, "key")?;
        let value = read_str(value, "value")?;
        cfg.inner.apply_override(key, value)?;
        Ok(())
    })
}

/// Serializes the configuration as pretty JSON. Free the result with
/// [`ep_string_free`].
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_config_to_json(config: *const EpConfig, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        string_out(out, cfg.inner.to_json_pretty().into_bytes())
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ep_config_free(config: *mut EpConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured policy once.
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_run(config: *const EpConfig, out: *mut *mut EpRun) -> EpStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        let record = cfg.inner.run()?;
        box_out(out, EpRun { record })
    })
}

/// Copies the run's aggregate metrics into `out`.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_run_summary(run: *const EpRun, out: *mut EpRunSummary) -> EpStatus {
    guard(|| {
        let r = &handle(run, "run")?.record;
        let summary = EpRunSummary {
            horizon: r.horizon(),
            avg_latency_s: r.avg_latency,
            avg_cost: r.avg_cost,
            avg_queue: r.avg_queue,
            final_queue: r.final_queue,
            total_cost: r.total_cost,
            negative_w_frames: r.negative_w_frames,
            max_frame_deviation: r.max_frame_deviation,
            budget_holds: r.budget_holds(),
            frame_bound_holds: r.frame_bound_holds(),
        };
        write_out(out, summary, "out")
    })
}

/// Number of slots in the run, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ep_run_slot_count(run: *const EpRun) -> usize {
    run.as_ref().map_or(0, |r| r.record.per_slot.len())
}

/// Copies slot `index` into `out`.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_run_slot(run: *const EpRun, index: usize, out: *mut EpSlot) -> EpStatus {
    guard(|| {
        let r = &handle(run, "run")?.record;
        let s = r.per_slot.get(index).ok_or_else(|| {
            Failure(EpStatus::InvalidInput, format!("slot {index} out of range for {} slots", r.per_slot.len()))
        })?;
        let slot = EpSlot { t: s.t, placement: s.placement.node(), latency_s: s.latency, cost: s.cost, q: s.q, w: s.w };
        write_out(out, slot, "out")
    })
}

/// Releases a run. NULL is ignored.
///
/// # Safety
/// `run` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ep_run_free(run: *mut EpRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Runs the configuration's sweep and returns the summary CSV. Free the result
/// with [`ep_string_free`].
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_sweep_csv(config: *const EpConfig, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        let points = sweep(&cfg.inner)?;
        let mut buf = Vec::new();
        write_sweep_summary(&mut buf, &points)?;
        string_out(out, buf)
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// One virtual-queue step, `max(q + e - e_avg, 0)`, rounded so the result
/// never falls below the exact value.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ep_update_queue(q: f64, e: f64, e_avg: f64, out: *mut f64) -> EpStatus {
    guard(|| {
        let next = update_queue(q, e, e_avg)?;
        write_out(out, next, "out")
    })
}

/// Quadratic Lyapunov function `q^2 / 2`.
#[no_mangle]
pub extern "C" fn ep_lyapunov(q: f64) -> f64 {
    lyapunov(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_follow_error_kind() {
        assert_eq!(status_of(&Error::Config("x".into())), EpStatus::Config);
        assert_eq!(status_of(&Error::Trace("x".into())), EpStatus::Trace);
        assert_eq!(status_of(&Error::NegativeInput { name: "cost", value: -1.0 }), EpStatus::InvalidInput);
        assert_eq!(status_of(&Error::Infeasible), EpStatus::Run);
    }

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, EpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(ep_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
        assert_eq!(guard(|| Ok(())), EpStatus::Ok);
        assert!(ep_last_error_message().is_null());
    }

    #[test]
    fn version_is_package_version() {
        let v = unsafe { CStr::from_ptr(ep_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
