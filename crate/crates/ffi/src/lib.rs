//! C ABI over the bagsched solvers. Instances and results are opaque heap
//! handles owned by the caller and released with the matching `_free`.
//! Every fallible call returns a [`BagschedStatus`]; the message of the
//! last failure on the calling thread is available from
//! [`bagsched_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bagsched::harness::load_instance;
use bagsched::makespan::solve_makespan;
use bagsched::oracle::optimal_bagging;
use bagsched::santa::solve_santa;
use bagsched::{Bagging, Budget, Epsilon, Error, Instance, Objective, Rational};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BagschedStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Capacity = 3,
    Domain = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BagschedObjective {
    Makespan = 0,
    SantaClaus = 1,
}

impl From<BagschedObjective> for Objective {
    fn from(o: BagschedObjective) -> Self {
        match o {
            BagschedObjective::Makespan => Objective::Makespan,
            BagschedObjective::SantaClaus => Objective::SantaClaus,
        }
    }
}

/// Opaque instance handle.
pub struct BagschedInstance {
    inner: Instance,
}

/// Opaque solve result: a bagging and its exact expected value.
pub struct BagschedResult {
    bagging: Bagging,
    value: Rational,
    value_text: CString,
    job_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> BagschedStatus {
    match e {
        Error::Validation { .. } => BagschedStatus::Validation,
        Error::Capacity { .. } | Error::NeedsOuterDp { .. } => BagschedStatus::Capacity,
        Error::Domain(_) => BagschedStatus::Domain,
        Error::Internal(_) => BagschedStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (BagschedStatus, String)>) -> BagschedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BagschedStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside bagsched");
            BagschedStatus::Panic
        }
    }
}

fn lift(e: Error) -> (BagschedStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BagschedStatus, String) {
    (BagschedStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `data` must point to `len` readable values, or be null with `len == 0`.
unsafe fn slice<'a>(data: *const u64, len: usize, what: &str) -> Result<&'a [u64], (BagschedStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bagsched_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds an instance from `n` processing times and `m` machine weights.
///
/// # Safety
/// The arrays must hold `n` and `m` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bagsched_instance_new(
    processing_times: *const u64,
    n: usize,
    machine_weights: *const u64,
    m: usize,
    out: *mut *mut BagschedInstance,
) -> BagschedStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = slice(processing_times, n, "processing_times")?.to_vec();
        let w = slice(machine_weights, m, "machine_weights")?.to_vec();
        let inner = Instance::new(p, w).map_err(lift)?;
        *out = Box::into_raw(Box::new(BagschedInstance { inner }));
        Ok(())
    })
}

/// Parses the JSON instance format used by the CLI.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bagsched_instance_from_json(json: *const c_char, out: *mut *mut BagschedInstance) -> BagschedStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = load_instance(CStr::from_ptr(json).to_bytes()).map_err(lift)?;
        *out = Box::into_raw(Box::new(BagschedInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bagsched_instance_free(instance: *mut BagschedInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

fn finish(
    bagging: Bagging,
    value: Rational,
    instance: &Instance,
    out: *mut *mut BagschedResult,
) -> Result<(), (BagschedStatus, String)> {
    let value_text = CString::new(value.to_string()).expect("digits and a slash");
    let result = BagschedResult {
        bagging,
        value,
        value_text,
        job_count: instance.job_count(),
    };
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(result)) };
    Ok(())
}

/// Runs the approximation scheme for `objective` with ε = 1/`epsilon_inverse`.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bagsched_solve(
    instance: *const BagschedInstance,
    objective: BagschedObjective,
    epsilon_inverse: u32,
    out: *mut *mut BagschedResult,
) -> BagschedStatus {
    guard(|| {
        let instance = &instance.as_ref().ok_or_else(|| null("instance"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let eps = Epsilon::new(epsilon_inverse).map_err(lift)?;
        let budget = Budget::from_env().map_err(lift)?;
        let (bagging, value) = match objective {
            BagschedObjective::Makespan => {
                let o = solve_makespan(instance, eps, &budget).map_err(lift)?;
                (o.bagging, o.value)
            }
            BagschedObjective::SantaClaus => {
                let o = solve_santa(instance, eps, &budget).map_err(lift)?;
                (o.bagging, o.value)
            }
        };
        finish(bagging, value, instance, out)
    })
}

/// Exact optimum by enumeration; small instances only.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bagsched_oracle(
    instance: *const BagschedInstance,
    objective: BagschedObjective,
    out: *mut *mut BagschedResult,
) -> BagschedStatus {
    guard(|| {
        let instance = &instance.as_ref().ok_or_else(|| null("instance"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let budget = Budget::from_env().map_err(lift)?;
        let (bagging, value) = optimal_bagging(instance, objective.into(), &budget).map_err(lift)?;
        finish(bagging, value, instance, out)
    })
}

/// Number of nonempty bags; 0 for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bagsched_result_bag_count(result: *const BagschedResult) -> usize {
    result.as_ref().map_or(0, |r| r.bagging.bag_count())
}

/// Writes the bag index of every job into `bag_of_job[0..len]`; `len` must equal the job count.
///
/// # Safety
/// `result` must be a live handle; `bag_of_job` must hold `len` writable slots.
#[no_mangle]
pub unsafe extern "C" fn bagsched_result_assignment(
    result: *const BagschedResult,
    bag_of_job: *mut usize,
    len: usize,
) -> BagschedStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if bag_of_job.is_null() {
            return Err(null("bag_of_job"));
        }
        if len != r.job_count {
            return Err((
                BagschedStatus::Validation,
                format!("buffer holds {len} entries for {} jobs", r.job_count),
            ));
        }
        let out = std::slice::from_raw_parts_mut(bag_of_job, len);
        for (b, bag) in r.bagging.bags().iter().enumerate() {
            for &j in bag {
                out[j] = b;
            }
        }
        Ok(())
    })
}

/// Expected objective value as a double (rounded).
///
/// # Safety
/// `result` must be a live handle or null (NaN).
#[no_mangle]
pub unsafe extern "C" fn bagsched_result_value(result: *const BagschedResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.value.to_f64())
}

/// Exact expected value as "num/den"; valid while the result lives.
///
/// # Safety
/// `result` must be a live handle or null (returns null).
#[no_mangle]
pub unsafe extern "C" fn bagsched_result_value_exact(result: *const BagschedResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.value_text.as_ptr())
}

/// # Safety
/// `result` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bagsched_result_free(result: *mut BagschedResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
