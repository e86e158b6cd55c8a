//! C ABI over `censtail`.
//!
//! Samples live behind an opaque `CensTailSample` handle. Every fallible call
//! returns a `CensTailStatus` and writes results through out-pointers; on
//! failure the message is kept per thread and read back with
//! `censtail_last_error_message`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use censtail::estimators::{estimate_report, p_hat};
use censtail::selection::reiss_thomas_k;
use censtail::tail_process::{gof_pvalue, gof_statistics};
use censtail::{CensoredObservation, Error, EstimatorId, SortedCensoredSample};

/// Result codes. `CENS_TAIL_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensTailStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    KOutOfRange = 3,
    Undefined = 4,
    EmptySample = 5,
    DegenerateNull = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensTailEstimator {
    Hill = 0,
    Efg = 1,
    Ww1 = 2,
    Ww2 = 3,
    New = 4,
}

impl From<CensTailEstimator> for EstimatorId {
    fn from(e: CensTailEstimator) -> Self {
        match e {
            CensTailEstimator::Hill => EstimatorId::Hill,
            CensTailEstimator::Efg => EstimatorId::Efg,
            CensTailEstimator::Ww1 => EstimatorId::Ww1,
            CensTailEstimator::Ww2 => EstimatorId::Ww2,
            CensTailEstimator::New => EstimatorId::New,
        }
    }
}

/// Sorted censored sample.
pub struct CensTailSample {
    inner: SortedCensoredSample,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> CensTailStatus {
    match err {
        Error::KOutOfRange { .. } => CensTailStatus::KOutOfRange,
        Error::Undefined(_) => CensTailStatus::Undefined,
        Error::EmptySample => CensTailStatus::EmptySample,
        Error::DegenerateNull(_) => CensTailStatus::DegenerateNull,
        Error::Domain(_) | Error::ModelSpec { .. } | Error::Parse { .. } => {
            CensTailStatus::InvalidArgument
        }
        _ => CensTailStatus::Internal,
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (CensTailStatus, String)>) -> CensTailStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CensTailStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CensTailStatus::Panic
        }
    }
}

fn lib<T>(r: censtail::Result<T>) -> Result<T, (CensTailStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CensTailStatus, String) {
    (CensTailStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn sample_ref<'a>(
    s: *const CensTailSample,
) -> Result<&'a SortedCensoredSample, (CensTailStatus, String)> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("sample"))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), (CensTailStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Builds a sample from `n` observed values `z` and indicators `delta`
/// (nonzero = uncensored). On success `*out` owns a handle that must be
/// released with `censtail_sample_free`.
///
/// # Safety
/// `z` and `delta` must point to `n` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_sample_new(
    z: *const f64,
    delta: *const u8,
    n: usize,
    out: *mut *mut CensTailSample,
) -> CensTailStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if n == 0 {
            return Err((CensTailStatus::EmptySample, "empty sample".into()));
        }
        if z.is_null() {
            return Err(null("z"));
        }
        if delta.is_null() {
            return Err(null("delta"));
        }
        let z = slice::from_raw_parts(z, n);
        let delta = slice::from_raw_parts(delta, n);
        let obs: Vec<CensoredObservation> = z
            .iter()
            .zip(delta)
            .map(|(&z, &d)| CensoredObservation::new(z, d != 0))
            .collect();
        let inner = lib(SortedCensoredSample::from_observations(&obs))?;
        out.write(Box::into_raw(Box::new(CensTailSample { inner })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sample` must come from `censtail_sample_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn censtail_sample_free(sample: *mut CensTailSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn censtail_sample_len(sample: *const CensTailSample) -> usize {
    sample.as_ref().map_or(0, |s| s.inner.len())
}

/// Evaluates `estimator` at threshold `k`.
///
/// # Safety
/// `sample` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_estimate(
    sample: *const CensTailSample,
    estimator: CensTailEstimator,
    k: usize,
    out_value: *mut f64,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let v = lib(EstimatorId::from(estimator).evaluate(s, k))?;
        write(out_value, v, "out_value")
    })
}

/// Proportion of uncensored observations among the top `k`.
///
/// # Safety
/// `sample` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_p_hat(
    sample: *const CensTailSample,
    k: usize,
    out_value: *mut f64,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let v = lib(p_hat(s, k))?;
        write(out_value, v, "out_value")
    })
}

/// Estimate with its asymptotic standard error and a normal interval at
/// `level`. Returns `CENS_TAIL_STATUS_UNDEFINED` for estimators without a
/// closed-form standard error.
///
/// # Safety
/// `sample` must be a live handle; every out-pointer must be writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_confidence_interval(
    sample: *const CensTailSample,
    estimator: CensTailEstimator,
    k: usize,
    level: f64,
    out_value: *mut f64,
    out_std_err: *mut f64,
    out_lower: *mut f64,
    out_upper: *mut f64,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let id = EstimatorId::from(estimator);
        let r = lib(estimate_report(s, id, k, Some(level)))?;
        let (Some(se), Some((lo, hi))) = (r.std_err, r.ci) else {
            return Err((
                CensTailStatus::Undefined,
                format!("no standard error available for {id}"),
            ));
        };
        write(out_value, r.value, "out_value")?;
        write(out_std_err, se, "out_std_err")?;
        write(out_lower, lo, "out_lower")?;
        write(out_upper, hi, "out_upper")
    })
}

/// Kolmogorov–Smirnov and Cramér–von Mises distances at threshold `k`.
///
/// # Safety
/// `sample` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_gof_statistics(
    sample: *const CensTailSample,
    k: usize,
    out_ks: *mut f64,
    out_cvm: *mut f64,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let (ks, cvm) = lib(gof_statistics(s, k))?;
        write(out_ks, ks, "out_ks")?;
        write(out_cvm, cvm, "out_cvm")
    })
}

/// Bootstrap p-values of the two distances (`reps` >= 100).
///
/// # Safety
/// `sample` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_gof_pvalues(
    sample: *const CensTailSample,
    k: usize,
    reps: usize,
    seed: u64,
    out_p_ks: *mut f64,
    out_p_cvm: *mut f64,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let r = lib(gof_pvalue(s, k, reps, seed))?;
        write(out_p_ks, r.p_value_ks.unwrap_or(f64::NAN), "out_p_ks")?;
        write(out_p_cvm, r.p_value_cvm.unwrap_or(f64::NAN), "out_p_cvm")
    })
}

/// Reiss–Thomas choice of `k` in `[k_min, k_max]`.
///
/// # Safety
/// `sample` must be a live handle and `out_k` writable.
#[no_mangle]
pub unsafe extern "C" fn censtail_select_k(
    sample: *const CensTailSample,
    estimator: CensTailEstimator,
    theta: f64,
    k_min: usize,
    k_max: usize,
    out_k: *mut usize,
) -> CensTailStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        let sel = lib(reiss_thomas_k(s, estimator.into(), theta, k_min, k_max))?;
        write(out_k, sel.k_star, "out_k")
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn censtail_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
