//! C ABI over a loaded cadx model.
//!
//! Every call returns a [`CadxStatus`]; on failure the calling thread's
//! message is available from [`cadx_last_error`] until its next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cadx::classifiers::{load_model, Classifier, Diagnosis, Model};
use cadx::error::{Error, ErrorKind};
use cadx::evaluation::{metrics, ConfusionCounts};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CadxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CadxLabel {
    Benign = 0,
    Malignant = 1,
    Inconclusive = 2,
}

/// Rates are NaN where undefined (zero denominator).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadxMetrics {
    pub sensitivity: f64,
    pub specificity: f64,
    pub ppv: f64,
    pub npv: f64,
    pub accuracy: f64,
    pub inconclusive_rate: f64,
    pub mcc: f64,
}

/// Opaque handle; immutable after load, so it may be shared across threads.
pub struct CadxModel {
    model: Model,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    // interior NULs would truncate the C string anyway
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: CadxStatus, msg: &str) -> CadxStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> CadxStatus {
    let status = match e.kind() {
        ErrorKind::Usage => CadxStatus::InvalidArgument,
        ErrorKind::Data => CadxStatus::DataError,
        ErrorKind::Numeric => CadxStatus::NumericError,
    };
    fail(status, &e.to_string())
}

fn guarded(f: impl FnOnce() -> CadxStatus) -> CadxStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(CadxStatus::Panic, "internal panic"))
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cadx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a model file. On success `*out` owns a handle to release with
/// [`cadx_model_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cadx_model_load(path: *const c_char, out: *mut *mut CadxModel) -> CadxStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            return fail(CadxStatus::NullPointer, "null argument to cadx_model_load");
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(p) => p,
            Err(_) => return fail(CadxStatus::InvalidArgument, "path is not valid UTF-8"),
        };
        match load_model(path) {
            Ok(model) => {
                let names = model
                    .feature_names()
                    .iter()
                    .map(|n| CString::new(n.as_str()).unwrap_or_default())
                    .collect();
                // SAFETY: `out` checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(CadxModel { model, names })) };
                CadxStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `model` must come from [`cadx_model_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cadx_model_free(model: *mut CadxModel) {
    if !model.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Input length expected by [`cadx_model_predict`]; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cadx_model_num_features(model: *const CadxModel) -> usize {
    // SAFETY: caller guarantees null or live.
    unsafe { model.as_ref() }.map_or(0, |m| m.names.len())
}

/// Name of feature `index`, owned by the handle; null when out of range.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cadx_model_feature_name(model: *const CadxModel, index: usize) -> *const c_char {
    // SAFETY: caller guarantees null or live.
    unsafe { model.as_ref() }
        .and_then(|m| m.names.get(index))
        .map_or(std::ptr::null(), |n| n.as_ptr())
}

/// Classifies one raw feature row of `len` values.
///
/// # Safety
/// `x` must point to `len` doubles; `score` and `label` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cadx_model_predict(
    model: *const CadxModel,
    x: *const f64,
    len: usize,
    score: *mut f64,
    label: *mut CadxLabel,
) -> CadxStatus {
    guarded(|| {
        if model.is_null() || x.is_null() || score.is_null() || label.is_null() {
            return fail(CadxStatus::NullPointer, "null argument to cadx_model_predict");
        }
        // SAFETY: non-null and live per the contract.
        let m = unsafe { &*model };
        if len != m.names.len() {
            return fail(
                CadxStatus::InvalidArgument,
                &format!("expected {} features, got {len}", m.names.len()),
            );
        }
        // SAFETY: caller guarantees `len` readable doubles.
        let row = unsafe { std::slice::from_raw_parts(x, len) };
        match m.model.predict(row) {
            Ok(p) => {
                // SAFETY: checked non-null above.
                unsafe {
                    *score = p.score;
                    *label = match p.label {
                        Diagnosis::Benign => CadxLabel::Benign,
                        Diagnosis::Malignant => CadxLabel::Malignant,
                        Diagnosis::Inconclusive => CadxLabel::Inconclusive,
                    };
                }
                CadxStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Diagnostic rates for a confusion table.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cadx_metrics(
    tp: usize,
    fp: usize,
    tn: usize,
    fn_: usize,
    inconclusive: usize,
    out: *mut CadxMetrics,
) -> CadxStatus {
    guarded(|| {
        if out.is_null() {
            return fail(CadxStatus::NullPointer, "null argument to cadx_metrics");
        }
        let r = metrics(&ConfusionCounts::new(tp, fp, tn, fn_, inconclusive));
        let v = |o: Option<f64>| o.unwrap_or(f64::NAN);
        // SAFETY: checked non-null above.
        unsafe {
            *out = CadxMetrics {
                sensitivity: v(r.sensitivity),
                specificity: v(r.specificity),
                ppv: v(r.ppv),
                npv: v(r.npv),
                accuracy: v(r.accuracy),
                inconclusive_rate: v(r.inconclusive_rate),
                mcc: v(r.mcc),
            }
        };
        CadxStatus::Ok
    })
}
