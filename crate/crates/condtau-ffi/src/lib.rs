//! C ABI over the condtau library: opaque sample handles, integer error
//! codes, and a thread-local last-error message. The generated header is
//! include/condtau.h.

use condtau::bandwidth::{self, CvConfig};
use condtau::estimators::{self, ConcordanceKind, TauKind};
use condtau::inference;
use condtau::kernels::{KernelFamily, KernelSpec};
use condtau::sample::Sample;
use condtau::Error;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::slice;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondtauStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// The estimator is undefined at the query point (no weight in the
    /// window, or a single observation carries all of it).
    Undefined = 2,
    NullPointer = 3,
    InternalError = 4,
}

/// Opaque sample handle.
pub struct CondtauSample {
    inner: Sample,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let cstring = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = cstring);
}

fn status_of(err: &Error) -> CondtauStatus {
    set_error(&err.to_string());
    match err {
        Error::AllWeightsZero { .. }
        | Error::DegenerateWindow { .. }
        | Error::TooFewEffective { .. }
        | Error::ZeroDensity { .. } => CondtauStatus::Undefined,
        _ => CondtauStatus::InvalidArgument,
    }
}

fn kernel_of(kernel: c_int, p: usize) -> Result<KernelSpec, CondtauStatus> {
    let family = match kernel {
        0 => KernelFamily::Epanechnikov,
        1 => KernelFamily::Gaussian,
        2 => KernelFamily::UniformBox,
        other => {
            set_error(&format!("unknown kernel code {other}"));
            return Err(CondtauStatus::InvalidArgument);
        }
    };
    KernelSpec::new(family, p, 2).map_err(|e| status_of(&e))
}

fn kind_of(kind: c_int) -> Result<TauKind, CondtauStatus> {
    match kind {
        1 => Ok(TauKind::Tau1),
        2 => Ok(TauKind::Tau2),
        3 => Ok(TauKind::Tau3),
        4 => Ok(TauKind::TauTilde),
        other => {
            set_error(&format!("unknown estimator code {other} (1, 2, 3 or 4)"));
            Err(CondtauStatus::InvalidArgument)
        }
    }
}

/// Copies the last error message of this thread into `buffer` (truncated to
/// `length` bytes including the terminating NUL). Returns the full message
/// length.
///
/// # Safety
/// `buffer` must point to `length` writable bytes, or be null.
#[no_mangle]
pub unsafe extern "C" fn condtau_last_error(buffer: *mut c_char, length: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && length > 0 {
            let n = bytes.len().min(length);
            slice::from_raw_parts_mut(buffer as *mut u8, n).copy_from_slice(&bytes[..n]);
            *buffer.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Builds a sample of n observations with a p-dimensional covariate.
/// `z` is row-major with n*p entries. Returns null on invalid input.
///
/// # Safety
/// `x1` and `x2` must point to n doubles, `z` to n*p doubles.
#[no_mangle]
pub unsafe extern "C" fn condtau_sample_new(
    x1: *const f64,
    x2: *const f64,
    z: *const f64,
    n: usize,
    p: usize,
) -> *mut CondtauSample {
    if x1.is_null() || x2.is_null() || z.is_null() {
        set_error("null data pointer");
        return std::ptr::null_mut();
    }
    let x1 = slice::from_raw_parts(x1, n).to_vec();
    let x2 = slice::from_raw_parts(x2, n).to_vec();
    let z = slice::from_raw_parts(z, n * p).to_vec();
    match Sample::new(x1, x2, z, p) {
        Ok(inner) => Box::into_raw(Box::new(CondtauSample { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Frees a sample handle. Null is ignored.
///
/// # Safety
/// `sample` must come from `condtau_sample_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn condtau_sample_free(sample: *mut CondtauSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

unsafe fn borrow<'a>(sample: *const CondtauSample) -> Result<&'a Sample, CondtauStatus> {
    if sample.is_null() {
        set_error("null sample handle");
        return Err(CondtauStatus::NullPointer);
    }
    Ok(&(*sample).inner)
}

/// Conditional Kendall's tau estimate at one query point.
/// `kind`: 1, 2, 3 for the raw estimators, 4 for the rescaled one.
/// `kernel`: 0 Epanechnikov, 1 Gaussian, 2 uniform box.
///
/// # Safety
/// `z` must point to p doubles (the sample's covariate dimension); `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn condtau_estimate(
    sample: *const CondtauSample,
    z: *const f64,
    kind: c_int,
    kernel: c_int,
    h: f64,
    out: *mut f64,
) -> CondtauStatus {
    if z.is_null() || out.is_null() {
        set_error("null pointer argument");
        return CondtauStatus::NullPointer;
    }
    let s = match borrow(sample) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let kind = match kind_of(kind) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let spec = match kernel_of(kernel, s.dim()) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let zq = slice::from_raw_parts(z, s.dim());
    match estimators::tau_hat(kind, s, zq, &spec, h) {
        Ok(est) => {
            *out = est.value;
            CondtauStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Rule-of-thumb bandwidth alpha * sigma_hat(Z) * n^{-1/(4+p)}.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn condtau_rule_of_thumb(
    sample: *const CondtauSample,
    alpha: f64,
    out: *mut f64,
) -> CondtauStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CondtauStatus::NullPointer;
    }
    let s = match borrow(sample) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match bandwidth::rule_of_thumb(s, alpha) {
        Ok(h) => {
            *out = h;
            CondtauStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Leave-pair-out cross-validated bandwidth for the concordance function
/// g_k (k = 1, 2 or 3), searched on the default geometric grid.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn condtau_cv_bandwidth(
    sample: *const CondtauSample,
    k: c_int,
    n_pairs: usize,
    out: *mut f64,
) -> CondtauStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CondtauStatus::NullPointer;
    }
    let s = match borrow(sample) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let k = match u8::try_from(k).ok().and_then(|k| ConcordanceKind::from_index(k).ok()) {
        Some(k) => k,
        None => {
            set_error(&format!("k must be 1, 2 or 3, got {k}"));
            return CondtauStatus::InvalidArgument;
        }
    };
    let total = s.len() * (s.len() - 1) / 2;
    let config = match CvConfig::default_for(s, k, n_pairs.min(total.max(1))) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    match bandwidth::cv_select(s, &config) {
        Ok(sel) => {
            *out = sel.h_cv;
            CondtauStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Pointwise confidence interval around the estimate at `z`.
/// Writes lower bound, upper bound and standard error.
///
/// # Safety
/// `z` must point to p doubles; the three output pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn condtau_confidence_interval(
    sample: *const CondtauSample,
    z: *const f64,
    kind: c_int,
    kernel: c_int,
    h: f64,
    level: f64,
    truncate: c_int,
    out_lower: *mut f64,
    out_upper: *mut f64,
    out_se: *mut f64,
) -> CondtauStatus {
    if z.is_null() || out_lower.is_null() || out_upper.is_null() || out_se.is_null() {
        set_error("null pointer argument");
        return CondtauStatus::NullPointer;
    }
    let s = match borrow(sample) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let kind = match kind_of(kind) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let spec = match kernel_of(kernel, s.dim()) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let zq = slice::from_raw_parts(z, s.dim());
    let est = match estimators::tau_hat(kind, s, zq, &spec, h) {
        Ok(est) => est,
        Err(e) => return status_of(&e),
    };
    let var = match inference::estimate_variance(kind, s, zq, &spec, h) {
        Ok(var) => var,
        Err(e) => return status_of(&e),
    };
    match inference::confidence_interval(&est, &var, s.len(), h, s.dim(), level, truncate != 0) {
        Ok(ci) => {
            *out_lower = ci.lower;
            *out_upper = ci.upper;
            *out_se = ci.standard_error;
            CondtauStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}
