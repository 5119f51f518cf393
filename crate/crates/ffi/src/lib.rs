//! C ABI over `steering-core`.
//!
//! Every function returns a [`StStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`st_last_error`]. Scans are returned as opaque [`StScan`] handles that
//! must be released with [`st_scan_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use steering_core::entropy::{self, RenyiOrder};
use steering_core::{jointmeas, scenarios, Error, JointDistribution, ScanResult, Visibility};

/// Status code returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument is out of range (dimension, order, visibility, distribution...).
    InvalidArgument = 2,
    /// A numerical consistency check failed.
    Numerical = 3,
    /// Record index past the end of a scan.
    OutOfBounds = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

/// One row of a scan. Absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StRecord {
    pub parameter: f64,
    /// Rényi order; `INFINITY` for the min-entropy, NaN if the row has none.
    pub alpha: f64,
    pub beta: f64,
    pub detected_visibility: f64,
    pub exact_visibility: f64,
    pub gap: f64,
}

/// Both sides of the steering inequality at one visibility.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StCertificate {
    pub lhs: f64,
    pub bound: f64,
    /// `bound - lhs`; positive means steering is detected.
    pub violation: f64,
    pub alpha: f64,
    pub beta: f64,
    pub detected: bool,
}

/// Opaque scan result.
pub struct StScan(ScanResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StStatus {
    match e {
        Error::Internal(_) | Error::NonMonotone | Error::NonBracketing(_) => StStatus::Numerical,
        _ => StStatus::InvalidArgument,
    }
}

enum Fail {
    Core(Error),
    Status(StStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn null() -> Fail {
    Fail::Status(StStatus::NullPointer, "null pointer argument".into())
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> StStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            StStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(data: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn order_value(a: Option<RenyiOrder>) -> f64 {
    a.map_or(f64::NAN, |a| a.value())
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn st_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn st_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Rényi entropy in bits of `probs[0..n]`. Use `INFINITY` for the min-entropy.
///
/// # Safety
/// `probs` must point to `n` readable doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn st_renyi_entropy(probs: *const f64, n: usize, alpha: f64, out: *mut f64) -> StStatus {
    guard(|| {
        let p = entropy::Distribution::new(input(probs, n)?.to_vec())?;
        write(out, entropy::renyi_entropy(&p, RenyiOrder::new(alpha)?))
    })
}

/// Conditional Rényi entropy `H_α(X|Y)` in bits of a row-major `rows x cols`
/// table, rows indexing `X`.
///
/// # Safety
/// `table` must point to `rows * cols` readable doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn st_conditional_renyi(
    table: *const f64,
    rows: usize,
    cols: usize,
    alpha: f64,
    out: *mut f64,
) -> StStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Fail::Status(StStatus::InvalidArgument, "table too large".into()))?;
        let j = JointDistribution::new(rows, cols, input(table, n)?.to_vec())?;
        write(out, entropy::conditional_renyi(&j, RenyiOrder::new(alpha)?))
    })
}

/// Visibility below which noisy computational and Fourier measurements in
/// dimension `d` become jointly measurable.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn st_compatibility_threshold(d: usize, out: *mut f64) -> StStatus {
    guard(|| write(out, jointmeas::mub_jm_threshold_symmetric(d)?.value()))
}

/// Visibility above which the steering criterion of order `alpha` detects
/// steering for maximally entangled states measured in computational and
/// Fourier bases, to within `tol`.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn st_detection_threshold(d: usize, alpha: f64, tol: f64, out: *mut f64) -> StStatus {
    guard(|| write(out, scenarios::mub_threshold(d, RenyiOrder::new(alpha)?, tol)?.value()))
}

/// Evaluates the steering inequality at one visibility.
///
/// # Safety
/// `out` must point to one writable `StCertificate`.
#[no_mangle]
pub unsafe extern "C" fn st_certificate(d: usize, visibility: f64, alpha: f64, out: *mut StCertificate) -> StStatus {
    guard(|| {
        let c = scenarios::mub_certificate(d, Visibility::new(visibility)?, RenyiOrder::new(alpha)?)?;
        write(
            out,
            StCertificate {
                lhs: c.lhs,
                bound: c.bound,
                violation: c.violation,
                alpha: c.alpha.value(),
                beta: c.beta.value(),
                detected: c.detects_steering(),
            },
        )
    })
}

unsafe fn emit_scan(result: ScanResult, out: *mut *mut StScan) -> Result<(), Fail> {
    write(out, Box::into_raw(Box::new(StScan(result))))
}

/// Detection thresholds over dimensions `dims[0..n_dims]` and orders
/// `alphas[0..n_alphas]`.
///
/// # Safety
/// The arrays must be readable for their lengths; `out` must be writable.
/// The handle written to `out` must be released with `st_scan_free`.
#[no_mangle]
pub unsafe extern "C" fn st_scan_dimensions(
    dims: *const usize,
    n_dims: usize,
    alphas: *const f64,
    n_alphas: usize,
    tol: f64,
    out: *mut *mut StScan,
) -> StStatus {
    guard(|| {
        let alphas = input(alphas, n_alphas)?
            .iter()
            .map(|&a| RenyiOrder::new(a))
            .collect::<Result<Vec<_>, _>>()?;
        let result = scenarios::fig1_scan(input(dims, n_dims)?, &alphas, tol)?;
        emit_scan(result, out)
    })
}

/// Thresholds for `n_cases` random pairs of qubit measurements drawn from `seed`.
///
/// # Safety
/// `out` must be writable; release the handle with `st_scan_free`.
#[no_mangle]
pub unsafe extern "C" fn st_scan_qubit_random(n_cases: usize, seed: u64, tol: f64, out: *mut *mut StScan) -> StStatus {
    guard(|| emit_scan(scenarios::qubit_random_povm_check(n_cases, seed, tol)?, out))
}

/// Number of records in `scan`.
///
/// # Safety
/// `scan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_scan_len(scan: *const StScan, out: *mut usize) -> StStatus {
    guard(|| {
        let scan = scan.as_ref().ok_or_else(null)?;
        write(out, scan.0.records.len())
    })
}

/// Copies record `index` of `scan` into `out`.
///
/// # Safety
/// `scan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_scan_record(scan: *const StScan, index: usize, out: *mut StRecord) -> StStatus {
    guard(|| {
        let scan = scan.as_ref().ok_or_else(null)?;
        let r = scan.0.records.get(index).ok_or_else(|| {
            Fail::Status(
                StStatus::OutOfBounds,
                format!("record {index} of {}", scan.0.records.len()),
            )
        })?;
        write(
            out,
            StRecord {
                parameter: r.parameter,
                alpha: order_value(r.alpha),
                beta: order_value(r.beta()),
                detected_visibility: r.detected.value(),
                exact_visibility: r.exact.map_or(f64::NAN, |e| e.value()),
                gap: r.gap.unwrap_or(f64::NAN),
            },
        )
    })
}

/// Releases a scan handle. Null is ignored.
///
/// # Safety
/// `scan` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn st_scan_free(scan: *mut StScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}
