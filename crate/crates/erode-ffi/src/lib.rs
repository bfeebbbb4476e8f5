//! C ABI for the erode library.
//!
//! Conventions, shared by every function here:
//!
//! - Handles ([`ErodeStore`], [`ErodeModel`]) are opaque. Create and free
//!   them only through these functions; never free across allocators.
//! - Fallible functions return an [`ErodeStatus`]; `Ok` is 0. On any other
//!   status, [`erode_last_error_message`] yields a thread-local description
//!   of the failure. Output parameters are written only on `Ok` unless a
//!   function documents otherwise.
//! - Text arguments are NUL-terminated UTF-8. Strings returned as
//!   `char *` are owned by the caller and must be released with
//!   [`erode_string_free`].
//! - Panics never cross the boundary; they are caught and reported as
//!   [`ErodeStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use erode::optimizer::{
    inverse_solve, minimize_analytic, minimize_controlled_random, minimize_grid,
    minimize_pure_random, OptimizationResult, RandomSearchParams, Range,
};
use erode::polyfit::{fit, PolynomialModel};
use erode::reference::reference_by_label;
use erode::store::{parse_csv_lossy, QueryFilter, Store};
use erode::Error;

/// Result code of a fallible call. Zero is success; everything else is a
/// failure described by [`erode_last_error_message`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErodeStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A text argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument value was outside its documented domain.
    InvalidArgument = 3,
    /// Input text (CSV, store, or model format) could not be parsed.
    Parse = 4,
    /// A record failed validation.
    Validation = 5,
    /// Fitting failed (empty data, unsupported degree, singular system).
    Fit = 6,
    /// Optimization failed (bad range, unsupported method, bad parameters).
    Optimize = 7,
    /// A file could not be read or written.
    Io = 8,
    /// The caller-provided buffer is too small; the required size was
    /// written to the count output.
    BufferTooSmall = 9,
    /// An internal panic was caught at the boundary.
    Panic = 10,
}

/// Opaque experiment store handle.
pub struct ErodeStore(Store);

/// Opaque polynomial model handle.
pub struct ErodeModel(PolynomialModel);

/// Result of a minimization, mirrored into a plain C struct.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ErodeOptimum {
    /// Power argument of the minimum, in watts.
    pub argmin_w: f64,
    /// Model value at the minimum, in seconds.
    pub min_s: f64,
    /// Number of model evaluations performed.
    pub evaluations: u64,
    /// Whether the method's own convergence criterion was met.
    pub converged: bool,
    /// Whether the minimum is physically meaningful (positive time).
    pub physically_valid: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean: String = message.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    let stored = CString::new(clean).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

fn fail(status: ErodeStatus, message: impl AsRef<str>) -> ErodeStatus {
    set_error(message.as_ref());
    status
}

fn status_of(err: &Error) -> ErodeStatus {
    match err {
        Error::FieldCount { .. }
        | Error::NumberParse { .. }
        | Error::IdParse { .. }
        | Error::BadHeader { .. }
        | Error::VersionMismatch { .. }
        | Error::IdOrder { .. } => ErodeStatus::Parse,
        Error::InvalidRow { .. } | Error::InvalidRecord { .. } => ErodeStatus::Validation,
        Error::EmptyDataset
        | Error::NonFiniteData { .. }
        | Error::DegreeOutOfRange { .. }
        | Error::TooFewPoints { .. }
        | Error::SingularSystem { .. }
        | Error::NoReports
        | Error::InvalidCoefficients => ErodeStatus::Fit,
        Error::InvalidRange { .. }
        | Error::AnalyticUnsupported { .. }
        | Error::InvalidParameter { .. } => ErodeStatus::Optimize,
        Error::Io { .. } | Error::RawIo(_) => ErodeStatus::Io,
    }
}

fn fail_with(err: &Error) -> ErodeStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guarded(f: impl FnOnce() -> ErodeStatus) -> ErodeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(ErodeStatus::Panic, "internal panic caught at the C boundary"),
    }
}

/// Reads a required UTF-8 string argument.
///
/// # Safety
/// `ptr`, when non-null, must point to a NUL-terminated string valid for
/// the duration of the call.
unsafe fn require_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, ErodeStatus> {
    if ptr.is_null() {
        return Err(fail(
            ErodeStatus::NullArgument,
            format!("{name} must not be null"),
        ));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(ErodeStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// Reads an optional UTF-8 string argument; null means absent.
///
/// # Safety
/// Same as [`require_str`] for non-null pointers.
unsafe fn optional_str(ptr: *const c_char, name: &str) -> Result<Option<String>, ErodeStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    require_str(ptr, name).map(|s| Some(s.to_string()))
}

macro_rules! require_ref {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                return fail(
                    ErodeStatus::NullArgument,
                    concat!($name, " must not be null"),
                )
            }
        }
    };
}

macro_rules! require_mut {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => {
                return fail(
                    ErodeStatus::NullArgument,
                    concat!($name, " must not be null"),
                )
            }
        }
    };
}

macro_rules! try_status {
    ($expr:expr) => {
        match $expr {
            Ok(value) => value,
            Err(status) => return status,
        }
    };
}

fn to_optimum(result: &OptimizationResult) -> ErodeOptimum {
    ErodeOptimum {
        argmin_w: result.argmin_p,
        min_s: result.min_value,
        evaluations: result.evaluations,
        converged: result.converged,
        physically_valid: result.physically_valid,
    }
}

/// Message describing the most recent failure on this thread, or an empty
/// string if nothing failed yet. The pointer stays valid until the next
/// failing call on the same thread; copy the text if it must outlive that.
#[no_mangle]
pub extern "C" fn erode_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a function documented to
/// transfer string ownership, or null. Freeing anything else, or freeing
/// twice, is undefined behavior.
#[no_mangle]
pub unsafe extern "C" fn erode_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an empty experiment store. Free with [`erode_store_free`].
#[no_mangle]
pub extern "C" fn erode_store_new() -> *mut ErodeStore {
    Box::into_raw(Box::new(ErodeStore(Store::new())))
}

/// Destroys a store handle. Null is ignored.
///
/// # Safety
/// `store` must be a handle from this library that has not been freed yet,
/// or null.
#[no_mangle]
pub unsafe extern "C" fn erode_store_free(store: *mut ErodeStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Loads a store from its line format on disk into a new handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn erode_store_open(
    path: *const c_char,
    out: *mut *mut ErodeStore,
) -> ErodeStatus {
    guarded(|| {
        let out = require_mut!(out, "out");
        let path = try_status!(unsafe { require_str(path, "path") });
        match Store::load(path) {
            Ok(store) => {
                *out = Box::into_raw(Box::new(ErodeStore(store)));
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Writes the store to disk in its line format.
///
/// # Safety
/// `store` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn erode_store_save(
    store: *const ErodeStore,
    path: *const c_char,
) -> ErodeStatus {
    guarded(|| {
        let store = require_ref!(store, "store");
        let path = try_status!(unsafe { require_str(path, "path") });
        match store.0.save(path) {
            Ok(()) => ErodeStatus::Ok,
            Err(e) => fail_with(&e),
        }
    })
}

/// Number of records in the store; 0 for a null handle.
///
/// # Safety
/// `store` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn erode_store_count(store: *const ErodeStore) -> usize {
    match unsafe { store.as_ref() } {
        Some(store) => store.0.len(),
        None => 0,
    }
}

/// Parses a record CSV document and adds every valid row to the store.
///
/// Unlike most functions here, the outputs are always written: `added`
/// and `rejected` (each optional) receive the number of rows stored and
/// refused. Returns `Ok` only if every row was accepted; otherwise the
/// status and [`erode_last_error_message`] describe the first failure,
/// while accepted rows remain in the store.
///
/// # Safety
/// `store` must be a live handle; `csv` a valid NUL-terminated string;
/// `added` and `rejected` must each be null or writable.
#[no_mangle]
pub unsafe extern "C" fn erode_store_ingest_csv(
    store: *mut ErodeStore,
    csv: *const c_char,
    added: *mut usize,
    rejected: *mut usize,
) -> ErodeStatus {
    guarded(|| {
        let store = require_mut!(store, "store");
        let csv = try_status!(unsafe { require_str(csv, "csv") });
        let (records, errors) = parse_csv_lossy(csv);
        let mut stored = 0usize;
        for record in records {
            match store.0.add(record) {
                Ok(_) => stored += 1,
                Err(e) => return fail_with(&e),
            }
        }
        if let Some(added) = unsafe { added.as_mut() } {
            *added = stored;
        }
        if let Some(rejected) = unsafe { rejected.as_mut() } {
            *rejected = errors.len();
        }
        match errors.first() {
            None => ErodeStatus::Ok,
            Some(e) => fail_with(e),
        }
    })
}

/// Fits a polynomial of the given degree to the records matching the
/// filter. Each filter string is an exact field match; pass null for any
/// field to leave it unconstrained. The fitted model is returned through
/// `out`; free it with [`erode_model_free`].
///
/// # Safety
/// `store` must be a live handle; filter strings must each be null or
/// valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_store_fit(
    store: *const ErodeStore,
    po_material: *const c_char,
    to_material: *const c_char,
    machine: *const c_char,
    operation: *const c_char,
    regime: *const c_char,
    degree: usize,
    out: *mut *mut ErodeModel,
) -> ErodeStatus {
    guarded(|| {
        let store = require_ref!(store, "store");
        let out = require_mut!(out, "out");
        let filter = QueryFilter {
            po_material: try_status!(unsafe { optional_str(po_material, "po_material") }),
            to_material: try_status!(unsafe { optional_str(to_material, "to_material") }),
            machine: try_status!(unsafe { optional_str(machine, "machine") }),
            operation: try_status!(unsafe { optional_str(operation, "operation") }),
            regime: try_status!(unsafe { optional_str(regime, "regime") }),
        };
        let dataset = match store.0.dataset(&filter) {
            Ok(d) => d,
            Err(e) => return fail_with(&e),
        };
        match fit(&dataset, degree) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(ErodeModel(report.model)));
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Destroys a model handle. Null is ignored.
///
/// # Safety
/// `model` must be a handle from this library that has not been freed yet,
/// or null.
#[no_mangle]
pub unsafe extern "C" fn erode_model_free(model: *mut ErodeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parses a model from its line format (see the library documentation).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_model_from_text(
    text: *const c_char,
    out: *mut *mut ErodeModel,
) -> ErodeStatus {
    guarded(|| {
        let out = require_mut!(out, "out");
        let text = try_status!(unsafe { require_str(text, "text") });
        match PolynomialModel::from_text(text) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(ErodeModel(model)));
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Serializes the model to its line format. The returned string is owned
/// by the caller (free with [`erode_string_free`]); null is returned on
/// failure with the error recorded for [`erode_last_error_message`].
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn erode_model_to_text(model: *const ErodeModel) -> *mut c_char {
    let Some(model) = (unsafe { model.as_ref() }) else {
        fail(ErodeStatus::NullArgument, "model must not be null");
        return std::ptr::null_mut();
    };
    match CString::new(model.0.to_text()) {
        Ok(text) => text.into_raw(),
        Err(_) => {
            fail(ErodeStatus::Panic, "model text contained an interior NUL");
            std::ptr::null_mut()
        }
    }
}

/// One of the bundled reference models: "linear", "quadratic", or "cubic".
///
/// # Safety
/// `label` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_reference_model(
    label: *const c_char,
    out: *mut *mut ErodeModel,
) -> ErodeStatus {
    guarded(|| {
        let out = require_mut!(out, "out");
        let label = try_status!(unsafe { require_str(label, "label") });
        match reference_by_label(label) {
            Some(model) => {
                *out = Box::into_raw(Box::new(ErodeModel(model)));
                ErodeStatus::Ok
            }
            None => fail(
                ErodeStatus::InvalidArgument,
                format!("unknown reference label {label:?}; expected linear, quadratic, or cubic"),
            ),
        }
    })
}

/// Degree of the model; 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn erode_model_degree(model: *const ErodeModel) -> usize {
    match unsafe { model.as_ref() } {
        Some(model) => model.0.degree(),
        None => 0,
    }
}

/// Copies the ascending coefficients (constant term first) into `buf`.
/// `count` always receives the number of coefficients; if `capacity` is
/// smaller than that, nothing else is written and the status is
/// `BufferTooSmall`. A null `buf` with `capacity` 0 queries the size.
///
/// # Safety
/// `model` must be a live handle; `buf` must be writable for `capacity`
/// doubles (or null when `capacity` is 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_model_coefficients(
    model: *const ErodeModel,
    buf: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let count = require_mut!(count, "count");
        let coeffs = model.0.coefficients();
        *count = coeffs.len();
        if capacity < coeffs.len() {
            return fail(
                ErodeStatus::BufferTooSmall,
                format!("need room for {} coefficients, got {capacity}", coeffs.len()),
            );
        }
        if buf.is_null() {
            return fail(ErodeStatus::NullArgument, "buf must not be null");
        }
        unsafe { std::ptr::copy_nonoverlapping(coeffs.as_ptr(), buf, coeffs.len()) };
        ErodeStatus::Ok
    })
}

/// Fitted power domain of the model, in watts.
///
/// # Safety
/// `model` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_model_domain(
    model: *const ErodeModel,
    lo: *mut f64,
    hi: *mut f64,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let lo = require_mut!(lo, "lo");
        let hi = require_mut!(hi, "hi");
        let (a, b) = model.0.domain();
        *lo = a;
        *hi = b;
        ErodeStatus::Ok
    })
}

/// Evaluates the model at power `p` (watts), writing seconds to `out`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_model_evaluate(
    model: *const ErodeModel,
    p: f64,
    out: *mut f64,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        *out = model.0.evaluate(p);
        ErodeStatus::Ok
    })
}

/// Derivative of the model with respect to power, as a new handle.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_model_derivative(
    model: *const ErodeModel,
    out: *mut *mut ErodeModel,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        *out = Box::into_raw(Box::new(ErodeModel(model.0.derivative())));
        ErodeStatus::Ok
    })
}

/// Exact minimization over `[lo, hi]` for models up to degree 3.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_minimize_analytic(
    model: *const ErodeModel,
    lo: f64,
    hi: f64,
    out: *mut ErodeOptimum,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        let range = match Range::new(lo, hi) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        match minimize_analytic(&model.0, &range) {
            Ok(result) => {
                *out = to_optimum(&result);
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Uniform grid search over `[lo, hi]` with `points` samples (at least 2,
/// endpoints included).
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_minimize_grid(
    model: *const ErodeModel,
    lo: f64,
    hi: f64,
    points: usize,
    out: *mut ErodeOptimum,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        let range = match Range::new(lo, hi) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        match minimize_grid(&model.0, &range, points) {
            Ok(result) => {
                *out = to_optimum(&result);
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Pure random search: `samples` uniform draws over `[lo, hi]` from a
/// deterministic generator seeded with `seed`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_minimize_pure_random(
    model: *const ErodeModel,
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
    out: *mut ErodeOptimum,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        let range = match Range::new(lo, hi) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        match minimize_pure_random(&model.0, &range, samples, seed) {
            Ok(result) => {
                *out = to_optimum(&result);
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Controlled random search: `samples_per_iteration` draws per window (at
/// least 2), window recentered on the best point and shrunk by
/// `shrink_factor` (strictly between zero and one) each iteration, stopping
/// once the window is narrower than `width_tolerance` watts or after
/// `max_iterations`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_minimize_controlled_random(
    model: *const ErodeModel,
    lo: f64,
    hi: f64,
    samples_per_iteration: usize,
    shrink_factor: f64,
    width_tolerance: f64,
    max_iterations: usize,
    seed: u64,
    out: *mut ErodeOptimum,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let out = require_mut!(out, "out");
        let range = match Range::new(lo, hi) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        let params = RandomSearchParams {
            samples_per_iteration,
            shrink_factor,
            width_tolerance,
            max_iterations,
            seed,
        };
        match minimize_controlled_random(&model.0, &range, &params) {
            Ok(result) => {
                *out = to_optimum(&result);
                ErodeStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Finds every power in `[lo, hi]` at which the model attains `target`
/// seconds, in ascending order. `count` always receives the number of
/// solutions; if `capacity` is smaller, nothing is copied and the status
/// is `BufferTooSmall`. A null `buf` with `capacity` 0 queries the size.
/// Zero solutions is a successful, empty result.
///
/// # Safety
/// `model` must be a live handle; `buf` must be writable for `capacity`
/// doubles (or null when `capacity` is 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erode_inverse_solve(
    model: *const ErodeModel,
    target: f64,
    lo: f64,
    hi: f64,
    buf: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> ErodeStatus {
    guarded(|| {
        let model = require_ref!(model, "model");
        let count = require_mut!(count, "count");
        let range = match Range::new(lo, hi) {
            Ok(r) => r,
            Err(e) => return fail_with(&e),
        };
        let roots = inverse_solve(&model.0, target, &range);
        *count = roots.len();
        if capacity < roots.len() {
            return fail(
                ErodeStatus::BufferTooSmall,
                format!("need room for {} solutions, got {capacity}", roots.len()),
            );
        }
        if roots.is_empty() {
            return ErodeStatus::Ok;
        }
        if buf.is_null() {
            return fail(ErodeStatus::NullArgument, "buf must not be null");
        }
        unsafe { std::ptr::copy_nonoverlapping(roots.as_ptr(), buf, roots.len()) };
        ErodeStatus::Ok
    })
}
