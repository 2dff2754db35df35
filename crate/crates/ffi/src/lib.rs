//! C interface to `biclust-tw`.
//!
//! Matrices and assignments are opaque handles created by the library and
//! released with the matching `*_free` function. Every fallible function
//! returns a [`BiclustStatus`]; on failure a message is available from
//! [`biclust_last_error`] on the same thread until the next call.
//! Outputs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use biclust_tw::localization::{localize, EntropyKind, LocalizerConfig};
use biclust_tw::synthgen::{generate, Distribution, GeneratorSpec, LayoutSpec};
use biclust_tw::tw::{default_table, run_test_with, select_k_report, SelectConfig, TestOptions};
use biclust_tw::{io, BiclusterAssignment, Error, ObservedMatrix};
use ndarray::Array2;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiclustStatus {
    Ok = 0,
    /// Null pointer, zero size or other malformed argument.
    InvalidArgument = 1,
    InvalidMatrix = 2,
    InvalidAssignment = 3,
    /// A group is empty, constant or has non-positive spread.
    DegenerateGroup = 4,
    AlphaOutOfRange = 5,
    /// No hypothesis up to the maximum was accepted.
    NotAccepted = 6,
    NoConvergence = 7,
    /// The requested bicluster or cluster counts do not fit the matrix.
    Infeasible = 8,
    InvalidConfig = 9,
    Io = 10,
    TableFormat = 11,
    /// The library panicked; the handle arguments are left untouched.
    Panic = 12,
}

impl From<&Error> for BiclustStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidMatrix(_) | Error::ShapeMismatch { .. } | Error::Csv(_) => {
                BiclustStatus::InvalidMatrix
            }
            Error::InvalidAssignment(_)
            | Error::Overlap { .. }
            | Error::EmptyBackground
            | Error::EmptyRectangle(_) => BiclustStatus::InvalidAssignment,
            Error::EmptyGroup(_) | Error::DegenerateGroup(_) | Error::NonPositiveStd(_) => {
                BiclustStatus::DegenerateGroup
            }
            Error::AlphaOutOfRange(_) => BiclustStatus::AlphaOutOfRange,
            Error::NotAccepted { .. } => BiclustStatus::NotAccepted,
            Error::NoConvergence { .. } => BiclustStatus::NoConvergence,
            Error::InfeasibleInit { .. }
            | Error::LTooLarge { .. }
            | Error::LayoutInfeasible { .. } => BiclustStatus::Infeasible,
            Error::EmptyEnsemble | Error::InvalidConfig(_) | Error::Json(_) => {
                BiclustStatus::InvalidConfig
            }
            Error::Io { .. } => BiclustStatus::Io,
            Error::TableFormat(_) => BiclustStatus::TableFormat,
        }
    }
}

/// Data family, selecting the entropy of the profile likelihood and the
/// generator preset.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiclustFamily {
    Gaussian = 0,
    Bernoulli = 1,
    Poisson = 2,
}

impl From<BiclustFamily> for EntropyKind {
    fn from(f: BiclustFamily) -> Self {
        match f {
            BiclustFamily::Gaussian => EntropyKind::Gaussian,
            BiclustFamily::Bernoulli => EntropyKind::Bernoulli,
            BiclustFamily::Poisson => EntropyKind::Poisson,
        }
    }
}

/// Dense real matrix.
pub struct BiclustMatrix(ObservedMatrix);

/// Bicluster assignment; label 0 is the background.
pub struct BiclustAssignment(BiclusterAssignment);

/// Outcome of one test.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BiclustTestResult {
    /// Number of biclusters in the tested assignment.
    pub k0: usize,
    /// Centered and scaled largest eigenvalue.
    pub statistic: f64,
    /// Largest eigenvalue of the residual Gram matrix.
    pub lambda1: f64,
    pub threshold: f64,
    pub reject: bool,
    pub a_tw: f64,
    pub b_tw: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

struct Failure(BiclustStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(BiclustStatus::from(&e), format!("{}: {e}", e.kind()))
    }
}

fn invalid(message: &str) -> Failure {
    Failure(BiclustStatus::InvalidArgument, message.to_owned())
}

/// Runs `f`, converting errors and panics to a status and recording the
/// message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BiclustStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BiclustStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {detail}"));
            BiclustStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| invalid(&format!("{name} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| invalid(&format!("{name} is null")))
}

unsafe fn slice<'a, T>(data: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if data.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

fn element_count(n: usize, p: usize) -> Result<usize, Failure> {
    n.checked_mul(p)
        .ok_or_else(|| invalid("matrix dimensions overflow"))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn biclust_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn biclust_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies an `n x p` row-major array into a new matrix.
///
/// # Safety
/// `data` must point to `n * p` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_matrix_new(
    data: *const f64,
    n: usize,
    p: usize,
    out: *mut *mut BiclustMatrix,
) -> BiclustStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let values = slice(data, element_count(n, p)?, "data")?;
        let m = ObservedMatrix::from_row_major(n, p, values.to_vec())?;
        *out = Box::into_raw(Box::new(BiclustMatrix(m)));
        Ok(())
    })
}

/// Reads a matrix CSV file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_matrix_read_csv(
    path: *const c_char,
    out: *mut *mut BiclustMatrix,
) -> BiclustStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if path.is_null() {
            return Err(invalid("path is null"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        let m = io::read_matrix(path)?;
        *out = Box::into_raw(Box::new(BiclustMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be a live matrix handle; `n` and `p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_matrix_dims(
    m: *const BiclustMatrix,
    n: *mut usize,
    p: *mut usize,
) -> BiclustStatus {
    guard(|| {
        let (rows, cols) = deref(m, "matrix")?.0.dim();
        *out_ptr(n, "n")? = rows;
        *out_ptr(p, "p")? = cols;
        Ok(())
    })
}

/// Copies the entries in row-major order into `buffer` of length `len`,
/// which must be at least `n * p`.
///
/// # Safety
/// `m` must be a live matrix handle and `buffer` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn biclust_matrix_copy(
    m: *const BiclustMatrix,
    buffer: *mut f64,
    len: usize,
) -> BiclustStatus {
    guard(|| {
        let values = deref(m, "matrix")?.0.as_slice();
        if buffer.is_null() {
            return Err(invalid("buffer is null"));
        }
        if len < values.len() {
            return Err(invalid("buffer too small"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn biclust_matrix_free(m: *mut BiclustMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Builds an assignment from `n x p` row-major labels `0..=K`.
///
/// # Safety
/// `labels` must point to `n * p` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_assignment_new(
    labels: *const u32,
    n: usize,
    p: usize,
    out: *mut *mut BiclustAssignment,
) -> BiclustStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let labels = slice(labels, element_count(n, p)?, "labels")?;
        let g =
            Array2::from_shape_vec((n, p), labels.to_vec()).map_err(|e| invalid(&e.to_string()))?;
        let g = BiclusterAssignment::from_labels(g)?;
        *out = Box::into_raw(Box::new(BiclustAssignment(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be a live assignment handle; `k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_assignment_k(
    g: *const BiclustAssignment,
    k: *mut usize,
) -> BiclustStatus {
    guard(|| {
        *out_ptr(k, "k")? = deref(g, "assignment")?.0.k();
        Ok(())
    })
}

/// Copies the labels in row-major order into `buffer` of length `len`.
///
/// # Safety
/// `g` must be a live assignment handle and `buffer` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn biclust_assignment_copy(
    g: *const BiclustAssignment,
    buffer: *mut u32,
    len: usize,
) -> BiclustStatus {
    guard(|| {
        let labels = deref(g, "assignment")?.0.as_slice();
        if buffer.is_null() {
            return Err(invalid("buffer is null"));
        }
        if len < labels.len() {
            return Err(invalid("buffer too small"));
        }
        ptr::copy_nonoverlapping(labels.as_ptr(), buffer, labels.len());
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn biclust_assignment_free(g: *mut BiclustAssignment) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Upper-tail TW1 quantile `t(alpha)` for `alpha` in `[0.001, 0.5]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_tw1_quantile(alpha: f64, out: *mut f64) -> BiclustStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = default_table()?.quantile(alpha)?;
        Ok(())
    })
}

/// Tests whether `g` explains all structure in `m` at level `alpha`.
///
/// # Safety
/// `m` and `g` must be live handles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_test(
    m: *const BiclustMatrix,
    g: *const BiclustAssignment,
    alpha: f64,
    out: *mut BiclustTestResult,
) -> BiclustStatus {
    guard(|| {
        let (a, g) = (&deref(m, "matrix")?.0, &deref(g, "assignment")?.0);
        let out = out_ptr(out, "out")?;
        let t = run_test_with(a, g, alpha, &TestOptions::default(), default_table()?)?;
        *out = BiclustTestResult {
            k0: t.k0,
            statistic: t.statistic,
            lambda1: t.lambda1,
            threshold: t.threshold,
            reject: t.reject,
            a_tw: t.a_tw,
            b_tw: t.b_tw,
        };
        Ok(())
    })
}

/// Smallest accepted `K0 <= k_max` with default localizer settings.
/// Returns `NotAccepted` when every hypothesis is rejected.
///
/// # Safety
/// `m` must be a live handle and `k_hat` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_select_k(
    m: *const BiclustMatrix,
    family: BiclustFamily,
    alpha: f64,
    k_max: usize,
    seed: u64,
    k_hat: *mut usize,
) -> BiclustStatus {
    guard(|| {
        let a = &deref(m, "matrix")?.0;
        let k_hat = out_ptr(k_hat, "k_hat")?;
        let config = SelectConfig {
            alpha,
            k_max,
            seed,
            localizer: LocalizerConfig {
                entropy: family.into(),
                ..LocalizerConfig::default()
            },
            test: TestOptions::default(),
        };
        let report = select_k_report(a, &config, default_table()?)?;
        match report.k_hat {
            Some(k) => {
                *k_hat = k;
                Ok(())
            }
            None => Err(Error::NotAccepted {
                trace: report.trace,
            }
            .into()),
        }
    })
}

/// Estimates an assignment with `k0` biclusters by simulated annealing.
///
/// # Safety
/// `m` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_localize(
    m: *const BiclustMatrix,
    family: BiclustFamily,
    k0: usize,
    seed: u64,
    out: *mut *mut BiclustAssignment,
) -> BiclustStatus {
    guard(|| {
        let a = &deref(m, "matrix")?.0;
        let out = out_ptr(out, "out")?;
        let config = LocalizerConfig {
            entropy: family.into(),
            ..LocalizerConfig::default()
        };
        let loc = localize(a, k0, &config, seed)?;
        *out = Box::into_raw(Box::new(BiclustAssignment(loc.assignment)));
        Ok(())
    })
}

/// Draws an `n x p` matrix with `k` staircase biclusters from the family's
/// default parameters, returning it with the generating assignment.
///
/// # Safety
/// `matrix` and `assignment` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biclust_generate(
    family: BiclustFamily,
    k: usize,
    n: usize,
    p: usize,
    seed: u64,
    matrix: *mut *mut BiclustMatrix,
    assignment: *mut *mut BiclustAssignment,
) -> BiclustStatus {
    guard(|| {
        let matrix = out_ptr(matrix, "matrix")?;
        let assignment = out_ptr(assignment, "assignment")?;
        let spec = GeneratorSpec {
            distribution: Distribution::preset(family.into(), k),
            layout: LayoutSpec::new(k, n, p),
            seed,
        };
        let (a, g) = generate(&spec)?;
        *matrix = Box::into_raw(Box::new(BiclustMatrix(a)));
        *assignment = Box::into_raw(Box::new(BiclustAssignment(g)));
        Ok(())
    })
}
