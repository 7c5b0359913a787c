//! C ABI over the `exemplars` crate.
//!
//! Every fallible function returns an [`ExStatus`]; on failure the message is
//! available from [`ex_last_error`] on the same thread. Objects are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use exemplars::classify::{src_classify, LabeledExemplars};
use exemplars::cluster::{esc_with_exemplars, EscParams};
use exemplars::dataset::{normalize_columns, synth_union_of_subspaces, SubspaceSpec};
use exemplars::ffs::{ffs_lazy, ffs_naive, select_random, ExemplarSet, FfsOptions};
use exemplars::metrics::{clustering_accuracy, clustering_fscore, imbalance};
use exemplars::{DataMatrix, Error, SolverOptions};
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidData = 3,
    NoConvergence = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExMethod {
    /// Farthest-first search with lazy re-evaluation.
    Ffs = 0,
    FfsNaive = 1,
    Random = 2,
}

/// Unit-norm points, optionally labeled.
pub struct ExDataset(DataMatrix);

/// Selected exemplar indices.
pub struct ExExemplarSet(ExemplarSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ExStatus {
    match e {
        Error::NoConvergence { .. } => ExStatus::NoConvergence,
        Error::Target { source, .. } => status_of(source),
        Error::ZeroColumn(_)
        | Error::InvalidData(_)
        | Error::Parse { .. }
        | Error::RaggedRows { .. }
        | Error::TooFewPoints(_)
        | Error::ZeroCode(_)
        | Error::EmptyGraph
        | Error::DegenerateHull => ExStatus::InvalidData,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Lp(_) => ExStatus::Internal,
        _ => ExStatus::InvalidArgument,
    }
}

struct Fail(ExStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ExStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ExStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ExStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside library".into());
            ExStatus::Internal
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out(src: &[usize], out: *mut usize, cap: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if cap < src.len() {
        return Err(Fail(
            ExStatus::BufferTooSmall,
            format!("buffer holds {cap}, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn ex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a dataset from `n` column-major points of dimension `dim`; columns
/// are normalized. `labels` may be null, otherwise it holds `n` entries.
///
/// # Safety
/// `values` must point to `dim * n` doubles and `labels` (if non-null) to `n`
/// entries. `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_new(
    values: *const f64,
    dim: usize,
    n: usize,
    labels: *const usize,
    out: *mut *mut ExDataset,
) -> ExStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = slice(values, dim * n, "values")?;
        let labels = if labels.is_null() {
            None
        } else {
            Some(slice(labels, n, "labels")?.to_vec())
        };
        let m = DataMatrix::new(DMatrix::from_column_slice(dim, n, v), labels)?;
        let ds = normalize_columns(&m)?;
        *out = Box::into_raw(Box::new(ExDataset(ds)));
        Ok(())
    })
}

/// Samples a labeled union of `n_subspaces` random subspaces of `ambient_dim`.
///
/// # Safety
/// `dims` and `counts` must each hold `n_subspaces` entries; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_synth(
    ambient_dim: usize,
    dims: *const usize,
    counts: *const usize,
    n_subspaces: usize,
    noise_sigma: f64,
    seed: u64,
    out: *mut *mut ExDataset,
) -> ExStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = SubspaceSpec {
            ambient_dim,
            dims: slice(dims, n_subspaces, "dims")?.to_vec(),
            counts: slice(counts, n_subspaces, "counts")?.to_vec(),
            noise_sigma,
            seed,
        };
        let ds = synth_union_of_subspaces(&spec)?;
        *out = Box::into_raw(Box::new(ExDataset(ds)));
        Ok(())
    })
}

/// Number of points, or 0 for null.
///
/// # Safety
/// `ds` must be null or a live dataset.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_len(ds: *const ExDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Ambient dimension, or 0 for null.
///
/// # Safety
/// `ds` must be null or a live dataset.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_dim(ds: *const ExDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.dim())
}

/// Copies the labels into `out` (capacity `cap`).
///
/// # Safety
/// `ds` must be a live dataset and `out` writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_labels(
    ds: *const ExDataset,
    out: *mut usize,
    cap: usize,
) -> ExStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        let labels =
            ds.0.labels()
                .ok_or_else(|| Fail(ExStatus::InvalidData, "dataset has no labels".into()))?;
        write_out(labels, out, cap)
    })
}

/// # Safety
/// `ds` must be null or a dataset not freed before.
#[no_mangle]
pub unsafe extern "C" fn ex_dataset_free(ds: *mut ExDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Selects `k` exemplars. `lambda` is ignored by `Random`.
///
/// # Safety
/// `ds` must be a live dataset; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ex_select(
    ds: *const ExDataset,
    method: ExMethod,
    lambda: f64,
    k: usize,
    seed: u64,
    out: *mut *mut ExExemplarSet,
) -> ExStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = FfsOptions::default();
        let set = match method {
            ExMethod::Ffs => ffs_lazy(&ds.0, lambda, k, seed, &opts)?,
            ExMethod::FfsNaive => ffs_naive(&ds.0, lambda, k, seed, &opts)?,
            ExMethod::Random => select_random(&ds.0, k, seed)?,
        };
        *out = Box::into_raw(Box::new(ExExemplarSet(set)));
        Ok(())
    })
}

/// Number of exemplars, or 0 for null.
///
/// # Safety
/// `set` must be null or a live exemplar set.
#[no_mangle]
pub unsafe extern "C" fn ex_exemplars_len(set: *const ExExemplarSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.indices.len())
}

/// Copies the indices in selection order.
///
/// # Safety
/// `set` must be a live exemplar set and `out` writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn ex_exemplars_indices(
    set: *const ExExemplarSet,
    out: *mut usize,
    cap: usize,
) -> ExStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("exemplar set"))?;
        write_out(&set.0.indices, out, cap)
    })
}

/// # Safety
/// `set` must be null or an exemplar set not freed before.
#[no_mangle]
pub unsafe extern "C" fn ex_exemplars_free(set: *mut ExExemplarSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Clusters every point of `ds` over the exemplars; writes one label per point.
///
/// # Safety
/// `ds` and `set` must be live; `labels_out` writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn ex_cluster(
    ds: *const ExDataset,
    set: *const ExExemplarSet,
    lambda: f64,
    t: usize,
    n_clusters: usize,
    seed: u64,
    labels_out: *mut usize,
    cap: usize,
) -> ExStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        let set = set.as_ref().ok_or_else(|| null("exemplar set"))?;
        let params = EscParams {
            lambda,
            t,
            n_clusters,
            seed,
            solver: SolverOptions::default(),
        };
        let r = esc_with_exemplars(&ds.0, &set.0.indices, &params)?;
        write_out(&r.assignment.labels, labels_out, cap)
    })
}

/// Classifies every point using the dataset labels of the exemplars.
///
/// # Safety
/// `ds` and `set` must be live; `labels_out` writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn ex_classify(
    ds: *const ExDataset,
    set: *const ExExemplarSet,
    lambda: f64,
    labels_out: *mut usize,
    cap: usize,
) -> ExStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        let set = set.as_ref().ok_or_else(|| null("exemplar set"))?;
        let ex = LabeledExemplars::from_dataset(&ds.0, &set.0.indices)?;
        let r = src_classify(&ds.0, &ex, lambda, &SolverOptions::default())?;
        write_out(&r.assignment.labels, labels_out, cap)
    })
}

/// Best-matching accuracy in percent.
///
/// # Safety
/// `truth` and `pred` must hold `n` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ex_accuracy(
    truth: *const usize,
    pred: *const usize,
    n: usize,
    out: *mut f64,
) -> ExStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = clustering_accuracy(slice(truth, n, "truth")?, slice(pred, n, "pred")?)?;
        Ok(())
    })
}

/// Best-matching F-score in percent.
///
/// # Safety
/// `truth` and `pred` must hold `n` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ex_fscore(
    truth: *const usize,
    pred: *const usize,
    n: usize,
    out: *mut f64,
) -> ExStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = clustering_fscore(slice(truth, n, "truth")?, slice(pred, n, "pred")?)?;
        Ok(())
    })
}

/// Imbalance of per-class counts in [0, 1].
///
/// # Safety
/// `counts` must hold `n` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ex_imbalance(counts: *const usize, n: usize, out: *mut f64) -> ExStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = imbalance(slice(counts, n, "counts")?)?;
        Ok(())
    })
}
