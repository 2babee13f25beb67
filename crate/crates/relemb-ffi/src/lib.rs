//! C ABI for the relemb pipeline.
//!
//! Embeddings are exposed through an opaque handle created by
//! [`relemb_embeddings_open`] and released by [`relemb_embeddings_free`].
//! Every fallible call returns a [`RelembStatus`]; the message for the most
//! recent failure on the current thread is available from
//! [`relemb_last_error_message`]. The generated header lives in
//! `include/relemb.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use relemb::analogy::{self, Measure};
use relemb::cli::{self, PipelineConfig};
use relemb::embedding::EmbeddingMatrix;
use relemb::Error;

/// Result codes; non-zero values signal failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelembStatus {
    Ok = 0,
    /// Invalid arguments or configuration.
    UsageError = 1,
    /// Missing or malformed data.
    DataError = 2,
    /// Numerical divergence.
    NumericError = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    BufferTooSmall = 6,
    InternalError = 7,
}

/// Analogy scoring functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelembMeasure {
    CosAdd = 0,
    CosMult = 1,
    PairDiff = 2,
}

impl From<RelembMeasure> for Measure {
    fn from(m: RelembMeasure) -> Measure {
        match m {
            RelembMeasure::CosAdd => Measure::CosAdd,
            RelembMeasure::CosMult => Measure::CosMult,
            RelembMeasure::PairDiff => Measure::PairDiff,
        }
    }
}

/// Benchmark file formats.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelembDatasetFormat {
    Google = 0,
    ChoiceTsv = 1,
}

/// Opaque embedding-matrix handle.
pub struct RelembEmbeddings {
    inner: EmbeddingMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> RelembStatus {
    match err.exit_code() {
        1 => RelembStatus::UsageError,
        3 => RelembStatus::NumericError,
        _ => RelembStatus::DataError,
    }
}

fn fail(err: &Error) -> RelembStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a closure, translating panics into `InternalError`.
fn guard<F: FnOnce() -> RelembStatus>(f: F) -> RelembStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            RelembStatus::InternalError
        }
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, RelembStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(RelembStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        RelembStatus::InvalidUtf8
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn relemb_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn relemb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads an embedding file (binary or `word v1 ... vd` text, sniffed) and
/// stores the new handle in `out`. The handle must be released with
/// [`relemb_embeddings_free`].
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relemb_embeddings_open(
    path: *const c_char,
    out: *mut *mut RelembEmbeddings,
) -> RelembStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return RelembStatus::NullPointer;
        }
        let path = match utf8_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match EmbeddingMatrix::load_auto(Path::new(path)) {
            Ok(matrix) => {
                *out = Box::into_raw(Box::new(RelembEmbeddings { inner: matrix }));
                RelembStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a handle returned by [`relemb_embeddings_open`]. Null is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer returned by `relemb_embeddings_open`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn relemb_embeddings_free(handle: *mut RelembEmbeddings) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of words in the vocabulary; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn relemb_embeddings_word_count(handle: *const RelembEmbeddings) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.word_count())
}

/// Vector dimensionality; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn relemb_embeddings_dim(handle: *const RelembEmbeddings) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.dim())
}

/// Whether `word` is in the vocabulary.
///
/// # Safety
/// `handle` must be null or a live handle; `word` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relemb_embeddings_contains(
    handle: *const RelembEmbeddings,
    word: *const c_char,
) -> bool {
    let Some(h) = handle.as_ref() else {
        return false;
    };
    match utf8_arg(word) {
        Ok(w) => h.inner.vector(w).is_some(),
        Err(_) => false,
    }
}

/// Scores the candidate pair (c, d) against the stem pair (a, b) under one
/// measure and writes the value to `out_score`.
///
/// # Safety
/// `handle` must be a live handle, the word arguments NUL-terminated
/// strings, and `out_score` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relemb_analogy_score(
    handle: *const RelembEmbeddings,
    measure: RelembMeasure,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    d: *const c_char,
    epsilon: f64,
    out_score: *mut f64,
) -> RelembStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("null embeddings handle");
            return RelembStatus::NullPointer;
        };
        if out_score.is_null() {
            set_error("null output pointer");
            return RelembStatus::NullPointer;
        }
        let mut vectors = Vec::with_capacity(4);
        for ptr in [a, b, c, d] {
            let word = match utf8_arg(ptr) {
                Ok(w) => w,
                Err(status) => return status,
            };
            match h.inner.vector(word) {
                Some(v) => vectors.push(v),
                None => {
                    set_error(&format!("word {word:?} not in vocabulary"));
                    return RelembStatus::DataError;
                }
            }
        }
        let score = analogy::score(
            measure.into(),
            epsilon,
            vectors[0],
            vectors[1],
            vectors[2],
            vectors[3],
        );
        *out_score = score.value;
        RelembStatus::Ok
    })
}

/// Answers a : b :: c : ? over the whole vocabulary and writes the top-ranked
/// word into `out_word` (NUL-terminated, at most `capacity` bytes).
///
/// # Safety
/// `handle` must be a live handle, the word arguments NUL-terminated
/// strings, and `out_word` writable for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn relemb_analogy_top(
    handle: *const RelembEmbeddings,
    measure: RelembMeasure,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    epsilon: f64,
    out_word: *mut c_char,
    capacity: usize,
) -> RelembStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("null embeddings handle");
            return RelembStatus::NullPointer;
        };
        if out_word.is_null() {
            set_error("null output buffer");
            return RelembStatus::NullPointer;
        }
        let (a, b, c) = match (utf8_arg(a), utf8_arg(b), utf8_arg(c)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        let ranking = match analogy::solve_open_vocab(a, b, c, &h.inner, measure.into(), epsilon) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let Some(&(top, _)) = ranking.first() else {
            set_error("vocabulary has no candidate words");
            return RelembStatus::DataError;
        };
        let word = h.inner.vocab().word(top);
        if word.len() + 1 > capacity {
            set_error(&format!(
                "buffer of {capacity} bytes cannot hold {} bytes",
                word.len() + 1
            ));
            return RelembStatus::BufferTooSmall;
        }
        std::ptr::copy_nonoverlapping(word.as_ptr(), out_word as *mut u8, word.len());
        *out_word.add(word.len()) = 0;
        RelembStatus::Ok
    })
}

/// Evaluates the embeddings on a benchmark file and writes the overall
/// accuracy in [0, 1] to `out_accuracy`.
///
/// # Safety
/// `handle` must be a live handle, `dataset_path` a NUL-terminated string,
/// and `out_accuracy` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relemb_evaluate_file(
    handle: *const RelembEmbeddings,
    dataset_path: *const c_char,
    format: RelembDatasetFormat,
    measure: RelembMeasure,
    epsilon: f64,
    out_accuracy: *mut f64,
) -> RelembStatus {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("null embeddings handle");
            return RelembStatus::NullPointer;
        };
        if out_accuracy.is_null() {
            set_error("null output pointer");
            return RelembStatus::NullPointer;
        }
        let path = match utf8_arg(dataset_path) {
            Ok(p) => PathBuf::from(p),
            Err(status) => return status,
        };
        let dataset = match format {
            RelembDatasetFormat::Google => analogy::parse_google(&path),
            RelembDatasetFormat::ChoiceTsv => analogy::parse_choice_tsv(&path),
        };
        let dataset = match dataset {
            Ok(d) => d,
            Err(e) => return fail(&e),
        };
        let report = analogy::evaluate(&dataset, &h.inner, measure.into(), epsilon);
        *out_accuracy = report.accuracy;
        RelembStatus::Ok
    })
}

/// Runs one pipeline stage (`extract`, `ppmi`, `mine-pairs`, `init`,
/// `train`, `eval`) or `all` against a configuration file.
///
/// # Safety
/// Both arguments must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn relemb_run_stage(
    config_path: *const c_char,
    stage: *const c_char,
) -> RelembStatus {
    guard(|| {
        let (config_path, stage) = match (utf8_arg(config_path), utf8_arg(stage)) {
            (Ok(p), Ok(s)) => (p, s),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let config = match PipelineConfig::load(Path::new(config_path)) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        let result = if stage == "all" {
            cli::run_all(&config)
        } else {
            match stage.parse() {
                Ok(stage) => cli::run_stage(&config, stage),
                Err(e) => return fail(&e),
            }
        };
        match result {
            Ok(()) => RelembStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}
