//! relemb learns word embeddings in which semantic relations between words
//! are explicitly encoded, and evaluates them on proportional-analogy tasks.
//!
//! The pipeline has six stages:
//!
//! 1. [`corpus`] scans raw text, counts word-pair co-occurrences, and
//!    extracts lexical patterns (`X is_a Y`) from the midfixes.
//! 2. [`association`] scores each (pattern, word pair) with positive
//!    pointwise mutual information and stores the sparse support sets.
//! 3. [`trainset`] mines relationally similar / dissimilar pattern pairs by
//!    ranking all pattern pairs by support-vector cosine.
//! 4. [`embedding`] owns the word-vector matrix: random or pre-trained
//!    initialization and text/binary persistence.
//! 5. [`trainer`] alternates pattern-embedding construction with word-vector
//!    updates that minimize a pairwise tanh prediction loss under AdaGrad.
//! 6. [`analogy`] answers a:b::c:? questions with CosAdd, CosMult, and
//!    PairDiff and produces accuracy reports.
//!
//! The [`cli`] module orchestrates the stages behind the `relemb` binary;
//! [`synth`] generates the bundled toy corpus with planted relations.

pub mod analogy;
pub mod association;
mod binio;
pub mod cli;
pub mod corpus;
pub mod embedding;
mod error;
pub mod synth;
pub mod trainer;
pub mod trainset;

pub use error::{Error, Result};

use std::io::Write;
use std::path::Path;

/// Writes a file atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// FNV-1a content hash of a file, for manifest records.
pub fn hash_file(path: &Path) -> Result<u64> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(binio::fnv1a64(&bytes))
}

/// FNV-1a hash of an in-memory byte string.
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    binio::fnv1a64(bytes)
}
