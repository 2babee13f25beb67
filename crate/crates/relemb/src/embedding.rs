//! The word-embedding matrix: initialization, persistence, and lookup.
//!
//! Row `i` is the d-dimensional vector of vocabulary word `i`. Two on-disk
//! formats are supported: a `word v1 ... vd` text format compatible with
//! common pre-trained vector releases, and a compact binary format that
//! round-trips bit-exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::binio::{self, BinReader};
use crate::corpus::{Vocabulary, WordId};
use crate::error::{Error, Result};

const EMBED_MAGIC: &[u8; 8] = b"RELEMB01";

/// Dense M x d matrix of word vectors plus the owning vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dim: usize,
    /// Row-major M x d storage.
    rows: Vec<f64>,
}

impl EmbeddingMatrix {
    /// I.i.d. standard Gaussian entries from a seeded generator.
    pub fn init_random(vocab: Vocabulary, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Usage("embedding dimensionality must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..vocab.len() * dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Ok(EmbeddingMatrix { vocab, dim, rows })
    }

    /// Loads pre-trained vectors in the `word v1 ... vd` text format.
    ///
    /// Vocabulary words missing from the file keep their seeded random row;
    /// the returned coverage is the fraction found. The dimensionality comes
    /// from the file and must be consistent across lines.
    pub fn load_pretrained(path: &Path, vocab: Vocabulary, seed: u64) -> Result<(Self, f64)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut dim: Option<usize> = None;
        let mut loaded: HashMap<String, Vec<f64>> = HashMap::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields
                .next()
                .ok_or_else(|| Error::format(path, format!("line {}: empty line", lineno + 1)))?;
            let values: std::result::Result<Vec<f64>, _> =
                fields.map(|v| v.parse::<f64>()).collect();
            let values = values.map_err(|_| {
                Error::format(path, format!("line {}: bad vector component", lineno + 1))
            })?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: values.len(),
                        context: format!("{}:{}", path.display(), lineno + 1),
                    });
                }
                _ => {}
            }
            loaded.insert(word.to_string(), values);
        }
        let dim = dim.ok_or_else(|| Error::format(path, "no vectors in file"))?;

        let mut matrix = EmbeddingMatrix::init_random(vocab, dim, seed)?;
        let mut covered = 0usize;
        for id in 0..matrix.vocab.len() as WordId {
            if let Some(values) = loaded.get(matrix.vocab.word(id)) {
                matrix.row_mut(id).copy_from_slice(values);
                covered += 1;
            }
        }
        let coverage = covered as f64 / matrix.vocab.len().max(1) as f64;
        Ok((matrix, coverage))
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn word_count(&self) -> usize {
        self.vocab.len()
    }

    pub fn row(&self, id: WordId) -> &[f64] {
        let i = id as usize * self.dim;
        &self.rows[i..i + self.dim]
    }

    pub fn row_mut(&mut self, id: WordId) -> &mut [f64] {
        let i = id as usize * self.dim;
        &mut self.rows[i..i + self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocab.id(word).map(|id| self.row(id))
    }

    /// Flat row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.rows
    }

    /// Scan for NaN/Inf entries; names the offending word on failure.
    pub fn validate_finite(&self) -> Result<()> {
        for id in 0..self.vocab.len() as WordId {
            if self.row(id).iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "embedding row for {:?} (id {id})",
                    self.vocab.word(id)
                )));
            }
        }
        Ok(())
    }

    /// Binary format; round-trips bit-exactly.
    pub fn save_binary<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(EMBED_MAGIC)?;
        binio::write_u32(w, self.vocab.len() as u32)?;
        binio::write_u32(w, self.dim as u32)?;
        for word in self.vocab.words() {
            binio::write_str(w, word)?;
        }
        for &x in &self.rows {
            binio::write_f64(w, x)?;
        }
        Ok(())
    }

    pub fn save_binary_path(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.save_binary(&mut buf).map_err(|e| Error::io(path, e))?;
        crate::atomic_write(path, &buf)
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BinReader::new(BufReader::new(file), path);
        r.magic(EMBED_MAGIC)?;
        let m = r.u32()? as usize;
        let dim = r.u32()? as usize;
        let mut vocab = Vocabulary::new();
        for _ in 0..m {
            let w = r.str()?;
            vocab.intern(&w);
        }
        if vocab.len() != m {
            return Err(Error::format(path, "duplicate words in embedding file"));
        }
        let mut rows = Vec::with_capacity(m * dim);
        for _ in 0..m * dim {
            rows.push(r.f64()?);
        }
        Ok(EmbeddingMatrix { vocab, dim, rows })
    }

    /// Text format `word v1 ... vd`, one word per line. Components are
    /// printed with shortest round-trip formatting, so a save/load cycle
    /// reproduces the values exactly (well inside the 1e-6 contract).
    pub fn save_text_path(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        for id in 0..self.vocab.len() as WordId {
            let mut line = String::from(self.vocab.word(id));
            for x in self.row(id) {
                line.push(' ');
                line.push_str(&format!("{x}"));
            }
            line.push('\n');
            buf.extend_from_slice(line.as_bytes());
        }
        crate::atomic_write(path, &buf)
    }

    pub fn load_text(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut vocab = Vocabulary::new();
        let mut rows = Vec::new();
        let mut dim: Option<usize> = None;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap();
            let before = rows.len();
            for v in fields {
                rows.push(v.parse::<f64>().map_err(|_| {
                    Error::format(path, format!("line {}: bad vector component", lineno + 1))
                })?);
            }
            let d = rows.len() - before;
            match dim {
                None => dim = Some(d),
                Some(expected) if expected != d => {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: d,
                        context: format!("{}:{}", path.display(), lineno + 1),
                    });
                }
                _ => {}
            }
            if vocab.id(word).is_some() {
                return Err(Error::format(
                    path,
                    format!("line {}: duplicate word {word:?}", lineno + 1),
                ));
            }
            vocab.intern(word);
        }
        let dim = dim.ok_or_else(|| Error::format(path, "no vectors in file"))?;
        Ok(EmbeddingMatrix { vocab, dim, rows })
    }

    /// Loads either format, sniffing the binary magic.
    pub fn load_auto(path: &Path) -> Result<Self> {
        let mut head = [0u8; 8];
        let n = File::open(path)
            .map_err(|e| Error::io(path, e))?
            .read(&mut head)
            .map_err(|e| Error::io(path, e))?;
        if n == 8 && &head == EMBED_MAGIC {
            Self::load_binary(path)
        } else {
            Self::load_text(path)
        }
    }
}
