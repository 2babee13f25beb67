//! Mining relationally similar / dissimilar pattern pairs as training data.
//!
//! Each pattern becomes a sparse PPMI feature vector over word-pair ids. All
//! pattern pairs sharing at least one word pair are ranked by cosine
//! similarity: the top of the ranking becomes positive instances (t = 1) and
//! the bottom of the non-zero range becomes negatives (t = 0). Pairs with
//! zero similarity share no word pairs and are never materialized.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::association::AssociationStore;
use crate::corpus::{PairId, PatternId};
use crate::error::{Error, Result};

/// Sparse non-negative feature vector indexed by word-pair id.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    /// (pair id, value) sorted by pair id.
    pub entries: Vec<(PairId, f64)>,
    /// Size of the word-pair universe.
    pub dim: usize,
}

impl SparseVector {
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, x)| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// The pattern's support entries as a sparse vector over the pair universe.
pub fn pattern_feature_vector(store: &AssociationStore, p: PatternId) -> Result<SparseVector> {
    let support = store.pattern_support(p)?;
    if support.is_empty() {
        return Err(Error::EmptySupport { id: p });
    }
    Ok(SparseVector {
        entries: support.to_vec(),
        dim: store.pair_count(),
    })
}

/// Cosine similarity of two sparse vectors; in [0, 1] for non-negative input.
pub fn sparse_cosine(a: &SparseVector, b: &SparseVector) -> Result<f64> {
    if a.entries.is_empty() || b.entries.is_empty() {
        return Err(Error::Data("cosine of a zero vector is undefined".into()));
    }
    let mut dot = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        let (pa, xa) = a.entries[i];
        let (pb, xb) = b.entries[j];
        match pa.cmp(&pb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += xa * xb;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(dot / (a.norm() * b.norm()))
}

/// A ranked unordered pattern pair with strictly positive similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedPair {
    pub p1: PatternId,
    pub p2: PatternId,
    pub similarity: f64,
}

/// A training instance: two patterns and a binary relational-similarity
/// target. `mined_similarity` is the ranking cosine, kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainInstance {
    pub p1: PatternId,
    pub p2: PatternId,
    pub target: u8,
    pub mined_similarity: f64,
}

/// Ranks every unordered pattern pair with non-zero similarity, descending,
/// ties broken by (p1, p2) ascending.
///
/// Implemented with an inverted index from pair id to the patterns supported
/// by it, so only pattern pairs sharing a dimension are ever touched. The
/// per-dimension accumulation visits pair ids in ascending order, which keeps
/// each dot product's summation order identical to a dense evaluation.
pub fn rank_pattern_pairs(store: &AssociationStore) -> Vec<RankedPair> {
    let n = store.pattern_count();
    let mut norms = vec![0.0f64; n];
    for p in 0..n as PatternId {
        let support = store.pattern_support(p).expect("id in range");
        norms[p as usize] = support.iter().map(|&(_, f)| f * f).sum::<f64>().sqrt();
    }

    // pair id -> [(pattern, f)] in ascending pattern order.
    let mut inverted: Vec<Vec<(PatternId, f64)>> = vec![Vec::new(); store.pair_count()];
    for p in 0..n as PatternId {
        for &(pair, f) in store.pattern_support(p).expect("id in range") {
            inverted[pair as usize].push((p, f));
        }
    }

    let mut dots: HashMap<(PatternId, PatternId), f64> = HashMap::new();
    for postings in &inverted {
        for i in 0..postings.len() {
            let (pi, fi) = postings[i];
            for &(pj, fj) in &postings[i + 1..] {
                *dots.entry((pi, pj)).or_insert(0.0) += fi * fj;
            }
        }
    }

    let mut ranked: Vec<RankedPair> = dots
        .into_iter()
        .map(|((p1, p2), dot)| RankedPair {
            p1,
            p2,
            similarity: dot / (norms[p1 as usize] * norms[p2 as usize]),
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .expect("similarities are finite")
            .then_with(|| a.p1.cmp(&b.p1))
            .then_with(|| a.p2.cmp(&b.p2))
    });
    ranked
}

/// Mining parameters. With `neg_sample_window = Some(w)` the negatives are
/// sampled uniformly from the lowest `w` fraction of the non-zero ranking
/// instead of taking the strict bottom.
#[derive(Debug, Clone)]
pub struct MiningConfig {
    pub n_pos: usize,
    pub n_neg: usize,
    pub seed: u64,
    pub neg_sample_window: Option<f64>,
}

/// Selects `n_pos` positives from the top of the ranking and `n_neg`
/// negatives from the bottom of the non-zero range, then shuffles the union
/// with the seeded generator.
pub fn select_train_pairs(
    store: &AssociationStore,
    config: &MiningConfig,
) -> Result<Vec<TrainInstance>> {
    let ranked = rank_pattern_pairs(store);
    let needed = config.n_pos + config.n_neg;
    if needed > ranked.len() {
        return Err(Error::InsufficientTrainPairs {
            needed,
            available: ranked.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut instances: Vec<TrainInstance> = Vec::with_capacity(needed);
    for r in &ranked[..config.n_pos] {
        instances.push(TrainInstance {
            p1: r.p1,
            p2: r.p2,
            target: 1,
            mined_similarity: r.similarity,
        });
    }
    let negatives: Vec<&RankedPair> = match config.neg_sample_window {
        None => ranked[ranked.len() - config.n_neg..].iter().collect(),
        Some(w) => {
            if !(0.0 < w && w <= 1.0) {
                return Err(Error::Usage(format!(
                    "negative sampling window must be in (0, 1], got {w}"
                )));
            }
            let window = ((ranked.len() as f64 * w).ceil() as usize).max(config.n_neg);
            if window > ranked.len() - config.n_pos {
                return Err(Error::InsufficientTrainPairs {
                    needed: config.n_pos + window,
                    available: ranked.len(),
                });
            }
            let mut pool: Vec<&RankedPair> = ranked[ranked.len() - window..].iter().collect();
            pool.shuffle(&mut rng);
            pool.truncate(config.n_neg);
            pool
        }
    };
    for r in negatives {
        instances.push(TrainInstance {
            p1: r.p1,
            p2: r.p2,
            target: 0,
            mined_similarity: r.similarity,
        });
    }
    instances.shuffle(&mut rng);
    Ok(instances)
}

/// TSV: `p1 \t p2 \t t \t similarity`.
pub fn save_train_pairs(instances: &[TrainInstance], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for inst in instances {
        writeln!(
            buf,
            "{}\t{}\t{}\t{}",
            inst.p1, inst.p2, inst.target, inst.mined_similarity
        )
        .map_err(|e| Error::io(path, e))?;
    }
    crate::atomic_write(path, &buf)
}

pub fn load_train_pairs(path: &Path) -> Result<Vec<TrainInstance>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::format(
                path,
                format!("line {}: expected 4 tab-separated fields", lineno + 1),
            ));
        }
        let bad = |what: &str| Error::format(path, format!("line {}: bad {what}", lineno + 1));
        let target: u8 = fields[2].parse().map_err(|_| bad("target"))?;
        if target > 1 {
            return Err(bad("target (must be 0 or 1)"));
        }
        out.push(TrainInstance {
            p1: fields[0].parse().map_err(|_| bad("pattern id"))?,
            p2: fields[1].parse().map_err(|_| bad("pattern id"))?,
            target,
            mined_similarity: fields[3].parse().map_err(|_| bad("similarity"))?,
        });
    }
    Ok(out)
}
