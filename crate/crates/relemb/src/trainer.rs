//! Learning word representations from pattern-pair instances.
//!
//! A pattern is embedded as the weighted mean of word-vector differences over
//! its support, p = (1/|R(p)|) * sum f(p,u,v) (u - v). For an instance
//! (p1, p2, t) the prediction is sigma(p1.p2) with sigma = tanh and the loss
//! is 0.5 (t - sigma)^2. The gradient w.r.t. a word x is
//!
//!   dL/dx = sigma'(theta) (sigma(theta) - t)
//!           * [ H(p1,x)/|R(p1)| * p2 + H(p2,x)/|R(p2)| * p1 ],
//!
//! where H(p,x) sums the support scores of pairs with u = x minus those with
//! v = x. Updates use per-dimension AdaGrad. Two schedules are provided:
//!
//! * `Naive` recomputes every pattern vector at the start of each epoch and
//!   derives H values from the store per instance.
//! * `Optimized` snapshots the word matrix at the epoch boundary, refreshes a
//!   pattern vector lazily from that snapshot the first time the pattern
//!   appears in the epoch, and reads H values from a precompiled
//!   pattern/word index. Both schedules perform identical arithmetic in the
//!   same order, so their results coincide bit for bit.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::association::AssociationStore;
use crate::corpus::{PatternId, WordId};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::trainset::TrainInstance;

/// AdaGrad denominator offset.
pub const ADAGRAD_EPSILON: f64 = 1e-8;

/// Default base learning rate.
pub const DEFAULT_LEARNING_RATE: f64 = 0.01;

/// Pattern vector p = (1/|R(p)|) sum f (u - v), summed in pair-id order.
pub fn pattern_embedding(
    p: PatternId,
    embeddings: &EmbeddingMatrix,
    store: &AssociationStore,
) -> Result<Vec<f64>> {
    pattern_embedding_from_rows(p, embeddings.as_slice(), embeddings.dim(), store)
}

/// Same computation against a flat row-major word matrix; the optimized
/// schedule uses this to read the epoch-start snapshot.
fn pattern_embedding_from_rows(
    p: PatternId,
    rows: &[f64],
    dim: usize,
    store: &AssociationStore,
) -> Result<Vec<f64>> {
    let support = store.pattern_support(p)?;
    if support.is_empty() {
        return Err(Error::EmptySupport { id: p });
    }
    let norm = store.pattern_norm(p)?;
    let mut vec = vec![0.0; dim];
    for &(pair, f) in support {
        let (u, v) = store.pair_words(pair);
        let u_row = &rows[u as usize * dim..(u as usize + 1) * dim];
        let v_row = &rows[v as usize * dim..(v as usize + 1) * dim];
        for k in 0..dim {
            vec[k] += f * (u_row[k] - v_row[k]);
        }
    }
    for x in &mut vec {
        *x /= norm;
    }
    Ok(vec)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Predicted relational similarity: tanh of the inner product.
pub fn predict(p1_vec: &[f64], p2_vec: &[f64]) -> f64 {
    dot(p1_vec, p2_vec).tanh()
}

/// Squared loss 0.5 (t - sigma(p1.p2))^2.
pub fn loss(target: u8, p1_vec: &[f64], p2_vec: &[f64]) -> f64 {
    let diff = target as f64 - predict(p1_vec, p2_vec);
    0.5 * diff * diff
}

/// Precompiled index mapping words to the patterns they support and back,
/// carrying H(p,x) = h(p,u=x,v) - h(p,u,v=x).
#[derive(Debug, Clone)]
pub struct PatternWordIndex {
    /// word id -> [(pattern id, H)] sorted by pattern id.
    by_word: Vec<Vec<(PatternId, f64)>>,
    /// pattern id -> [(word id, H)] sorted by word id.
    by_pattern: Vec<Vec<(WordId, f64)>>,
}

/// H values per pattern, computed by one pass over each support list in
/// storage (pair id) order.
pub fn build_pattern_word_index(store: &AssociationStore) -> PatternWordIndex {
    let mut by_pattern = Vec::with_capacity(store.pattern_count());
    let mut max_word = 0u32;
    for p in 0..store.pattern_count() as PatternId {
        let mut h: BTreeMap<WordId, f64> = BTreeMap::new();
        for &(pair, f) in store.pattern_support(p).expect("id in range") {
            let (u, v) = store.pair_words(pair);
            *h.entry(u).or_insert(0.0) += f;
            *h.entry(v).or_insert(0.0) -= f;
            max_word = max_word.max(u).max(v);
        }
        by_pattern.push(h.into_iter().collect::<Vec<_>>());
    }
    let words = if store.pattern_count() == 0 {
        0
    } else {
        max_word as usize + 1
    };
    let mut by_word: Vec<Vec<(PatternId, f64)>> = vec![Vec::new(); words];
    for (p, entries) in by_pattern.iter().enumerate() {
        for &(word, h) in entries {
            by_word[word as usize].push((p as PatternId, h));
        }
    }
    PatternWordIndex {
        by_word,
        by_pattern,
    }
}

impl PatternWordIndex {
    pub fn patterns_of_word(&self, word: WordId) -> &[(PatternId, f64)] {
        self.by_word
            .get(word as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn words_of_pattern(&self, p: PatternId) -> &[(WordId, f64)] {
        &self.by_pattern[p as usize]
    }

    /// H(p, x); zero when the word does not appear in the support.
    pub fn h(&self, p: PatternId, word: WordId) -> f64 {
        self.by_pattern[p as usize]
            .binary_search_by_key(&word, |&(w, _)| w)
            .map(|i| self.by_pattern[p as usize][i].1)
            .unwrap_or(0.0)
    }
}

/// The shared per-word gradient expression; both schedules and the public
/// `gradient_word` go through here so that their arithmetic is identical.
fn word_gradient(
    scale: f64,
    h1: f64,
    norm1: f64,
    p2_vec: &[f64],
    h2: f64,
    norm2: f64,
    p1_vec: &[f64],
) -> Vec<f64> {
    let c1 = h1 / norm1;
    let c2 = h2 / norm2;
    p2_vec
        .iter()
        .zip(p1_vec)
        .map(|(x2, x1)| scale * (c1 * x2 + c2 * x1))
        .collect()
}

/// dL/dx for one word of one instance, with pattern vectors computed fresh
/// from the given embeddings. Words outside both supports get a zero vector.
pub fn gradient_word(
    word: WordId,
    instance: &TrainInstance,
    embeddings: &EmbeddingMatrix,
    store: &AssociationStore,
    index: &PatternWordIndex,
) -> Result<Vec<f64>> {
    let p1_vec = pattern_embedding(instance.p1, embeddings, store)?;
    let p2_vec = pattern_embedding(instance.p2, embeddings, store)?;
    let sigma = predict(&p1_vec, &p2_vec);
    let scale = (1.0 - sigma * sigma) * (sigma - instance.target as f64);
    let h1 = index.h(instance.p1, word);
    let h2 = index.h(instance.p2, word);
    if h1 == 0.0 && h2 == 0.0 {
        return Ok(vec![0.0; embeddings.dim()]);
    }
    Ok(word_gradient(
        scale,
        h1,
        store.pattern_norm(instance.p1)?,
        &p2_vec,
        h2,
        store.pattern_norm(instance.p2)?,
        &p1_vec,
    ))
}

/// Mutable training state: the matrix being learnt plus AdaGrad accumulators.
#[derive(Debug, Clone)]
pub struct TrainerState {
    pub embeddings: EmbeddingMatrix,
    /// Per-word per-dimension sums of squared gradients.
    accumulators: Vec<f64>,
    pub base_learning_rate: f64,
    pub epoch: usize,
}

impl TrainerState {
    pub fn new(embeddings: EmbeddingMatrix, base_learning_rate: f64) -> Self {
        let accumulators = vec![0.0; embeddings.word_count() * embeddings.dim()];
        TrainerState {
            embeddings,
            accumulators,
            base_learning_rate,
            epoch: 0,
        }
    }

    pub fn accumulator(&self, word: WordId) -> &[f64] {
        let d = self.embeddings.dim();
        &self.accumulators[word as usize * d..(word as usize + 1) * d]
    }
}

/// One AdaGrad update: accumulate the squared gradient, then step the word
/// vector by -alpha0 * g / sqrt(acc + eps) per dimension.
pub fn adagrad_step(state: &mut TrainerState, word: WordId, grad: &[f64]) -> Result<()> {
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite(format!(
            "gradient for word id {word} at epoch {}",
            state.epoch
        )));
    }
    let d = state.embeddings.dim();
    let alpha = state.base_learning_rate;
    let acc = &mut state.accumulators[word as usize * d..(word as usize + 1) * d];
    let row = state.embeddings.row_mut(word);
    for k in 0..d {
        acc[k] += grad[k] * grad[k];
        row[k] -= alpha / (acc[k] + ADAGRAD_EPSILON).sqrt() * grad[k];
    }
    Ok(())
}

/// Which pattern-refresh schedule the trainer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    /// Recompute all pattern vectors eagerly at each epoch start.
    Naive,
    /// Lazy refresh against the epoch-start snapshot plus the word index.
    Optimized,
}

impl std::str::FromStr for TrainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(TrainMode::Naive),
            "optimized" => Ok(TrainMode::Optimized),
            other => Err(Error::Usage(format!(
                "unknown training mode {other:?} (expected naive or optimized)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub mode: TrainMode,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: DEFAULT_LEARNING_RATE,
            mode: TrainMode::Optimized,
            seed: 7,
        }
    }
}

/// Per-epoch metrics, emitted as line-delimited records by the CLI.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_accuracy: f64,
    pub wall_ms: u64,
}

pub struct TrainOutcome {
    pub embeddings: EmbeddingMatrix,
    pub metrics: Vec<EpochMetrics>,
}

/// Runs the alternating pattern/word optimization for `epochs` epochs.
///
/// Instances are visited in a per-epoch seeded shuffle. Within an epoch the
/// pattern vectors stay fixed at their epoch-start values; each instance
/// updates exactly the words with a non-zero H in either pattern, all
/// gradients taken before any of the instance's updates are applied.
pub fn train(
    instances: &[TrainInstance],
    store: &AssociationStore,
    embeddings: EmbeddingMatrix,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if config.epochs == 0 {
        return Err(Error::Usage("epoch count must be at least 1".into()));
    }
    if instances.is_empty() {
        return Err(Error::Data("no training instances".into()));
    }
    for inst in instances {
        for p in [inst.p1, inst.p2] {
            if store.pattern_support(p)?.is_empty() {
                return Err(Error::EmptySupport { id: p });
            }
        }
    }

    let dim = embeddings.dim();
    let index = match config.mode {
        TrainMode::Optimized => Some(build_pattern_word_index(store)),
        TrainMode::Naive => None,
    };
    let mut state = TrainerState::new(embeddings, config.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut metrics = Vec::with_capacity(config.epochs);

    let n_patterns = store.pattern_count();
    let mut pattern_vecs: Vec<Vec<f64>> = vec![Vec::new(); n_patterns];
    // Epoch in which each pattern vector was last refreshed (optimized mode).
    let mut refreshed_at: Vec<usize> = vec![0; n_patterns];
    let mut snapshot: Vec<f64> = Vec::new();

    let mut order: Vec<usize> = (0..instances.len()).collect();
    // Scratch for the naive per-instance H accumulation.
    let mut h_scratch: BTreeMap<WordId, (f64, f64)> = BTreeMap::new();

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        state.epoch = epoch;
        order.shuffle(&mut rng);

        match config.mode {
            TrainMode::Naive => {
                for p in store.patterns_with_support() {
                    pattern_vecs[p as usize] =
                        pattern_embedding_from_rows(p, state.embeddings.as_slice(), dim, store)?;
                }
            }
            TrainMode::Optimized => {
                snapshot.clear();
                snapshot.extend_from_slice(state.embeddings.as_slice());
            }
        }

        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for &i in &order {
            let inst = &instances[i];
            if config.mode == TrainMode::Optimized {
                for p in [inst.p1, inst.p2] {
                    if refreshed_at[p as usize] < epoch {
                        pattern_vecs[p as usize] =
                            pattern_embedding_from_rows(p, &snapshot, dim, store)?;
                        refreshed_at[p as usize] = epoch;
                    }
                }
            }
            let p1_vec = &pattern_vecs[inst.p1 as usize];
            let p2_vec = &pattern_vecs[inst.p2 as usize];
            let sigma = predict(p1_vec, p2_vec);
            if !sigma.is_finite() {
                return Err(Error::NonFinite(format!(
                    "prediction for instance ({}, {}) at epoch {epoch}",
                    inst.p1, inst.p2
                )));
            }
            let target = inst.target as f64;
            loss_sum += 0.5 * (target - sigma) * (target - sigma);
            if (sigma >= 0.5) == (inst.target == 1) {
                correct += 1;
            }
            let scale = (1.0 - sigma * sigma) * (sigma - target);
            let norm1 = store.pattern_norm(inst.p1)?;
            let norm2 = store.pattern_norm(inst.p2)?;

            match (config.mode, &index) {
                (TrainMode::Optimized, Some(index)) => {
                    // Merge the two sorted (word, H) lists.
                    let a = index.words_of_pattern(inst.p1);
                    let b = index.words_of_pattern(inst.p2);
                    let (mut i, mut j) = (0, 0);
                    while i < a.len() || j < b.len() {
                        let (word, h1, h2) = match (a.get(i), b.get(j)) {
                            (Some(&(wa, ha)), Some(&(wb, hb))) => match wa.cmp(&wb) {
                                std::cmp::Ordering::Less => {
                                    i += 1;
                                    (wa, ha, 0.0)
                                }
                                std::cmp::Ordering::Greater => {
                                    j += 1;
                                    (wb, 0.0, hb)
                                }
                                std::cmp::Ordering::Equal => {
                                    i += 1;
                                    j += 1;
                                    (wa, ha, hb)
                                }
                            },
                            (Some(&(wa, ha)), None) => {
                                i += 1;
                                (wa, ha, 0.0)
                            }
                            (None, Some(&(wb, hb))) => {
                                j += 1;
                                (wb, 0.0, hb)
                            }
                            (None, None) => unreachable!(),
                        };
                        let grad = word_gradient(scale, h1, norm1, p2_vec, h2, norm2, p1_vec);
                        adagrad_step(&mut state, word, &grad)?;
                    }
                }
                (TrainMode::Naive, _) => {
                    // Derive H per instance straight from the store.
                    h_scratch.clear();
                    for &(pair, f) in store.pattern_support(inst.p1)? {
                        let (u, v) = store.pair_words(pair);
                        h_scratch.entry(u).or_insert((0.0, 0.0)).0 += f;
                        h_scratch.entry(v).or_insert((0.0, 0.0)).0 -= f;
                    }
                    for &(pair, f) in store.pattern_support(inst.p2)? {
                        let (u, v) = store.pair_words(pair);
                        h_scratch.entry(u).or_insert((0.0, 0.0)).1 += f;
                        h_scratch.entry(v).or_insert((0.0, 0.0)).1 -= f;
                    }
                    for (&word, &(h1, h2)) in h_scratch.iter() {
                        let grad = word_gradient(scale, h1, norm1, p2_vec, h2, norm2, p1_vec);
                        adagrad_step(&mut state, word, &grad)?;
                    }
                }
                (TrainMode::Optimized, None) => unreachable!(),
            }
        }

        state
            .embeddings
            .validate_finite()
            .map_err(|_| Error::NonFinite(format!("embedding matrix after epoch {epoch}")))?;
        metrics.push(EpochMetrics {
            epoch,
            mean_loss: loss_sum / instances.len() as f64,
            train_accuracy: correct as f64 / instances.len() as f64,
            wall_ms: started.elapsed().as_millis() as u64,
        });
    }

    Ok(TrainOutcome {
        embeddings: state.embeddings,
        metrics,
    })
}
