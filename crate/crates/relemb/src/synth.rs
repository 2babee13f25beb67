//! Synthetic corpora with planted relational regularities.
//!
//! The generator defines a handful of relations, each holding word pairs
//! (src, dst) that consistently co-occur with the relation's own midfix
//! phrases ("srcRxI relRm0 dstRxI."). Word pairs of the same relation
//! therefore share lexical patterns, which is exactly the structure the
//! miner and trainer are built to pick up. A few generic "glue" midfixes are
//! shared across relations so that cross-relation pattern pairs keep small
//! non-zero similarities, and filler sentences add vocabulary noise.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shape of a generated corpus.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub relations: usize,
    pub pairs_per_relation: usize,
    /// Sentences per (pair, phrase) combination.
    pub reps_per_phrase: usize,
    /// Generic-midfix sentences per pair.
    pub glue_per_pair: usize,
    pub filler_sentences: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            relations: 6,
            pairs_per_relation: 10,
            reps_per_phrase: 75,
            glue_per_pair: 10,
            filler_sentences: 2500,
            seed: 1,
        }
    }
}

impl SynthSpec {
    /// A small configuration for fast in-test pipelines.
    pub fn mini(seed: u64) -> Self {
        SynthSpec {
            relations: 4,
            pairs_per_relation: 6,
            reps_per_phrase: 10,
            glue_per_pair: 3,
            filler_sentences: 150,
            seed,
        }
    }

    pub fn src_word(&self, relation: usize, pair: usize) -> String {
        format!("src{relation}x{pair}")
    }

    pub fn dst_word(&self, relation: usize, pair: usize) -> String {
        format!("dst{relation}x{pair}")
    }

    /// The relation's midfix phrases over its six signature words: five
    /// templates mixing unigram and bigram midfixes.
    fn phrases(&self, relation: usize) -> Vec<Vec<String>> {
        let m = |k: usize| format!("rel{relation}m{k}");
        vec![
            vec![m(0)],
            vec![m(1), m(2)],
            vec![m(3)],
            vec![m(4), m(5)],
            vec![m(0), m(3)],
        ]
    }
}

const GLUE: [&str; 3] = ["glue0", "glue1", "glue2"];

/// Generates the corpus text, one sentence per line.
pub fn generate_corpus(spec: &SynthSpec) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut sentences: Vec<String> = Vec::new();
    for r in 0..spec.relations {
        let phrases = spec.phrases(r);
        for i in 0..spec.pairs_per_relation {
            let src = spec.src_word(r, i);
            let dst = spec.dst_word(r, i);
            for phrase in &phrases {
                for _ in 0..spec.reps_per_phrase {
                    sentences.push(format!("{src} {} {dst}.", phrase.join(" ")));
                }
            }
            for _ in 0..spec.glue_per_pair {
                let glue = GLUE[rng.random_range(0..GLUE.len())];
                sentences.push(format!("{src} {glue} {dst}."));
            }
        }
    }
    // Filler vocabulary is wide enough that no pad pair ever reaches the
    // sentence-count threshold, so filler adds words but no retained pairs.
    for _ in 0..spec.filler_sentences {
        let len = rng.random_range(4..9);
        let words: Vec<String> = (0..len)
            .map(|_| format!("pad{}", rng.random_range(0..200)))
            .collect();
        sentences.push(format!("{}.", words.join(" ")));
    }
    sentences.shuffle(&mut rng);
    let mut text = sentences.join("\n");
    text.push('\n');
    text
}

/// Multiple-choice questions over the planted pairs, in the normalized TSV
/// format. For a question src(r,i):dst(r,i) :: src(r,j):? the gold candidate
/// is dst(r,j) and the distractors are dst words of other relations.
pub fn generate_choice_questions(spec: &SynthSpec, max_questions: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<(usize, usize, usize)> = Vec::new();
    for r in 0..spec.relations {
        for i in 0..spec.pairs_per_relation {
            for j in 0..spec.pairs_per_relation {
                if i != j {
                    all.push((r, i, j));
                }
            }
        }
    }
    all.shuffle(&mut rng);
    all.truncate(max_questions);

    let n_candidates = 4.min(spec.relations);
    let mut lines = Vec::with_capacity(all.len());
    for (r, i, j) in all {
        let mut others: Vec<usize> = (0..spec.relations).filter(|&s| s != r).collect();
        others.shuffle(&mut rng);
        let mut candidates: Vec<(String, String)> = others[..n_candidates - 1]
            .iter()
            .map(|&s| (spec.src_word(r, j), spec.dst_word(s, j)))
            .collect();
        let gold = rng.random_range(0..=candidates.len());
        candidates.insert(gold, (spec.src_word(r, j), spec.dst_word(r, j)));
        let mut fields = vec![spec.src_word(r, i), spec.dst_word(r, i)];
        for (c, d) in candidates {
            fields.push(c);
            fields.push(d);
        }
        fields.push(gold.to_string());
        lines.push(fields.join("\t"));
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}
