//! Proportional-analogy evaluation: CosAdd, CosMult, and PairDiff.
//!
//! For a:b :: c:d the measures are
//!
//! * CosAdd  = cos(b - a + c, d)
//! * CosMult = cos(b,d) cos(c,d) / (cos(a,d) + epsilon), with every cosine
//!   mapped into [0, 1] by (x + 1) / 2 first
//! * PairDiff = cos(b - a, d - c)
//!
//! Open-vocabulary questions rank every word except {a, b, c}; choice
//! questions pick the best candidate pair. Questions are never skipped:
//! out-of-vocabulary stems count as wrong and are flagged in the report.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Default CosMult denominator offset.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Analogy scoring function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    CosAdd,
    CosMult,
    PairDiff,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::CosAdd => "cosadd",
            Measure::CosMult => "cosmult",
            Measure::PairDiff => "pairdiff",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosadd" => Ok(Measure::CosAdd),
            "cosmult" => Ok(Measure::CosMult),
            "pairdiff" => Ok(Measure::PairDiff),
            other => Err(Error::Usage(format!(
                "unknown measure {other:?} (expected cosadd, cosmult or pairdiff)"
            ))),
        }
    }
}

/// A measure value plus a degenerate-input flag (zero offset or composite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureScore {
    pub value: f64,
    pub degenerate: bool,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Cosine with the convention cos(x, 0) = 0.
fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot / (na * nb)
}

/// cos(b - a + c, d); score 0 with the flag set if either side is zero.
pub fn cos_add(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> MeasureScore {
    let composite: Vec<f64> = b
        .iter()
        .zip(a)
        .zip(c)
        .map(|((b, a), c)| b - a + c)
        .collect();
    if norm(&composite) == 0.0 || norm(d) == 0.0 {
        return MeasureScore {
            value: 0.0,
            degenerate: true,
        };
    }
    MeasureScore {
        value: cosine(&composite, d),
        degenerate: false,
    }
}

/// Transformed-cosine product ratio; finite and non-negative for all inputs.
pub fn cos_mult(a: &[f64], b: &[f64], c: &[f64], d: &[f64], epsilon: f64) -> MeasureScore {
    let shift = |x: f64| (x + 1.0) / 2.0;
    let value = shift(cosine(b, d)) * shift(cosine(c, d)) / (shift(cosine(a, d)) + epsilon);
    MeasureScore {
        value,
        degenerate: false,
    }
}

/// cos(b - a, d - c); score 0 with the flag set when an offset is zero.
pub fn pair_diff(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> MeasureScore {
    let stem: Vec<f64> = b.iter().zip(a).map(|(b, a)| b - a).collect();
    let cand: Vec<f64> = d.iter().zip(c).map(|(d, c)| d - c).collect();
    if norm(&stem) == 0.0 || norm(&cand) == 0.0 {
        return MeasureScore {
            value: 0.0,
            degenerate: true,
        };
    }
    MeasureScore {
        value: cosine(&stem, &cand),
        degenerate: false,
    }
}

/// Scores candidate pair (c, d) against stem (a, b) under one measure.
pub fn score(
    measure: Measure,
    epsilon: f64,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
) -> MeasureScore {
    match measure {
        Measure::CosAdd => cos_add(a, b, c, d),
        Measure::CosMult => cos_mult(a, b, c, d, epsilon),
        Measure::PairDiff => pair_diff(a, b, c, d),
    }
}

/// One benchmark question, open-vocabulary or multiple-choice.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogyQuestion {
    pub category: Option<String>,
    pub body: QuestionBody,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuestionBody {
    /// a : b :: c : ?, answered from the whole vocabulary.
    Open {
        a: String,
        b: String,
        c: String,
        gold: String,
    },
    /// Stem pair plus explicit candidate pairs, exactly one of them gold.
    Choice {
        a: String,
        b: String,
        candidates: Vec<(String, String)>,
        gold: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub questions: Vec<AnalogyQuestion>,
}

/// Parses the section-header text format: `: section-name` lines followed by
/// four words per line (a b c d). Words are lowercased to match the corpus
/// tokenizer. Sections named `gram...` count as syntactic, others semantic.
pub fn parse_google(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut questions = Vec::new();
    let mut section: Option<String> = None;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            section = Some(name.trim().to_string());
            continue;
        }
        let words: Vec<String> = line.split_whitespace().map(|w| w.to_lowercase()).collect();
        if words.len() != 4 {
            return Err(Error::format(
                path,
                format!("line {}: expected 4 words, found {}", lineno + 1, words.len()),
            ));
        }
        let mut it = words.into_iter();
        questions.push(AnalogyQuestion {
            category: section.clone(),
            body: QuestionBody::Open {
                a: it.next().unwrap(),
                b: it.next().unwrap(),
                c: it.next().unwrap(),
                gold: it.next().unwrap(),
            },
        });
    }
    if questions.is_empty() {
        return Err(Error::format(path, "no questions found"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    Ok(Dataset { name, questions })
}

/// Parses the normalized multiple-choice TSV:
/// `a \t b \t c1 \t d1 \t ... \t cn \t dn \t gold_index`.
pub fn parse_choice_tsv(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut questions = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |msg: &str| Error::format(path, format!("line {}: {msg}", lineno + 1));
        if fields.len() < 7 || fields.len().is_multiple_of(2) {
            return Err(bad("expected `a b c1 d1 ... cn dn gold` with at least 2 candidates"));
        }
        let gold: usize = fields[fields.len() - 1]
            .parse()
            .map_err(|_| bad("bad gold index"))?;
        let candidates: Vec<(String, String)> = fields[2..fields.len() - 1]
            .chunks(2)
            .map(|c| (c[0].to_lowercase(), c[1].to_lowercase()))
            .collect();
        if candidates.len() < 2 {
            return Err(bad("a choice question needs at least 2 candidates"));
        }
        if gold >= candidates.len() {
            return Err(bad("gold index out of range"));
        }
        questions.push(AnalogyQuestion {
            category: None,
            body: QuestionBody::Choice {
                a: fields[0].to_lowercase(),
                b: fields[1].to_lowercase(),
                candidates,
                gold,
            },
        });
    }
    if questions.is_empty() {
        return Err(Error::format(path, "no questions found"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    Ok(Dataset { name, questions })
}

/// Ranks every vocabulary word except {a, b, c} as the fourth word,
/// descending score, ties broken by word id.
pub fn solve_open_vocab(
    a: &str,
    b: &str,
    c: &str,
    embeddings: &EmbeddingMatrix,
    measure: Measure,
    epsilon: f64,
) -> Result<Vec<(u32, f64)>> {
    let vocab = embeddings.vocab();
    let ids: Vec<u32> = [a, b, c]
        .iter()
        .map(|w| {
            vocab
                .id(w)
                .ok_or_else(|| Error::Data(format!("stem word {w:?} not in vocabulary")))
        })
        .collect::<Result<_>>()?;
    let excluded: HashSet<u32> = ids.iter().copied().collect();
    let (va, vb, vc) = (
        embeddings.row(ids[0]),
        embeddings.row(ids[1]),
        embeddings.row(ids[2]),
    );
    let mut ranking: Vec<(u32, f64)> = (0..vocab.len() as u32)
        .filter(|id| !excluded.contains(id))
        .map(|id| {
            let s = score(measure, epsilon, va, vb, vc, embeddings.row(id));
            (id, s.value)
        })
        .collect();
    ranking.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .expect("scores are finite")
            .then_with(|| x.0.cmp(&y.0))
    });
    Ok(ranking)
}

/// Outcome of a multiple-choice question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChoiceOutcome {
    pub chosen: usize,
    /// Set when the stem or every candidate was out of vocabulary.
    pub flagged: bool,
}

/// Scores each candidate pair against the stem; candidates with missing
/// words score negative infinity but the question is still answered. Ties
/// resolve to the lower index.
pub fn solve_multiple_choice(
    a: &str,
    b: &str,
    candidates: &[(String, String)],
    embeddings: &EmbeddingMatrix,
    measure: Measure,
    epsilon: f64,
) -> ChoiceOutcome {
    let (Some(va), Some(vb)) = (embeddings.vector(a), embeddings.vector(b)) else {
        return ChoiceOutcome {
            chosen: 0,
            flagged: true,
        };
    };
    let mut best: Option<(usize, f64)> = None;
    let mut any_scored = false;
    for (i, (c, d)) in candidates.iter().enumerate() {
        let s = match (embeddings.vector(c), embeddings.vector(d)) {
            (Some(vc), Some(vd)) => {
                any_scored = true;
                score(measure, epsilon, va, vb, vc, vd).value
            }
            _ => f64::NEG_INFINITY,
        };
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    ChoiceOutcome {
        chosen: best.map(|(i, _)| i).unwrap_or(0),
        flagged: !any_scored,
    }
}

/// Aggregate evaluation results. Questions are never skipped, so
/// `answered == total`; flagged questions count as wrong.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EvaluationReport {
    pub dataset: String,
    pub measure: String,
    pub total: usize,
    pub answered: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Questions answered despite missing vocabulary, counted as wrong.
    pub flagged: usize,
    /// Per-section breakdown (name, total, correct) for sectioned datasets.
    pub categories: Vec<CategoryStats>,
    /// Semantic/syntactic rollup for section-header datasets.
    pub semantic: Option<CategoryStats>,
    pub syntactic: Option<CategoryStats>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CategoryStats {
    pub name: String,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
}

fn stats(name: &str, total: usize, correct: usize) -> CategoryStats {
    CategoryStats {
        name: name.to_string(),
        total,
        correct,
        accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
    }
}

/// Section names starting with `gram` are the syntactic portion.
pub fn is_syntactic_category(name: &str) -> bool {
    name.starts_with("gram")
}

/// Answers every question in the dataset and aggregates accuracies.
pub fn evaluate(
    dataset: &Dataset,
    embeddings: &EmbeddingMatrix,
    measure: Measure,
    epsilon: f64,
) -> EvaluationReport {
    let mut correct_total = 0usize;
    let mut flagged = 0usize;
    let mut per_category: Vec<(String, usize, usize)> = Vec::new();
    let mut categorized = false;

    for q in &dataset.questions {
        let is_correct = match &q.body {
            QuestionBody::Open { a, b, c, gold } => {
                match solve_open_vocab(a, b, c, embeddings, measure, epsilon) {
                    Ok(ranking) => ranking
                        .first()
                        .map(|&(id, _)| embeddings.vocab().word(id) == gold)
                        .unwrap_or(false),
                    Err(_) => {
                        flagged += 1;
                        false
                    }
                }
            }
            QuestionBody::Choice {
                a, b, candidates, gold,
            } => {
                let outcome = solve_multiple_choice(a, b, candidates, embeddings, measure, epsilon);
                if outcome.flagged {
                    flagged += 1;
                    false
                } else {
                    outcome.chosen == *gold
                }
            }
        };
        if is_correct {
            correct_total += 1;
        }
        if let Some(cat) = &q.category {
            categorized = true;
            match per_category.iter_mut().find(|(name, _, _)| name == cat) {
                Some((_, total, correct)) => {
                    *total += 1;
                    *correct += usize::from(is_correct);
                }
                None => per_category.push((cat.clone(), 1, usize::from(is_correct))),
            }
        }
    }

    let total = dataset.questions.len();
    let categories: Vec<CategoryStats> = per_category
        .iter()
        .map(|(name, total, correct)| stats(name, *total, *correct))
        .collect();
    let (semantic, syntactic) = if categorized {
        let roll = |syntactic: bool| {
            let (t, c) = per_category
                .iter()
                .filter(|(name, _, _)| is_syntactic_category(name) == syntactic)
                .fold((0, 0), |(t, c), (_, qt, qc)| (t + qt, c + qc));
            stats(if syntactic { "syntactic" } else { "semantic" }, t, c)
        };
        (Some(roll(false)), Some(roll(true)))
    } else {
        (None, None)
    };

    EvaluationReport {
        dataset: dataset.name.clone(),
        measure: measure.name().to_string(),
        total,
        answered: total,
        correct: correct_total,
        accuracy: if total == 0 {
            0.0
        } else {
            correct_total as f64 / total as f64
        },
        flagged,
        categories,
        semantic,
        syntactic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn emb(entries: &[(&str, &[f64])]) -> EmbeddingMatrix {
        let mut vocab = Vocabulary::new();
        for (w, _) in entries {
            vocab.intern(w);
        }
        let dim = entries[0].1.len();
        let mut m = EmbeddingMatrix::init_random(vocab, dim, 0).unwrap();
        for (i, (_, row)) in entries.iter().enumerate() {
            m.row_mut(i as u32).copy_from_slice(row);
        }
        m
    }

    #[test]
    fn cos_add_exact_and_orthogonal() {
        let (a, b, c) = ([1.0, 0.0], [2.0, 0.0], [0.0, 1.0]);
        let exact = [1.0, 1.0]; // b - a + c
        assert!((cos_add(&a, &b, &c, &exact).value - 1.0).abs() < 1e-12);
        let orth = [1.0, -1.0];
        assert!(cos_add(&a, &b, &c, &orth).value.abs() < 1e-12);
    }

    #[test]
    fn cos_add_degenerate_composite() {
        // b - a + c = 0.
        let s = cos_add(&[1.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert_eq!(s.value, 0.0);
        assert!(s.degenerate);
    }

    #[test]
    fn cos_mult_hand_value() {
        // d = b = c, a orthogonal to d: (1 * 1) / (0.5 + eps).
        let d = [0.0, 2.0];
        let a = [3.0, 0.0];
        let s = cos_mult(&a, &d, &d, &d, 1e-5);
        assert!((s.value - 1.0 / (0.5 + 1e-5)).abs() < 1e-9);
        assert!((s.value - 1.99996).abs() < 1e-4);
    }

    #[test]
    fn cos_mult_zero_numerator_and_bounded_denominator() {
        // cos(b, d) = -1 -> transformed 0 -> score 0.
        let s = cos_mult(&[0.0, 1.0], &[-1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], 1e-5);
        assert_eq!(s.value, 0.0);
        // Never infinite even when cos(a, d) = -1.
        let s = cos_mult(&[-1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], 1e-5);
        assert!(s.value.is_finite() && s.value >= 0.0);
    }

    #[test]
    fn pair_diff_basics() {
        let (a, b) = ([0.0, 0.0], [1.0, 2.0]);
        let (c, d) = ([5.0, 5.0], [6.0, 7.0]);
        assert!((pair_diff(&a, &b, &c, &d).value - 1.0).abs() < 1e-12);
        // Symmetric in the two pairs.
        assert_eq!(
            pair_diff(&a, &b, &c, &d).value,
            pair_diff(&c, &d, &a, &b).value
        );
        // Zero offset is degenerate.
        let s = pair_diff(&a, &a, &c, &d);
        assert!(s.degenerate && s.value == 0.0);
    }

    #[test]
    fn pair_diff_translation_invariance() {
        let (a, b, c, d) = ([0.1, 0.4], [1.3, -0.2], [2.0, 0.7], [2.9, 0.9]);
        let w = [17.0, -4.0];
        let t = |x: &[f64]| [x[0] + w[0], x[1] + w[1]];
        let base = pair_diff(&a, &b, &c, &d).value;
        let moved = pair_diff(&t(&a), &t(&b), &t(&c), &t(&d)).value;
        assert!((base - moved).abs() < 1e-12);
    }

    fn planted() -> EmbeddingMatrix {
        // queen = king - man + woman exactly.
        emb(&[
            ("man", &[1.0, 0.0, 0.2]),
            ("woman", &[1.0, 1.0, 0.2]),
            ("king", &[3.0, 0.0, 0.9]),
            ("queen", &[3.0, 1.0, 0.9]),
            ("apple", &[-2.0, 0.5, -0.7]),
            ("stone", &[0.4, -1.9, 2.0]),
        ])
    }

    #[test]
    fn open_vocab_finds_planted_offset() {
        let m = planted();
        let ranking = solve_open_vocab("man", "woman", "king", &m, Measure::CosAdd, 1e-5).unwrap();
        assert_eq!(m.vocab().word(ranking[0].0), "queen");
        // Candidate set excludes the three stem words.
        assert_eq!(ranking.len(), m.word_count() - 3);
    }

    #[test]
    fn open_vocab_rejects_oov_stem() {
        let m = planted();
        assert!(solve_open_vocab("man", "woman", "emperor", &m, Measure::CosAdd, 1e-5).is_err());
    }

    #[test]
    fn choice_picks_matching_offset_and_breaks_ties_low() {
        let m = planted();
        let candidates = vec![
            ("king".to_string(), "queen".to_string()),
            ("king".to_string(), "apple".to_string()),
        ];
        let out =
            solve_multiple_choice("man", "woman", &candidates, &m, Measure::PairDiff, 1e-5);
        assert_eq!(out.chosen, 0);
        assert!(!out.flagged);

        let twins = vec![
            ("king".to_string(), "queen".to_string()),
            ("king".to_string(), "queen".to_string()),
        ];
        let out = solve_multiple_choice("man", "woman", &twins, &m, Measure::PairDiff, 1e-5);
        assert_eq!(out.chosen, 0);
    }

    #[test]
    fn choice_handles_oov_candidates() {
        let m = planted();
        let candidates = vec![
            ("king".to_string(), "ghost".to_string()),
            ("king".to_string(), "queen".to_string()),
        ];
        let out =
            solve_multiple_choice("man", "woman", &candidates, &m, Measure::PairDiff, 1e-5);
        assert_eq!(out.chosen, 1);
        assert!(!out.flagged);

        let all_oov = vec![
            ("ghost".to_string(), "wraith".to_string()),
            ("spook".to_string(), "shade".to_string()),
        ];
        let out = solve_multiple_choice("man", "woman", &all_oov, &m, Measure::PairDiff, 1e-5);
        assert_eq!(out.chosen, 0);
        assert!(out.flagged);
    }

    #[test]
    fn google_parser_sections_and_rollup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("questions.txt");
        std::fs::write(
            &path,
            ": capital-common-countries\nAthens Greece Oslo Norway\nOslo Norway Athens Greece\n\
             : gram1-adjective-to-adverb\nquick quickly slow slowly\n",
        )
        .unwrap();
        let ds = parse_google(&path).unwrap();
        assert_eq!(ds.questions.len(), 3);
        assert_eq!(
            ds.questions[0].category.as_deref(),
            Some("capital-common-countries")
        );
        match &ds.questions[0].body {
            QuestionBody::Open { a, gold, .. } => {
                assert_eq!(a, "athens");
                assert_eq!(gold, "norway");
            }
            _ => panic!("expected open question"),
        }
        assert!(is_syntactic_category("gram1-adjective-to-adverb"));
        assert!(!is_syntactic_category("capital-common-countries"));
    }

    #[test]
    fn google_parser_rejects_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("questions.txt");
        std::fs::write(&path, ": s\none two three\n").unwrap();
        assert!(parse_google(&path).is_err());
    }

    #[test]
    fn choice_tsv_parser() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("choice.tsv");
        std::fs::write(
            &path,
            "man\twoman\tking\tqueen\tking\tapple\t0\nup\tdown\tleft\tright\thot\tcold\t0\n",
        )
        .unwrap();
        let ds = parse_choice_tsv(&path).unwrap();
        assert_eq!(ds.questions.len(), 2);
        match &ds.questions[0].body {
            QuestionBody::Choice {
                candidates, gold, ..
            } => {
                assert_eq!(candidates.len(), 2);
                assert_eq!(*gold, 0);
            }
            _ => panic!("expected choice question"),
        }
        // Gold index out of range.
        std::fs::write(&path, "a\tb\tc\td\te\tf\t9\n").unwrap();
        assert!(parse_choice_tsv(&path).is_err());
    }

    #[test]
    fn evaluate_counts_and_flags() {
        let m = planted();
        let ds = Dataset {
            name: "mini".into(),
            questions: vec![
                AnalogyQuestion {
                    category: Some("sem".into()),
                    body: QuestionBody::Open {
                        a: "man".into(),
                        b: "woman".into(),
                        c: "king".into(),
                        gold: "queen".into(),
                    },
                },
                AnalogyQuestion {
                    category: Some("sem".into()),
                    body: QuestionBody::Open {
                        a: "man".into(),
                        b: "woman".into(),
                        c: "missing".into(),
                        gold: "queen".into(),
                    },
                },
            ],
        };
        let report = evaluate(&ds, &m, Measure::CosAdd, 1e-5);
        assert_eq!(report.total, 2);
        assert_eq!(report.answered, 2);
        assert_eq!(report.correct, 1);
        assert_eq!(report.flagged, 1);
        assert!((report.accuracy - 0.5).abs() < 1e-12);
        assert_eq!(report.categories.len(), 1);
    }

    #[test]
    fn evaluate_empty_vocabulary_intersection() {
        let m = emb(&[("x", &[1.0, 0.0]), ("y", &[0.0, 1.0])]);
        let ds = Dataset {
            name: "mini".into(),
            questions: vec![AnalogyQuestion {
                category: None,
                body: QuestionBody::Open {
                    a: "aa".into(),
                    b: "bb".into(),
                    c: "cc".into(),
                    gold: "dd".into(),
                },
            }],
        };
        let report = evaluate(&ds, &m, Measure::CosAdd, 1e-5);
        assert_eq!(report.accuracy, 0.0);
        assert_eq!(report.flagged, 1);
        assert_eq!(report.answered, report.total);
    }

    #[test]
    fn argmax_is_scale_invariant() {
        let m = planted();
        let mut scaled = m.clone();
        for id in 0..scaled.word_count() as u32 {
            for x in scaled.row_mut(id) {
                *x *= 4.0;
            }
        }
        for measure in [Measure::CosAdd, Measure::CosMult, Measure::PairDiff] {
            let base = solve_open_vocab("man", "woman", "king", &m, measure, 1e-5).unwrap();
            let big = solve_open_vocab("man", "woman", "king", &scaled, measure, 1e-5).unwrap();
            assert_eq!(base[0].0, big[0].0, "measure {measure:?}");
        }
    }
}
