//! Corpus scanning: tokenization, word-pair co-occurrence counting, and
//! lexical pattern extraction.
//!
//! A lexical pattern is the midfix between two co-occurring words with the
//! words replaced by the slot variables `X` and `Y`, e.g. `X is_a Y`. Patterns
//! are emitted for every midfix unigram and contiguous midfix bigram.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::binio::{self, BinReader};
use crate::error::{Error, Result};

/// Dense word identifier, assigned in first-occurrence order.
pub type WordId = u32;
/// Index into the retained word-pair table.
pub type PairId = u32;
/// Index into the retained pattern table.
pub type PatternId = u32;

const EXTRACT_MAGIC: &[u8; 8] = b"RELEXTR1";

/// Default stop-word list; callers may substitute their own file.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Bidirectional word <-> id map with ids dense in `[0, len)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, WordId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Existing id for `word`, or a freshly assigned one.
    pub fn intern(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (id, word) in self.words.iter().enumerate() {
            writeln!(w, "{id}\t{word}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads either `id \t word` lines or a bare word-per-line list.
    pub fn load_tsv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut vocab = Vocabulary::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let word = match line.split_once('\t') {
                Some((id, word)) => {
                    let id: usize = id.parse().map_err(|_| {
                        Error::format(path, format!("line {}: bad id field", lineno + 1))
                    })?;
                    if id != vocab.len() {
                        return Err(Error::format(
                            path,
                            format!("line {}: ids must be dense and in order", lineno + 1),
                        ));
                    }
                    word
                }
                None => line.as_str(),
            };
            if vocab.index.contains_key(word) {
                return Err(Error::format(
                    path,
                    format!("line {}: duplicate word {word:?}", lineno + 1),
                ));
            }
            vocab.intern(word);
        }
        Ok(vocab)
    }
}

/// Token stream event: a lowercase word or a sentence boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenEvent {
    Word(String),
    SentenceBreak,
}

/// Tokenizes one line of text. Words are maximal alphanumeric runs,
/// lowercased; `.`, `!` and `?` mark sentence boundaries; all other
/// punctuation only separates words.
fn tokenize_line(line: &str, out: &mut Vec<TokenEvent>) {
    let mut word = String::new();
    let mut emitted_word = false;
    for ch in line.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                word.push(lc);
            }
        } else {
            if !word.is_empty() {
                out.push(TokenEvent::Word(std::mem::take(&mut word)));
                emitted_word = true;
            }
            if matches!(ch, '.' | '!' | '?') && emitted_word {
                out.push(TokenEvent::SentenceBreak);
                emitted_word = false;
            }
        }
    }
    if !word.is_empty() {
        out.push(TokenEvent::Word(word));
        emitted_word = true;
    }
    // A line break also closes the sentence.
    if emitted_word {
        out.push(TokenEvent::SentenceBreak);
    }
}

/// Tokenizes an in-memory string. Returns the token/boundary events.
pub fn tokenize(text: &str) -> Vec<TokenEvent> {
    let mut out = Vec::new();
    for line in text.lines() {
        tokenize_line(line, &mut out);
    }
    out
}

/// A tokenized corpus with interned word ids, one `Vec<WordId>` per sentence.
#[derive(Debug, Clone)]
pub struct CorpusScan {
    pub vocab: Vocabulary,
    pub sentences: Vec<Vec<WordId>>,
    /// Lines skipped because they were not valid UTF-8.
    pub malformed_lines: u64,
}

impl CorpusScan {
    /// Scans a byte stream line by line. Lines that are not valid UTF-8 are
    /// skipped and counted rather than aborting the scan.
    pub fn read<R: BufRead>(mut reader: R, path: &Path) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        let mut sentences = Vec::new();
        let mut malformed = 0u64;
        let mut raw = Vec::new();
        let mut events = Vec::new();
        let mut current: Vec<WordId> = Vec::new();
        loop {
            raw.clear();
            let n = reader
                .read_until(b'\n', &mut raw)
                .map_err(|e| Error::io(path, e))?;
            if n == 0 {
                break;
            }
            let line = match std::str::from_utf8(&raw) {
                Ok(s) => s,
                Err(_) => {
                    malformed += 1;
                    continue;
                }
            };
            events.clear();
            tokenize_line(line.trim_end_matches(['\n', '\r']), &mut events);
            for ev in &events {
                match ev {
                    TokenEvent::Word(w) => current.push(vocab.intern(w)),
                    TokenEvent::SentenceBreak => {
                        if !current.is_empty() {
                            sentences.push(std::mem::take(&mut current));
                        }
                    }
                }
            }
        }
        if !current.is_empty() {
            sentences.push(current);
        }
        Ok(CorpusScan {
            vocab,
            sentences,
            malformed_lines: malformed,
        })
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), path)
    }

    pub fn from_text(text: &str) -> Self {
        Self::read(text.as_bytes(), Path::new("<memory>")).expect("in-memory scan cannot fail")
    }
}

/// An ordered word pair retained by the sentence-count threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordPairStats {
    pub u: WordId,
    pub v: WordId,
    /// Number of distinct sentences where (u, v) co-occur in window order.
    pub sentence_count: u32,
}

/// Counts ordered in-window co-occurrences per sentence and keeps pairs seen
/// in at least `min_sentence_count` sentences. Pairs made purely of stop
/// words are ignored. `(u, v)` is ordered by textual occurrence; the reversed
/// pair is counted separately.
pub fn extract_word_pairs(
    scan: &CorpusScan,
    window: usize,
    min_sentence_count: u32,
    stopwords: &HashSet<String>,
) -> Result<Vec<WordPairStats>> {
    if window < 2 {
        return Err(Error::Usage(format!(
            "co-occurrence window must be at least 2, got {window}"
        )));
    }
    let stop_ids: HashSet<WordId> = stopwords
        .iter()
        .filter_map(|w| scan.vocab.id(w))
        .collect();
    let mut counts: BTreeMap<(WordId, WordId), u32> = BTreeMap::new();
    let mut seen: HashSet<(WordId, WordId)> = HashSet::new();
    for sentence in &scan.sentences {
        seen.clear();
        for i in 0..sentence.len() {
            let limit = (i + window).min(sentence.len() - 1);
            for j in (i + 1)..=limit {
                let (u, v) = (sentence[i], sentence[j]);
                if u == v {
                    continue;
                }
                if stop_ids.contains(&u) && stop_ids.contains(&v) {
                    continue;
                }
                seen.insert((u, v));
            }
        }
        for &pair in &seen {
            *counts.entry(pair).or_insert(0) += 1;
        }
    }
    Ok(counts
        .into_iter()
        .filter(|&(_, c)| c >= min_sentence_count)
        .map(|((u, v), sentence_count)| WordPairStats {
            u,
            v,
            sentence_count,
        })
        .collect())
}

/// A lexical pattern: slots `X` and `Y` around a unigram or bigram midfix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LexicalPattern {
    canonical: String,
}

impl LexicalPattern {
    fn unigram(word: &str) -> Self {
        LexicalPattern {
            canonical: format!("X {word} Y"),
        }
    }

    fn bigram(first: &str, second: &str) -> Self {
        LexicalPattern {
            canonical: format!("X {first}_{second} Y"),
        }
    }

    /// Parses a canonical string, enforcing exactly one `X` slot, one `Y`
    /// slot, and a midfix of one or two tokens.
    pub fn parse(canonical: &str) -> Result<Self> {
        let mid = canonical
            .strip_prefix("X ")
            .and_then(|s| s.strip_suffix(" Y"))
            .ok_or_else(|| Error::Data(format!("pattern {canonical:?} lacks X/Y slots")))?;
        if mid.is_empty() || mid.contains(' ') {
            return Err(Error::Data(format!("pattern {canonical:?} has a bad midfix")));
        }
        let ngram_len = mid.split('_').count();
        if !(1..=2).contains(&ngram_len) {
            return Err(Error::Data(format!(
                "pattern {canonical:?} midfix must be a unigram or bigram"
            )));
        }
        Ok(LexicalPattern {
            canonical: canonical.to_string(),
        })
    }

    pub fn as_str(&self) -> &str {
        &self.canonical
    }

    /// Midfix length in tokens (1 or 2).
    pub fn midfix_len(&self) -> usize {
        self.canonical
            .trim_start_matches("X ")
            .trim_end_matches(" Y")
            .split('_')
            .count()
    }
}

/// One co-occurrence count g(p, u, v) > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternCooccurrence {
    pub pattern: PatternId,
    pub pair: PairId,
    pub count: u64,
}

/// Raw pattern counts before top-K selection, keyed by canonical string.
#[derive(Debug, Default, Clone)]
pub struct PatternCounts {
    /// canonical string -> (pair id -> g)
    counts: BTreeMap<String, BTreeMap<PairId, u64>>,
}

impl PatternCounts {
    pub fn distinct_patterns(&self) -> usize {
        self.counts.len()
    }

    /// Total occurrences for one pattern, summed over all pairs.
    pub fn total(&self, canonical: &str) -> u64 {
        self.counts
            .get(canonical)
            .map(|m| m.values().sum())
            .unwrap_or(0)
    }

    fn add(&mut self, pattern: LexicalPattern, pair: PairId) {
        *self
            .counts
            .entry(pattern.canonical)
            .or_default()
            .entry(pair)
            .or_insert(0) += 1;
    }
}

/// Re-scans the corpus and counts pattern co-occurrences g(p, u, v) for every
/// retained pair. Each in-window occurrence with a non-empty midfix emits one
/// count per midfix unigram and per contiguous midfix bigram.
pub fn extract_patterns(
    scan: &CorpusScan,
    pairs: &[WordPairStats],
    window: usize,
) -> PatternCounts {
    let pair_ids: HashMap<(WordId, WordId), PairId> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.u, p.v), i as PairId))
        .collect();
    let mut out = PatternCounts::default();
    for sentence in &scan.sentences {
        for i in 0..sentence.len() {
            let limit = (i + window).min(sentence.len() - 1);
            for j in (i + 1)..=limit {
                let Some(&pair) = pair_ids.get(&(sentence[i], sentence[j])) else {
                    continue;
                };
                let midfix = &sentence[i + 1..j];
                if midfix.is_empty() {
                    continue;
                }
                for &m in midfix {
                    out.add(LexicalPattern::unigram(scan.vocab.word(m)), pair);
                }
                for k in 0..midfix.len().saturating_sub(1) {
                    out.add(
                        LexicalPattern::bigram(
                            scan.vocab.word(midfix[k]),
                            scan.vocab.word(midfix[k + 1]),
                        ),
                        pair,
                    );
                }
            }
        }
    }
    out
}

/// Keeps the K patterns with the largest total occurrence; ties broken by
/// lexicographically smaller canonical string. Pattern ids are assigned in
/// that selection order.
pub fn select_top_patterns(
    counts: &PatternCounts,
    k: usize,
) -> Result<(Vec<LexicalPattern>, Vec<PatternCooccurrence>)> {
    let available = counts.counts.len();
    if k > available {
        return Err(Error::InsufficientPatterns {
            requested: k,
            available,
        });
    }
    let mut ranked: Vec<(&String, u64)> = counts
        .counts
        .iter()
        .map(|(s, per_pair)| (s, per_pair.values().sum::<u64>()))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);

    let mut patterns = Vec::with_capacity(k);
    let mut cooc = Vec::new();
    for (id, (canonical, _)) in ranked.iter().enumerate() {
        patterns.push(LexicalPattern {
            canonical: (*canonical).clone(),
        });
        for (&pair, &count) in &counts.counts[*canonical] {
            cooc.push(PatternCooccurrence {
                pattern: id as PatternId,
                pair,
                count,
            });
        }
    }
    Ok((patterns, cooc))
}

/// Everything the extract stage produces, ready for PPMI computation.
#[derive(Debug, Clone)]
pub struct ExtractionOutput {
    pub vocab: Vocabulary,
    pub pairs: Vec<WordPairStats>,
    pub patterns: Vec<LexicalPattern>,
    pub cooccurrences: Vec<PatternCooccurrence>,
    pub malformed_lines: u64,
}

/// Full extract stage: scan, pair counting, pattern counting, top-K.
pub fn extract(
    scan: &CorpusScan,
    window: usize,
    min_sentence_count: u32,
    top_patterns: usize,
    stopwords: &HashSet<String>,
) -> Result<ExtractionOutput> {
    let pairs = extract_word_pairs(scan, window, min_sentence_count, stopwords)?;
    let counts = extract_patterns(scan, &pairs, window);
    let (patterns, cooccurrences) = select_top_patterns(&counts, top_patterns)?;
    Ok(ExtractionOutput {
        vocab: scan.vocab.clone(),
        pairs,
        patterns,
        cooccurrences,
        malformed_lines: scan.malformed_lines,
    })
}

pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.split_whitespace().map(|w| w.to_lowercase()).collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

impl ExtractionOutput {
    /// Writes the TSV exports: vocab, retained pairs, pattern table, and the
    /// `pattern \t u \t v \t count` co-occurrence table.
    pub fn save_tsv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.vocab.save_tsv(&dir.join("vocab.tsv"))?;

        let pairs_path = dir.join("word_pairs.tsv");
        let mut w =
            BufWriter::new(File::create(&pairs_path).map_err(|e| Error::io(&pairs_path, e))?);
        for p in &self.pairs {
            writeln!(
                w,
                "{}\t{}\t{}",
                self.vocab.word(p.u),
                self.vocab.word(p.v),
                p.sentence_count
            )
            .map_err(|e| Error::io(&pairs_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&pairs_path, e))?;

        let pat_path = dir.join("patterns.tsv");
        let mut w = BufWriter::new(File::create(&pat_path).map_err(|e| Error::io(&pat_path, e))?);
        for (id, p) in self.patterns.iter().enumerate() {
            writeln!(w, "{id}\t{}", p.as_str()).map_err(|e| Error::io(&pat_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&pat_path, e))?;

        let cooc_path = dir.join("pattern_cooc.tsv");
        let mut w =
            BufWriter::new(File::create(&cooc_path).map_err(|e| Error::io(&cooc_path, e))?);
        for c in &self.cooccurrences {
            let pair = &self.pairs[c.pair as usize];
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                self.patterns[c.pattern as usize].as_str(),
                self.vocab.word(pair.u),
                self.vocab.word(pair.v),
                c.count
            )
            .map_err(|e| Error::io(&cooc_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&cooc_path, e))
    }

    /// Reloads a `save_tsv` directory, reconstructing identical ids.
    pub fn load_tsv(dir: &Path) -> Result<Self> {
        let vocab = Vocabulary::load_tsv(&dir.join("vocab.tsv"))?;

        let pairs_path = dir.join("word_pairs.tsv");
        let file = File::open(&pairs_path).map_err(|e| Error::io(&pairs_path, e))?;
        let mut pairs = Vec::new();
        let mut pair_ids: HashMap<(WordId, WordId), PairId> = HashMap::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&pairs_path, e))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (u, v, c) = (fields.next(), fields.next(), fields.next());
            let (Some(u), Some(v), Some(c)) = (u, v, c) else {
                return Err(Error::format(&pairs_path, "expected 3 tab-separated fields"));
            };
            let lookup = |w: &str| {
                vocab
                    .id(w)
                    .ok_or_else(|| Error::format(&pairs_path, format!("unknown word {w:?}")))
            };
            let (u, v) = (lookup(u)?, lookup(v)?);
            let sentence_count = c
                .parse()
                .map_err(|_| Error::format(&pairs_path, "bad sentence count"))?;
            pair_ids.insert((u, v), pairs.len() as PairId);
            pairs.push(WordPairStats {
                u,
                v,
                sentence_count,
            });
        }

        let pat_path = dir.join("patterns.tsv");
        let file = File::open(&pat_path).map_err(|e| Error::io(&pat_path, e))?;
        let mut patterns = Vec::new();
        let mut pattern_ids: HashMap<String, PatternId> = HashMap::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&pat_path, e))?;
            if line.is_empty() {
                continue;
            }
            let (id, canonical) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(&pat_path, "expected 2 tab-separated fields"))?;
            let id: usize = id
                .parse()
                .map_err(|_| Error::format(&pat_path, "bad pattern id"))?;
            if id != patterns.len() {
                return Err(Error::format(&pat_path, "pattern ids must be dense and in order"));
            }
            pattern_ids.insert(canonical.to_string(), id as PatternId);
            patterns.push(LexicalPattern::parse(canonical)?);
        }

        let cooc_path = dir.join("pattern_cooc.tsv");
        let file = File::open(&cooc_path).map_err(|e| Error::io(&cooc_path, e))?;
        let mut cooccurrences = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&cooc_path, e))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::format(&cooc_path, "expected 4 tab-separated fields"));
            }
            let pattern = *pattern_ids
                .get(fields[0])
                .ok_or_else(|| Error::format(&cooc_path, format!("unknown pattern {:?}", fields[0])))?;
            let lookup = |w: &str| {
                vocab
                    .id(w)
                    .ok_or_else(|| Error::format(&cooc_path, format!("unknown word {w:?}")))
            };
            let key = (lookup(fields[1])?, lookup(fields[2])?);
            let pair = *pair_ids
                .get(&key)
                .ok_or_else(|| Error::format(&cooc_path, "co-occurrence references unretained pair"))?;
            let count = fields[3]
                .parse()
                .map_err(|_| Error::format(&cooc_path, "bad count"))?;
            cooccurrences.push(PatternCooccurrence {
                pattern,
                pair,
                count,
            });
        }

        Ok(ExtractionOutput {
            vocab,
            pairs,
            patterns,
            cooccurrences,
            malformed_lines: 0,
        })
    }

    /// Compact binary equivalent of the TSV exports.
    pub fn save_binary<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(EXTRACT_MAGIC)?;
        binio::write_u32(w, self.vocab.len() as u32)?;
        for word in self.vocab.words() {
            binio::write_str(w, word)?;
        }
        binio::write_u32(w, self.pairs.len() as u32)?;
        for p in &self.pairs {
            binio::write_u32(w, p.u)?;
            binio::write_u32(w, p.v)?;
            binio::write_u32(w, p.sentence_count)?;
        }
        binio::write_u32(w, self.patterns.len() as u32)?;
        for p in &self.patterns {
            binio::write_str(w, p.as_str())?;
        }
        binio::write_u64(w, self.cooccurrences.len() as u64)?;
        for c in &self.cooccurrences {
            binio::write_u32(w, c.pattern)?;
            binio::write_u32(w, c.pair)?;
            binio::write_u64(w, c.count)?;
        }
        binio::write_u64(w, self.malformed_lines)
    }

    pub fn save_binary_path(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.save_binary(&mut buf).map_err(|e| Error::io(path, e))?;
        crate::atomic_write(path, &buf)
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BinReader::new(BufReader::new(file), path);
        r.magic(EXTRACT_MAGIC)?;
        let mut vocab = Vocabulary::new();
        let n_words = r.u32()?;
        for _ in 0..n_words {
            let w = r.str()?;
            vocab.intern(&w);
        }
        let n_pairs = r.u32()?;
        let mut pairs = Vec::with_capacity(n_pairs as usize);
        for _ in 0..n_pairs {
            pairs.push(WordPairStats {
                u: r.u32()?,
                v: r.u32()?,
                sentence_count: r.u32()?,
            });
        }
        let n_patterns = r.u32()?;
        let mut patterns = Vec::with_capacity(n_patterns as usize);
        for _ in 0..n_patterns {
            patterns.push(LexicalPattern::parse(&r.str()?)?);
        }
        let n_cooc = r.u64()?;
        let mut cooccurrences = Vec::with_capacity(n_cooc as usize);
        for _ in 0..n_cooc {
            cooccurrences.push(PatternCooccurrence {
                pattern: r.u32()?,
                pair: r.u32()?,
                count: r.u64()?,
            });
        }
        let malformed_lines = r.u64()?;
        Ok(ExtractionOutput {
            vocab,
            pairs,
            patterns,
            cooccurrences,
            malformed_lines,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(events: &[TokenEvent]) -> Vec<&str> {
        events
            .iter()
            .filter_map(|e| match e {
                TokenEvent::Word(w) => Some(w.as_str()),
                TokenEvent::SentenceBreak => None,
            })
            .collect()
    }

    fn breaks(events: &[TokenEvent]) -> usize {
        events
            .iter()
            .filter(|e| matches!(e, TokenEvent::SentenceBreak))
            .count()
    }

    #[test]
    fn tokenize_simple_sentence() {
        let ev = tokenize("Ostrich is a large bird.");
        assert_eq!(words(&ev), vec!["ostrich", "is", "a", "large", "bird"]);
        assert_eq!(breaks(&ev), 1);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_two_sentences() {
        let scan = CorpusScan::from_text("A b. C d.");
        assert_eq!(scan.sentences.len(), 2);
        assert!(scan.sentences.iter().all(|s| s.len() == 2));
    }

    #[test]
    fn tokenize_collapses_repeated_terminators() {
        let ev = tokenize("Wait... what?!");
        assert_eq!(words(&ev), vec!["wait", "what"]);
        assert_eq!(breaks(&ev), 2);
    }

    #[test]
    fn malformed_lines_are_skipped_and_counted() {
        let bytes: Vec<u8> = b"good line one.\n\xff\xfe broken\nanother fine line.\n".to_vec();
        let scan = CorpusScan::read(bytes.as_slice(), Path::new("test")).unwrap();
        assert_eq!(scan.malformed_lines, 1);
        assert_eq!(scan.sentences.len(), 2);
    }

    fn no_stopwords() -> HashSet<String> {
        HashSet::new()
    }

    #[test]
    fn pair_threshold_is_inclusive() {
        let text = "lion is a big cat.\n".repeat(50);
        let scan = CorpusScan::from_text(&text);
        let pairs = extract_word_pairs(&scan, 5, 50, &no_stopwords()).unwrap();
        let lion = scan.vocab.id("lion").unwrap();
        let cat = scan.vocab.id("cat").unwrap();
        let found = pairs.iter().find(|p| p.u == lion && p.v == cat).unwrap();
        assert_eq!(found.sentence_count, 50);

        let pairs = extract_word_pairs(&scan, 5, 51, &no_stopwords()).unwrap();
        assert!(!pairs.iter().any(|p| p.u == lion && p.v == cat));
    }

    #[test]
    fn all_stopword_pairs_are_excluded() {
        let text = "the of a.\n".repeat(60);
        let scan = CorpusScan::from_text(&text);
        let stop = parse_stopwords("the of a");
        let pairs = extract_word_pairs(&scan, 5, 1, &stop).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn mixed_stopword_pairs_are_kept() {
        let text = "the lion.\n".repeat(10);
        let scan = CorpusScan::from_text(&text);
        let stop = parse_stopwords("the");
        let pairs = extract_word_pairs(&scan, 5, 10, &stop).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn window_bounds_pair_distance() {
        // Distance between "far" and "apart" is 6 > window 5.
        let scan = CorpusScan::from_text("far w1 w2 w3 w4 w5 apart.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let far = scan.vocab.id("far").unwrap();
        let apart = scan.vocab.id("apart").unwrap();
        assert!(!pairs.iter().any(|p| p.u == far && p.v == apart));
        // Distance 5 is inside the window.
        let w1 = scan.vocab.id("w1").unwrap();
        assert!(pairs.iter().any(|p| p.u == w1 && p.v == apart));
    }

    #[test]
    fn pairs_do_not_cross_sentences() {
        let scan = CorpusScan::from_text("alpha beta. gamma delta.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let alpha = scan.vocab.id("alpha").unwrap();
        let gamma = scan.vocab.id("gamma").unwrap();
        assert!(!pairs.iter().any(|p| p.u == alpha && p.v == gamma));
    }

    #[test]
    fn orientation_is_first_to_second() {
        let scan = CorpusScan::from_text("north south.\nnorth south.\nsouth north.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let n = scan.vocab.id("north").unwrap();
        let s = scan.vocab.id("south").unwrap();
        let forward = pairs.iter().find(|p| p.u == n && p.v == s).unwrap();
        let reverse = pairs.iter().find(|p| p.u == s && p.v == n).unwrap();
        assert_eq!(forward.sentence_count, 2);
        assert_eq!(reverse.sentence_count, 1);
    }

    fn retained(scan: &CorpusScan, u: &str, v: &str) -> Vec<WordPairStats> {
        vec![WordPairStats {
            u: scan.vocab.id(u).unwrap(),
            v: scan.vocab.id(v).unwrap(),
            sentence_count: 1,
        }]
    }

    #[test]
    fn midfix_unigrams_and_bigrams() {
        let scan = CorpusScan::from_text("ostrich is a large bird.");
        let pairs = retained(&scan, "ostrich", "bird");
        let counts = extract_patterns(&scan, &pairs, 5);
        assert_eq!(counts.total("X large Y"), 1);
        assert_eq!(counts.total("X a_large Y"), 1);
        assert_eq!(counts.total("X is Y"), 1);
        assert_eq!(counts.total("X is_a Y"), 1);
        assert_eq!(counts.total("X a Y"), 1);
        // No bigram skips a token.
        assert_eq!(counts.total("X is_large Y"), 0);
    }

    #[test]
    fn adjacent_pair_emits_nothing() {
        let scan = CorpusScan::from_text("salt pepper.");
        let pairs = retained(&scan, "salt", "pepper");
        let counts = extract_patterns(&scan, &pairs, 5);
        assert_eq!(counts.distinct_patterns(), 0);
    }

    #[test]
    fn counts_aggregate_over_occurrences() {
        let scan = CorpusScan::from_text("lion is cat. lion is cat.");
        let pairs = retained(&scan, "lion", "cat");
        let counts = extract_patterns(&scan, &pairs, 5);
        assert_eq!(counts.total("X is Y"), 2);
    }

    #[test]
    fn unretained_pairs_emit_nothing() {
        let scan = CorpusScan::from_text("lion is cat. dog is pet.");
        let pairs = retained(&scan, "lion", "cat");
        let counts = extract_patterns(&scan, &pairs, 5);
        // Only the (lion, cat) occurrence is counted.
        assert_eq!(counts.total("X is Y"), 1);
    }

    #[test]
    fn top_patterns_by_total_with_lexicographic_ties() {
        let scan =
            CorpusScan::from_text("a zz b. a zz b. a aa b. c zz d. c qq d. c qq d. e aa f.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let counts = extract_patterns(&scan, &pairs, 5);
        // Totals: zz=3, qq=2, aa=2.
        let (patterns, _) = select_top_patterns(&counts, 2).unwrap();
        assert_eq!(patterns[0].as_str(), "X zz Y");
        // aa ties qq at 2; lexicographically smaller string wins.
        assert_eq!(patterns[1].as_str(), "X aa Y");
    }

    #[test]
    fn top_patterns_identity_when_k_equals_count() {
        let scan = CorpusScan::from_text("a zz b. c qq d.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let counts = extract_patterns(&scan, &pairs, 5);
        let k = counts.distinct_patterns();
        let (patterns, _) = select_top_patterns(&counts, k).unwrap();
        assert_eq!(patterns.len(), k);
    }

    #[test]
    fn top_patterns_rejects_oversized_k() {
        let scan = CorpusScan::from_text("a zz b.");
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let counts = extract_patterns(&scan, &pairs, 5);
        let err = select_top_patterns(&counts, 10).unwrap_err();
        match err {
            Error::InsufficientPatterns {
                requested,
                available,
            } => {
                assert_eq!(requested, 10);
                assert_eq!(available, 1);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn pattern_totals_match_cooccurrence_sums() {
        let scan = CorpusScan::from_text(
            "lion is a big cat. ostrich is a large bird. lion is a big cat. car has a wheel.",
        );
        let pairs = extract_word_pairs(&scan, 5, 1, &no_stopwords()).unwrap();
        let counts = extract_patterns(&scan, &pairs, 5);
        let k = counts.distinct_patterns();
        let (patterns, cooc) = select_top_patterns(&counts, k).unwrap();
        for (id, p) in patterns.iter().enumerate() {
            let sum: u64 = cooc
                .iter()
                .filter(|c| c.pattern == id as PatternId)
                .map(|c| c.count)
                .sum();
            assert_eq!(sum, counts.total(p.as_str()), "pattern {}", p.as_str());
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let text = "the lion is a big cat. the ostrich is a large bird.\n".repeat(20);
        let a = CorpusScan::from_text(&text);
        let b = CorpusScan::from_text(&text);
        assert_eq!(a.vocab, b.vocab);
        assert_eq!(a.sentences, b.sentences);
        let sw = parse_stopwords("the a is");
        let pa = extract_word_pairs(&a, 5, 2, &sw).unwrap();
        let pb = extract_word_pairs(&b, 5, 2, &sw).unwrap();
        assert_eq!(pa, pb);
    }

    #[test]
    fn extraction_roundtrips_tsv_and_binary() {
        let text = "lion is a big cat. ostrich is a large bird.\n".repeat(3);
        let scan = CorpusScan::from_text(&text);
        let out = extract(&scan, 5, 1, 4, &no_stopwords()).unwrap();

        let dir = tempfile::tempdir().unwrap();
        out.save_tsv(dir.path()).unwrap();
        let reloaded = ExtractionOutput::load_tsv(dir.path()).unwrap();
        assert_eq!(out.pairs, reloaded.pairs);
        assert_eq!(out.patterns, reloaded.patterns);
        assert_eq!(out.cooccurrences, reloaded.cooccurrences);

        let bin = dir.path().join("extract.bin");
        out.save_binary_path(&bin).unwrap();
        let reloaded = ExtractionOutput::load_binary(&bin).unwrap();
        assert_eq!(out.pairs, reloaded.pairs);
        assert_eq!(out.patterns, reloaded.patterns);
        assert_eq!(out.cooccurrences, reloaded.cooccurrences);
        assert_eq!(out.vocab, reloaded.vocab);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Window semantics: a pair is counted exactly when the two words
            // co-occur within `window` tokens in some sentence, in order.
            #[test]
            fn window_matches_brute_force(
                sentences in proptest::collection::vec(
                    proptest::collection::vec(0u8..6, 1..10),
                    1..8,
                ),
                window in 2usize..6,
            ) {
                let text: String = sentences
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|w| format!("w{w}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join(". ");
                let scan = CorpusScan::from_text(&text);
                let pairs = extract_word_pairs(&scan, window, 1, &HashSet::new()).unwrap();

                let mut expected: BTreeMap<(String, String), u32> = BTreeMap::new();
                for s in &sentences {
                    let mut seen = HashSet::new();
                    for i in 0..s.len() {
                        for j in (i + 1)..s.len().min(i + window + 1) {
                            if s[i] != s[j] {
                                seen.insert((format!("w{}", s[i]), format!("w{}", s[j])));
                            }
                        }
                    }
                    for p in seen {
                        *expected.entry(p).or_insert(0) += 1;
                    }
                }
                let got: BTreeMap<(String, String), u32> = pairs
                    .iter()
                    .map(|p| {
                        (
                            (
                                scan.vocab.word(p.u).to_string(),
                                scan.vocab.word(p.v).to_string(),
                            ),
                            p.sentence_count,
                        )
                    })
                    .collect();
                prop_assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn vocabulary_ids_are_dense_and_consistent() {
        let scan = CorpusScan::from_text("b a c a b.");
        let vocab = &scan.vocab;
        assert_eq!(vocab.len(), 3);
        for id in 0..vocab.len() as WordId {
            assert_eq!(vocab.id(vocab.word(id)), Some(id));
        }
    }

    #[test]
    fn lexical_pattern_validation() {
        assert!(LexicalPattern::parse("X is_a Y").is_ok());
        assert!(LexicalPattern::parse("X large Y").is_ok());
        assert!(LexicalPattern::parse("no slots").is_err());
        assert!(LexicalPattern::parse("X a_b_c Y").is_err());
        assert_eq!(LexicalPattern::parse("X is_a Y").unwrap().midfix_len(), 2);
    }
}
