//! PPMI association scores between patterns and word pairs.
//!
//! For counts g(p, u, v) the association strength is
//! `f(p,u,v) = max(0, ln(g(p,u,v) g(*,*,*) / (g(p,*,*) g(*,u,v))))`,
//! where `*` sums over the retained pattern/pair universe. Entries with a
//! non-positive score are dropped, so every stored value is strictly
//! positive. The support set R(p) collects a pattern's stored entries and
//! |R(p)| is their sum.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::binio::{self, BinReader};
use crate::corpus::{
    LexicalPattern, PairId, PatternCooccurrence, PatternId, Vocabulary, WordId, WordPairStats,
};
use crate::error::{Error, Result};

const STORE_MAGIC: &[u8; 8] = b"RELSTOR1";

/// Sparse triple store of PPMI scores with per-pattern support sets.
///
/// Immutable after construction; safe to share across threads read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationStore {
    /// Pattern canonical strings; index is the pattern id.
    patterns: Vec<String>,
    /// Word ids behind each pair id.
    pair_words: Vec<(WordId, WordId)>,
    /// Per-pattern support: (pair id, f) sorted by pair id, f > 0.
    support: Vec<Vec<(PairId, f64)>>,
    /// |R(p)|: sum of the stored f values, in storage order.
    norms: Vec<f64>,
    /// g(p,*,*) count marginals.
    g_pattern: Vec<u64>,
    /// g(*,u,v) count marginals.
    g_pair: Vec<u64>,
    /// g(*,*,*).
    g_total: u64,
}

/// Computes PPMI scores from pattern co-occurrence counts.
///
/// Marginals are taken over exactly the given (pattern, pair) universe.
pub fn compute_ppmi(
    patterns: &[LexicalPattern],
    pairs: &[WordPairStats],
    counts: &[PatternCooccurrence],
) -> Result<AssociationStore> {
    if counts.is_empty() {
        return Err(Error::Data(
            "cannot compute associations from an empty co-occurrence table".into(),
        ));
    }
    let mut g_pattern = vec![0u64; patterns.len()];
    let mut g_pair = vec![0u64; pairs.len()];
    let mut g_total = 0u64;
    for c in counts {
        g_pattern[c.pattern as usize] += c.count;
        g_pair[c.pair as usize] += c.count;
        g_total += c.count;
    }

    let mut support: Vec<Vec<(PairId, f64)>> = vec![Vec::new(); patterns.len()];
    for c in counts {
        let num = c.count as f64 * g_total as f64;
        let den = g_pattern[c.pattern as usize] as f64 * g_pair[c.pair as usize] as f64;
        let f = (num / den).ln();
        if f > 0.0 {
            support[c.pattern as usize].push((c.pair, f));
        }
    }
    for entries in &mut support {
        entries.sort_by_key(|&(pair, _)| pair);
    }
    let norms = support
        .iter()
        .map(|entries| entries.iter().map(|&(_, f)| f).sum())
        .collect();

    Ok(AssociationStore {
        patterns: patterns.iter().map(|p| p.as_str().to_string()).collect(),
        pair_words: pairs.iter().map(|p| (p.u, p.v)).collect(),
        support,
        norms,
        g_pattern,
        g_pair,
        g_total,
    })
}

impl AssociationStore {
    /// Builds a store from precomputed association scores. Entries must be
    /// strictly positive; they are sorted per pattern by pair id.
    pub fn from_raw(
        patterns: Vec<String>,
        pair_words: Vec<(WordId, WordId)>,
        mut support: Vec<Vec<(PairId, f64)>>,
    ) -> Result<Self> {
        if support.len() != patterns.len() {
            return Err(Error::Data(format!(
                "{} support lists for {} patterns",
                support.len(),
                patterns.len()
            )));
        }
        for entries in &mut support {
            entries.sort_by_key(|&(pair, _)| pair);
            for &(pair, f) in entries.iter() {
                if pair as usize >= pair_words.len() {
                    return Err(Error::Data(format!("pair id {pair} out of range")));
                }
                if f <= 0.0 || !f.is_finite() {
                    return Err(Error::Data(format!(
                        "association scores must be positive and finite, got {f}"
                    )));
                }
            }
        }
        let norms = support
            .iter()
            .map(|entries| entries.iter().map(|&(_, f)| f).sum())
            .collect();
        let (n_pat, n_pair) = (patterns.len(), pair_words.len());
        Ok(AssociationStore {
            patterns,
            pair_words,
            support,
            norms,
            g_pattern: vec![0; n_pat],
            g_pair: vec![0; n_pair],
            g_total: 0,
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pair_words.len()
    }

    pub fn pattern_string(&self, p: PatternId) -> Result<&str> {
        self.check(p)?;
        Ok(&self.patterns[p as usize])
    }

    pub fn pair_words(&self, pair: PairId) -> (WordId, WordId) {
        self.pair_words[pair as usize]
    }

    pub fn g_total(&self) -> u64 {
        self.g_total
    }

    pub fn g_pattern(&self, p: PatternId) -> u64 {
        self.g_pattern[p as usize]
    }

    pub fn g_pair(&self, pair: PairId) -> u64 {
        self.g_pair[pair as usize]
    }

    fn check(&self, p: PatternId) -> Result<()> {
        if (p as usize) < self.patterns.len() {
            Ok(())
        } else {
            Err(Error::UnknownPattern {
                id: p,
                count: self.patterns.len(),
            })
        }
    }

    /// R(p): the pattern's positive entries, sorted by pair id.
    pub fn pattern_support(&self, p: PatternId) -> Result<&[(PairId, f64)]> {
        self.check(p)?;
        Ok(&self.support[p as usize])
    }

    /// |R(p)|: the stored sum of the support scores.
    pub fn pattern_norm(&self, p: PatternId) -> Result<f64> {
        self.check(p)?;
        Ok(self.norms[p as usize])
    }

    /// Pattern ids with at least one support entry.
    pub fn patterns_with_support(&self) -> impl Iterator<Item = PatternId> + '_ {
        (0..self.patterns.len() as PatternId).filter(|&p| !self.support[p as usize].is_empty())
    }

    /// TSV export `pattern \t u \t v \t f` using word surface forms.
    pub fn export_tsv(&self, vocab: &Vocabulary, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (p, entries) in self.support.iter().enumerate() {
            for &(pair, f) in entries {
                let (u, v) = self.pair_words[pair as usize];
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}",
                    self.patterns[p],
                    vocab.word(u),
                    vocab.word(v),
                    f
                )
                .map_err(|e| Error::io(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Binary store file: header with universe sizes and count marginals,
    /// then sorted triple records.
    pub fn save<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(STORE_MAGIC)?;
        binio::write_u32(w, self.patterns.len() as u32)?;
        binio::write_u32(w, self.pair_words.len() as u32)?;
        binio::write_u64(w, self.g_total)?;
        for p in &self.patterns {
            binio::write_str(w, p)?;
        }
        for &g in &self.g_pattern {
            binio::write_u64(w, g)?;
        }
        for &(u, v) in &self.pair_words {
            binio::write_u32(w, u)?;
            binio::write_u32(w, v)?;
        }
        for &g in &self.g_pair {
            binio::write_u64(w, g)?;
        }
        let n_triples: u64 = self.support.iter().map(|s| s.len() as u64).sum();
        binio::write_u64(w, n_triples)?;
        for (p, entries) in self.support.iter().enumerate() {
            for &(pair, f) in entries {
                binio::write_u32(w, p as u32)?;
                binio::write_u32(w, pair)?;
                binio::write_f64(w, f)?;
            }
        }
        Ok(())
    }

    pub fn save_path(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.save(&mut buf).map_err(|e| Error::io(path, e))?;
        crate::atomic_write(path, &buf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BinReader::new(BufReader::new(file), path);
        r.magic(STORE_MAGIC)?;
        let n_patterns = r.u32()? as usize;
        let n_pairs = r.u32()? as usize;
        let g_total = r.u64()?;
        let mut patterns = Vec::with_capacity(n_patterns);
        for _ in 0..n_patterns {
            patterns.push(r.str()?);
        }
        let mut g_pattern = Vec::with_capacity(n_patterns);
        for _ in 0..n_patterns {
            g_pattern.push(r.u64()?);
        }
        let mut pair_words = Vec::with_capacity(n_pairs);
        for _ in 0..n_pairs {
            pair_words.push((r.u32()?, r.u32()?));
        }
        let mut g_pair = Vec::with_capacity(n_pairs);
        for _ in 0..n_pairs {
            g_pair.push(r.u64()?);
        }
        let n_triples = r.u64()?;
        let mut support: Vec<Vec<(PairId, f64)>> = vec![Vec::new(); n_patterns];
        for _ in 0..n_triples {
            let p = r.u32()? as usize;
            let pair = r.u32()?;
            let f = r.f64()?;
            if p >= n_patterns || pair as usize >= n_pairs {
                return Err(Error::format(path, "triple record out of range"));
            }
            support[p].push((pair, f));
        }
        let norms = support
            .iter()
            .map(|entries| entries.iter().map(|&(_, f)| f).sum())
            .collect();
        Ok(AssociationStore {
            patterns,
            pair_words,
            support,
            norms,
            g_pattern,
            g_pair,
            g_total,
        })
    }

    /// Reads back a TSV export produced by [`export_tsv`](Self::export_tsv).
    pub fn import_tsv(path: &Path, vocab: &Vocabulary) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut patterns: Vec<String> = Vec::new();
        let mut pattern_ids: std::collections::HashMap<String, PatternId> = Default::default();
        let mut pair_words: Vec<(WordId, WordId)> = Vec::new();
        let mut pair_ids: std::collections::HashMap<(WordId, WordId), PairId> = Default::default();
        let mut support: Vec<Vec<(PairId, f64)>> = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::format(path, "expected 4 tab-separated fields"));
            }
            let p = *pattern_ids.entry(fields[0].to_string()).or_insert_with(|| {
                patterns.push(fields[0].to_string());
                support.push(Vec::new());
                (patterns.len() - 1) as PatternId
            });
            let lookup = |w: &str| {
                vocab
                    .id(w)
                    .ok_or_else(|| Error::format(path, format!("unknown word {w:?}")))
            };
            let key = (lookup(fields[1])?, lookup(fields[2])?);
            let pair = *pair_ids.entry(key).or_insert_with(|| {
                pair_words.push(key);
                (pair_words.len() - 1) as PairId
            });
            let f: f64 = fields[3]
                .parse()
                .map_err(|_| Error::format(path, "bad association score"))?;
            support[p as usize].push((pair, f));
        }
        AssociationStore::from_raw(patterns, pair_words, support)
    }
}
