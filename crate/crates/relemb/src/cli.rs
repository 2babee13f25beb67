//! Pipeline orchestration: shared configuration, staged execution with
//! manifests, and the consolidated report.
//!
//! Configuration lives in a `key = value` file; every key can be overridden
//! by a `RELEMB_<KEY>` environment variable. Each stage writes its artifact
//! atomically and records a manifest with the configuration hash and the
//! content hashes of its inputs and outputs, so reruns can detect staleness.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analogy::{self, Measure};
use crate::association::{compute_ppmi, AssociationStore};
use crate::corpus::{self, CorpusScan, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::trainer::{self, TrainConfig, TrainMode};
use crate::trainset::{self, MiningConfig};

/// Every knob of the pipeline with its default value.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub stopwords: Option<PathBuf>,
    pub window: usize,
    pub min_sentences: u32,
    pub top_patterns: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    pub neg_sample_window: Option<f64>,
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub mode: TrainMode,
    pub seed: u64,
    pub pretrained: Option<PathBuf>,
    pub eval_dataset: Option<PathBuf>,
    pub eval_format: DatasetFormat,
    pub eval_measure: Measure,
    pub epsilon: f64,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: PathBuf::from("corpus.txt"),
            stopwords: None,
            window: 5,
            min_sentences: 50,
            top_patterns: 10_000,
            n_pos: 50_000,
            n_neg: 50_000,
            neg_sample_window: None,
            dim: 300,
            epochs: 10,
            learning_rate: trainer::DEFAULT_LEARNING_RATE,
            mode: TrainMode::Optimized,
            seed: 7,
            pretrained: None,
            eval_dataset: None,
            eval_format: DatasetFormat::ChoiceTsv,
            eval_measure: Measure::PairDiff,
            epsilon: analogy::DEFAULT_EPSILON,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Google,
    ChoiceTsv,
}

impl DatasetFormat {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetFormat::Google => "google",
            DatasetFormat::ChoiceTsv => "choice-tsv",
        }
    }
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "google" => Ok(DatasetFormat::Google),
            "choice-tsv" => Ok(DatasetFormat::ChoiceTsv),
            other => Err(Error::Usage(format!(
                "unknown dataset format {other:?} (expected google or choice-tsv)"
            ))),
        }
    }
}

impl PipelineConfig {
    /// Parses the `key = value` file, then applies `RELEMB_*` overrides.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::format(path, format!("line {}: expected `key = value`", lineno + 1))
            })?;
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut config = PipelineConfig::default();
        for (key, value) in &pairs {
            config.apply(key, value)?;
        }
        config.apply_env_overrides()?;
        // Relative paths are taken relative to the config file's directory.
        if let Some(base) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            let rebase = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&p);
                }
            };
            rebase(&mut config.corpus);
            rebase(&mut config.out_dir);
            if let Some(p) = config.stopwords.as_mut() {
                rebase(p);
            }
            if let Some(p) = config.pretrained.as_mut() {
                rebase(p);
            }
            if let Some(p) = config.eval_dataset.as_mut() {
                rebase(p);
            }
        }
        Ok(config)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad integer for {key}: {v:?}")))
        };
        match key {
            "corpus" => self.corpus = PathBuf::from(value),
            "stopwords" => self.stopwords = Some(PathBuf::from(value)),
            "window" => self.window = parse_usize(value)?,
            "min_sentences" => {
                self.min_sentences = value
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad integer for min_sentences: {value:?}")))?
            }
            "top_patterns" => self.top_patterns = parse_usize(value)?,
            "n_pos" => self.n_pos = parse_usize(value)?,
            "n_neg" => self.n_neg = parse_usize(value)?,
            "neg_sample_window" => {
                self.neg_sample_window = Some(value.parse().map_err(|_| {
                    Error::Usage(format!("bad fraction for neg_sample_window: {value:?}"))
                })?)
            }
            "dim" => self.dim = parse_usize(value)?,
            "epochs" => self.epochs = parse_usize(value)?,
            "learning_rate" => {
                self.learning_rate = value
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad float for learning_rate: {value:?}")))?
            }
            "mode" => self.mode = value.parse()?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad integer for seed: {value:?}")))?
            }
            "pretrained" => self.pretrained = Some(PathBuf::from(value)),
            "eval_dataset" => self.eval_dataset = Some(PathBuf::from(value)),
            "eval_format" => self.eval_format = value.parse()?,
            "eval_measure" => self.eval_measure = value.parse()?,
            "epsilon" => {
                self.epsilon = value
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad float for epsilon: {value:?}")))?
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => {
                return Err(Error::Usage(format!("unknown configuration key {other:?}")));
            }
        }
        Ok(())
    }

    fn apply_env_overrides(&mut self) -> Result<()> {
        const KEYS: [&str; 20] = [
            "corpus",
            "stopwords",
            "window",
            "min_sentences",
            "top_patterns",
            "n_pos",
            "n_neg",
            "neg_sample_window",
            "dim",
            "epochs",
            "learning_rate",
            "mode",
            "seed",
            "pretrained",
            "eval_dataset",
            "eval_format",
            "eval_measure",
            "epsilon",
            "out_dir",
            "unused",
        ];
        for key in KEYS {
            let var = format!("RELEMB_{}", key.to_uppercase());
            if let Ok(value) = std::env::var(&var) {
                if key == "unused" {
                    continue;
                }
                self.apply(key, &value)?;
            }
        }
        Ok(())
    }

    /// Canonical serialization of every effective setting.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("corpus", self.corpus.display().to_string());
        put(
            "stopwords",
            self.stopwords
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "<default>".into()),
        );
        put("window", self.window.to_string());
        put("min_sentences", self.min_sentences.to_string());
        put("top_patterns", self.top_patterns.to_string());
        put("n_pos", self.n_pos.to_string());
        put("n_neg", self.n_neg.to_string());
        put(
            "neg_sample_window",
            self.neg_sample_window
                .map(|w| w.to_string())
                .unwrap_or_else(|| "<none>".into()),
        );
        put("dim", self.dim.to_string());
        put("epochs", self.epochs.to_string());
        put(
            "mode",
            match self.mode {
                TrainMode::Naive => "naive".into(),
                TrainMode::Optimized => "optimized".into(),
            },
        );
        put("learning_rate", self.learning_rate.to_string());
        put("seed", self.seed.to_string());
        put(
            "pretrained",
            self.pretrained
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "<none>".into()),
        );
        put(
            "eval_dataset",
            self.eval_dataset
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "<none>".into()),
        );
        put("eval_format", self.eval_format.name().to_string());
        put("eval_measure", self.eval_measure.name().to_string());
        put("epsilon", self.epsilon.to_string());
        put("out_dir", self.out_dir.display().to_string());
        s
    }

    pub fn config_hash(&self) -> u64 {
        crate::hash_bytes(self.canonical().as_bytes())
    }

    pub fn extract_bin(&self) -> PathBuf {
        self.out_dir.join("extract.bin")
    }

    pub fn extract_tsv_dir(&self) -> PathBuf {
        self.out_dir.join("extract_tsv")
    }

    pub fn store_bin(&self) -> PathBuf {
        self.out_dir.join("assoc.bin")
    }

    pub fn store_tsv(&self) -> PathBuf {
        self.out_dir.join("assoc.tsv")
    }

    pub fn pairs_tsv(&self) -> PathBuf {
        self.out_dir.join("train_pairs.tsv")
    }

    pub fn init_bin(&self) -> PathBuf {
        self.out_dir.join("init.bin")
    }

    pub fn embeddings_bin(&self) -> PathBuf {
        self.out_dir.join("embeddings.bin")
    }

    pub fn metrics_jsonl(&self) -> PathBuf {
        self.out_dir.join("train_metrics.jsonl")
    }

    pub fn eval_jsonl(&self) -> PathBuf {
        let dataset = self
            .eval_dataset
            .as_ref()
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "dataset".into());
        self.out_dir
            .join(format!("eval_{dataset}_{}.jsonl", self.eval_measure.name()))
    }
}

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Extract,
    Ppmi,
    MinePairs,
    Init,
    Train,
    Eval,
}

pub const ALL_STAGES: [Stage; 6] = [
    Stage::Extract,
    Stage::Ppmi,
    Stage::MinePairs,
    Stage::Init,
    Stage::Train,
    Stage::Eval,
];

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Extract => "extract",
            Stage::Ppmi => "ppmi",
            Stage::MinePairs => "mine-pairs",
            Stage::Init => "init",
            Stage::Train => "train",
            Stage::Eval => "eval",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extract" => Ok(Stage::Extract),
            "ppmi" => Ok(Stage::Ppmi),
            "mine-pairs" => Ok(Stage::MinePairs),
            "init" => Ok(Stage::Init),
            "train" => Ok(Stage::Train),
            "eval" => Ok(Stage::Eval),
            other => Err(Error::Usage(format!(
                "unknown stage {other:?} (expected one of extract, ppmi, mine-pairs, init, train, eval, all)"
            ))),
        }
    }
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_hash: String,
    pub inputs: Vec<ManifestEntry>,
    pub outputs: Vec<ManifestEntry>,
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub hash: String,
}

fn manifest_path(config: &PipelineConfig, stage: Stage) -> PathBuf {
    config.out_dir.join(format!("{}.manifest.json", stage.name()))
}

fn entry(path: &Path) -> Result<ManifestEntry> {
    Ok(ManifestEntry {
        path: path.display().to_string(),
        hash: format!("{:016x}", crate::hash_file(path)?),
    })
}

fn write_manifest(
    config: &PipelineConfig,
    stage: Stage,
    inputs: &[&Path],
    outputs: &[&Path],
) -> Result<()> {
    let manifest = Manifest {
        stage: stage.name().to_string(),
        config_hash: format!("{:016x}", config.config_hash()),
        inputs: inputs.iter().map(|p| entry(p)).collect::<Result<_>>()?,
        outputs: outputs.iter().map(|p| entry(p)).collect::<Result<_>>()?,
    };
    let json = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| Error::Data(format!("manifest serialization: {e}")))?;
    crate::atomic_write(&manifest_path(config, stage), &json)
}

pub fn read_manifest(config: &PipelineConfig, stage: Stage) -> Result<Manifest> {
    let path = manifest_path(config, stage);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(&path, format!("bad manifest: {e}")))
}

/// Warns when a prerequisite's manifest was produced under a different
/// configuration.
fn warn_if_stale(config: &PipelineConfig, prerequisite: Stage) {
    if let Ok(manifest) = read_manifest(config, prerequisite) {
        let current = format!("{:016x}", config.config_hash());
        if manifest.config_hash != current {
            eprintln!(
                "warning: stale manifest: `{}` artifact was built with config hash {} (current {})",
                prerequisite.name(),
                manifest.config_hash,
                current
            );
        }
    }
}

fn require(config: &PipelineConfig, stage: Stage, path: &Path, produced_by: Stage) -> Result<()> {
    if !path.exists() {
        return Err(Error::MissingArtifact {
            stage: stage.name().to_string(),
            path: path.to_path_buf(),
            run_first: produced_by.name().to_string(),
        });
    }
    warn_if_stale(config, produced_by);
    Ok(())
}

fn load_stopwords(config: &PipelineConfig) -> Result<std::collections::HashSet<String>> {
    match &config.stopwords {
        Some(path) => corpus::load_stopwords(path),
        None => Ok(corpus::parse_stopwords(corpus::DEFAULT_STOPWORDS)),
    }
}

/// One eval output line; `scope` is `overall`, `semantic`, `syntactic`, or
/// `category:<name>`. The optional provenance fields let `report` group runs
/// into sweep curves.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EvalRecord {
    pub dataset: String,
    pub measure: String,
    pub scope: String,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub flagged: usize,
    pub dim: usize,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_instances: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn report_to_records(
    report: &analogy::EvaluationReport,
    dim: usize,
    epsilon: f64,
    train_instances: Option<usize>,
    label: Option<String>,
) -> Vec<EvalRecord> {
    let mut records = Vec::new();
    let base = |scope: String, total: usize, correct: usize, flagged: usize| EvalRecord {
        dataset: report.dataset.clone(),
        measure: report.measure.clone(),
        scope,
        total,
        correct,
        accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
        flagged,
        dim,
        epsilon,
        train_instances,
        label: label.clone(),
    };
    records.push(base(
        "overall".into(),
        report.total,
        report.correct,
        report.flagged,
    ));
    for rollup in [&report.semantic, &report.syntactic].into_iter().flatten() {
        records.push(base(rollup.name.clone(), rollup.total, rollup.correct, 0));
    }
    for cat in &report.categories {
        records.push(base(format!("category:{}", cat.name), cat.total, cat.correct, 0));
    }
    records
}

pub fn write_records(records: &[EvalRecord], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Data(format!("record serialization: {e}")))?;
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
    }
    crate::atomic_write(path, &buf)
}

/// Renders the human-readable accuracy table for one report.
pub fn render_report_table(report: &analogy::EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dataset: {}  measure: {}", report.dataset, report.measure);
    let _ = writeln!(
        s,
        "{:<28} {:>8} {:>8} {:>9}",
        "scope", "total", "correct", "accuracy"
    );
    let mut row = |name: &str, total: usize, correct: usize| {
        let acc = if total == 0 {
            0.0
        } else {
            100.0 * correct as f64 / total as f64
        };
        let _ = writeln!(s, "{name:<28} {total:>8} {correct:>8} {acc:>8.2}%");
    };
    row("overall", report.total, report.correct);
    for rollup in [&report.semantic, &report.syntactic].into_iter().flatten() {
        row(&rollup.name, rollup.total, rollup.correct);
    }
    for cat in &report.categories {
        row(&cat.name, cat.total, cat.correct);
    }
    if report.flagged > 0 {
        let _ = writeln!(
            s,
            "({} questions answered with missing vocabulary, counted as wrong)",
            report.flagged
        );
    }
    s
}

/// Runs one stage against the shared configuration.
pub fn run_stage(config: &PipelineConfig, stage: Stage) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    match stage {
        Stage::Extract => {
            let scan = CorpusScan::read_path(&config.corpus)?;
            if scan.malformed_lines > 0 {
                eprintln!(
                    "warning: skipped {} malformed (non-UTF-8) lines",
                    scan.malformed_lines
                );
            }
            let stopwords = load_stopwords(config)?;
            let out = corpus::extract(
                &scan,
                config.window,
                config.min_sentences,
                config.top_patterns,
                &stopwords,
            )?;
            out.save_binary_path(&config.extract_bin())?;
            out.save_tsv(&config.extract_tsv_dir())?;
            let mut inputs: Vec<&Path> = vec![&config.corpus];
            if let Some(sw) = &config.stopwords {
                inputs.push(sw);
            }
            write_manifest(config, stage, &inputs, &[&config.extract_bin()])?;
            println!(
                "extract: {} words, {} pairs, {} patterns, {} co-occurrence triples",
                out.vocab.len(),
                out.pairs.len(),
                out.patterns.len(),
                out.cooccurrences.len()
            );
        }
        Stage::Ppmi => {
            require(config, stage, &config.extract_bin(), Stage::Extract)?;
            let extraction = corpus::ExtractionOutput::load_binary(&config.extract_bin())?;
            let store = compute_ppmi(
                &extraction.patterns,
                &extraction.pairs,
                &extraction.cooccurrences,
            )?;
            store.save_path(&config.store_bin())?;
            store.export_tsv(&extraction.vocab, &config.store_tsv())?;
            write_manifest(
                config,
                stage,
                &[&config.extract_bin()],
                &[&config.store_bin()],
            )?;
            let triples: usize = (0..store.pattern_count() as u32)
                .map(|p| store.pattern_support(p).map(|s| s.len()).unwrap_or(0))
                .sum();
            println!(
                "ppmi: {} positive triples over {} patterns x {} pairs",
                triples,
                store.pattern_count(),
                store.pair_count()
            );
        }
        Stage::MinePairs => {
            require(config, stage, &config.store_bin(), Stage::Ppmi)?;
            let store = AssociationStore::load(&config.store_bin())?;
            let instances = trainset::select_train_pairs(
                &store,
                &MiningConfig {
                    n_pos: config.n_pos,
                    n_neg: config.n_neg,
                    seed: config.seed,
                    neg_sample_window: config.neg_sample_window,
                },
            )?;
            trainset::save_train_pairs(&instances, &config.pairs_tsv())?;
            write_manifest(config, stage, &[&config.store_bin()], &[&config.pairs_tsv()])?;
            println!(
                "mine-pairs: {} instances ({} positive, {} negative)",
                instances.len(),
                config.n_pos,
                config.n_neg
            );
        }
        Stage::Init => {
            require(config, stage, &config.extract_bin(), Stage::Extract)?;
            let extraction = corpus::ExtractionOutput::load_binary(&config.extract_bin())?;
            let (matrix, coverage) = build_initial_embeddings(
                extraction.vocab,
                config.dim,
                config.seed,
                config.pretrained.as_deref(),
            )?;
            matrix.save_binary_path(&config.init_bin())?;
            let extract_bin = config.extract_bin();
            let mut inputs: Vec<&Path> = vec![&extract_bin];
            if let Some(p) = &config.pretrained {
                inputs.push(p);
            }
            write_manifest(config, stage, &inputs, &[&config.init_bin()])?;
            match coverage {
                Some(c) => println!(
                    "init: {} x {} matrix, pre-trained coverage {:.1}%",
                    matrix.word_count(),
                    matrix.dim(),
                    100.0 * c
                ),
                None => println!(
                    "init: {} x {} matrix, random Gaussian",
                    matrix.word_count(),
                    matrix.dim()
                ),
            }
        }
        Stage::Train => {
            require(config, stage, &config.store_bin(), Stage::Ppmi)?;
            require(config, stage, &config.pairs_tsv(), Stage::MinePairs)?;
            require(config, stage, &config.init_bin(), Stage::Init)?;
            let store = AssociationStore::load(&config.store_bin())?;
            let instances = trainset::load_train_pairs(&config.pairs_tsv())?;
            let init = EmbeddingMatrix::load_binary(&config.init_bin())?;
            if init.dim() != config.dim {
                return Err(Error::DimensionMismatch {
                    expected: config.dim,
                    found: init.dim(),
                    context: format!("{}", config.init_bin().display()),
                });
            }
            let outcome = trainer::train(
                &instances,
                &store,
                init,
                &TrainConfig {
                    epochs: config.epochs,
                    learning_rate: config.learning_rate,
                    mode: config.mode,
                    seed: config.seed,
                },
            )?;
            outcome.embeddings.save_binary_path(&config.embeddings_bin())?;
            let mut buf = Vec::new();
            for m in &outcome.metrics {
                let line = serde_json::to_string(m)
                    .map_err(|e| Error::Data(format!("metrics serialization: {e}")))?;
                println!("{line}");
                buf.extend_from_slice(line.as_bytes());
                buf.push(b'\n');
            }
            crate::atomic_write(&config.metrics_jsonl(), &buf)?;
            write_manifest(
                config,
                stage,
                &[&config.store_bin(), &config.pairs_tsv(), &config.init_bin()],
                &[&config.embeddings_bin(), &config.metrics_jsonl()],
            )?;
        }
        Stage::Eval => {
            require(config, stage, &config.embeddings_bin(), Stage::Train)?;
            let dataset_path = config.eval_dataset.as_ref().ok_or_else(|| {
                Error::Usage("eval stage needs `eval_dataset` in the configuration".into())
            })?;
            let embeddings = EmbeddingMatrix::load_auto(&config.embeddings_bin())?;
            let dataset = match config.eval_format {
                DatasetFormat::Google => analogy::parse_google(dataset_path)?,
                DatasetFormat::ChoiceTsv => analogy::parse_choice_tsv(dataset_path)?,
            };
            let report = analogy::evaluate(&dataset, &embeddings, config.eval_measure, config.epsilon);
            let train_instances = trainset::load_train_pairs(&config.pairs_tsv())
                .ok()
                .map(|v| v.len());
            let records = report_to_records(
                &report,
                embeddings.dim(),
                config.epsilon,
                train_instances,
                None,
            );
            write_records(&records, &config.eval_jsonl())?;
            print!("{}", render_report_table(&report));
            write_manifest(
                config,
                stage,
                &[&config.embeddings_bin(), dataset_path],
                &[&config.eval_jsonl()],
            )?;
        }
    }
    Ok(())
}

/// Shared by the `init` stage and subcommand: random Gaussian rows, with
/// pre-trained vectors overlaid when a file is given. Returns the coverage
/// fraction for the pre-trained case.
pub fn build_initial_embeddings(
    vocab: Vocabulary,
    dim: usize,
    seed: u64,
    pretrained: Option<&Path>,
) -> Result<(EmbeddingMatrix, Option<f64>)> {
    match pretrained {
        Some(path) => {
            let (matrix, coverage) = EmbeddingMatrix::load_pretrained(path, vocab, seed)?;
            if matrix.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: matrix.dim(),
                    context: format!("pre-trained vectors in {}", path.display()),
                });
            }
            Ok((matrix, Some(coverage)))
        }
        None => Ok((EmbeddingMatrix::init_random(vocab, dim, seed)?, None)),
    }
}

/// Runs every stage in order; `eval` is skipped when no dataset is set.
pub fn run_all(config: &PipelineConfig) -> Result<()> {
    for stage in ALL_STAGES {
        if stage == Stage::Eval && config.eval_dataset.is_none() {
            println!("eval: skipped (no eval_dataset configured)");
            continue;
        }
        run_stage(config, stage)?;
    }
    Ok(())
}

/// Consolidated metrics: a dataset x measure accuracy table plus sweep
/// curves grouped over dimensionality and train-set size.
pub fn report(config: &PipelineConfig, sweep_dir: Option<&Path>) -> Result<String> {
    let mut records: Vec<EvalRecord> = Vec::new();
    if config.out_dir.is_dir() {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&config.out_dir)
            .map_err(|e| Error::io(&config.out_dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .map(|n| {
                        let n = n.to_string_lossy();
                        n.starts_with("eval_") && n.ends_with(".jsonl")
                    })
                    .unwrap_or(false)
            })
            .collect();
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            for line in text.lines() {
                if line.trim().is_empty() {
                    continue;
                }
                let record: EvalRecord = serde_json::from_str(line)
                    .map_err(|e| Error::format(&path, format!("bad record: {e}")))?;
                records.push(record);
            }
        }
    }

    let mut out = String::new();
    if records.is_empty() {
        let _ = writeln!(out, "no eval artifacts found under {}", config.out_dir.display());
        return Ok(out);
    }

    let _ = writeln!(
        out,
        "{:<20} {:<10} {:<12} {:>8} {:>9}",
        "dataset", "measure", "scope", "total", "accuracy"
    );
    for r in records
        .iter()
        .filter(|r| r.scope == "overall" || r.scope == "semantic" || r.scope == "syntactic")
    {
        let _ = writeln!(
            out,
            "{:<20} {:<10} {:<12} {:>8} {:>8.2}%",
            r.dataset,
            r.measure,
            r.scope,
            r.total,
            100.0 * r.accuracy
        );
    }

    if let Some(dir) = sweep_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let overall: Vec<&EvalRecord> =
            records.iter().filter(|r| r.scope == "overall").collect();
        type Axis = (&'static str, fn(&EvalRecord) -> Option<f64>);
        let axes: [Axis; 2] = [
            ("dim", |r| Some(r.dim as f64)),
            ("train_instances", |r| r.train_instances.map(|n| n as f64)),
        ];
        for (axis, get) in axes {
            let mut groups: BTreeMap<(String, String), BTreeMap<u64, f64>> = BTreeMap::new();
            for r in &overall {
                if let Some(x) = get(r) {
                    groups
                        .entry((r.dataset.clone(), r.measure.clone()))
                        .or_default()
                        .insert(x as u64, r.accuracy);
                }
            }
            for ((dataset, measure), points) in groups {
                if points.len() < 2 {
                    continue;
                }
                let points: Vec<(f64, f64)> =
                    points.into_iter().map(|(x, y)| (x as f64, y)).collect();
                let stem = format!("sweep_{axis}_{dataset}_{measure}");
                let mut tsv = String::new();
                let _ = writeln!(tsv, "{axis}\taccuracy");
                for (x, y) in &points {
                    let _ = writeln!(tsv, "{x}\t{y}");
                }
                crate::atomic_write(&dir.join(format!("{stem}.tsv")), tsv.as_bytes())?;
                let svg = render_line_chart(
                    &format!("{dataset} / {measure}: accuracy vs {axis}"),
                    axis,
                    &points,
                );
                crate::atomic_write(&dir.join(format!("{stem}.svg")), svg.as_bytes())?;
                let _ = writeln!(out, "sweep: wrote {stem}.tsv and {stem}.svg");
            }
        }
    }
    Ok(out)
}

/// Minimal SVG line chart: one polyline with point markers and axis labels.
fn render_line_chart(title: &str, x_label: &str, points: &[(f64, f64)]) -> String {
    let (width, height) = (480.0, 320.0);
    let (left, right, top, bottom) = (56.0, 16.0, 32.0, 40.0);
    let (plot_w, plot_h) = (width - left - right, height - top - bottom);
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let span = if (x_max - x_min).abs() < f64::EPSILON {
        1.0
    } else {
        x_max - x_min
    };
    let map = |&(x, y): &(f64, f64)| {
        let px = left + (x - x_min) / span * plot_w;
        let py = top + (1.0 - y) * plot_h;
        (px, py)
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(s, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{title}</text>",
        width / 2.0
    );
    let _ = writeln!(
        s,
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{}\" stroke=\"black\"/>",
        top + plot_h
    );
    let _ = writeln!(
        s,
        "<line x1=\"{left}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        top + plot_h,
        left + plot_w
    );
    for frac in [0.0, 0.5, 1.0] {
        let y = top + (1.0 - frac) * plot_h;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{frac:.1}</text>",
            left - 6.0,
            y + 4.0
        );
    }
    let poly: Vec<String> = points
        .iter()
        .map(|p| {
            let (x, y) = map(p);
            format!("{x:.1},{y:.1}")
        })
        .collect();
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>",
        poly.join(" ")
    );
    for p in points {
        let (x, y) = map(p);
        let _ = writeln!(s, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"steelblue\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            top + plot_h + 16.0,
            p.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{x_label}</text>",
        left + plot_w / 2.0,
        height - 8.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_config(dir: &Path) -> PipelineConfig {
        let spec = crate::synth::SynthSpec::mini(5);
        let corpus_path = dir.join("corpus.txt");
        std::fs::write(&corpus_path, crate::synth::generate_corpus(&spec)).unwrap();
        let questions_path = dir.join("questions.tsv");
        std::fs::write(
            &questions_path,
            crate::synth::generate_choice_questions(&spec, 40, 11),
        )
        .unwrap();
        PipelineConfig {
            corpus: corpus_path,
            min_sentences: 5,
            top_patterns: 30,
            n_pos: 25,
            n_neg: 25,
            dim: 8,
            epochs: 3,
            learning_rate: 0.1,
            eval_dataset: Some(questions_path),
            out_dir: dir.join("out"),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn config_file_and_env_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pipeline.conf");
        std::fs::write(
            &path,
            "# comment\ncorpus = corpus.txt\nwindow = 4\nseed = 99 # trailing comment\n",
        )
        .unwrap();
        let config = PipelineConfig::load(&path).unwrap();
        assert_eq!(config.window, 4);
        assert_eq!(config.seed, 99);
        assert_eq!(config.min_sentences, 50);
        assert_eq!(config.top_patterns, 10_000);
        assert_eq!(config.n_pos, 50_000);
        assert_eq!(config.dim, 300);
        assert_eq!(config.epochs, 10);
        assert_eq!(config.corpus, dir.path().join("corpus.txt"));

        std::env::set_var("RELEMB_WINDOW", "7");
        let config = PipelineConfig::load(&path).unwrap();
        std::env::remove_var("RELEMB_WINDOW");
        assert_eq!(config.window, 7);
    }

    #[test]
    fn unknown_config_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pipeline.conf");
        std::fs::write(&path, "no_such_key = 1\n").unwrap();
        let err = PipelineConfig::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn full_pipeline_produces_all_artifacts_and_manifests() {
        let dir = tempfile::tempdir().unwrap();
        let config = toy_config(dir.path());
        run_all(&config).unwrap();
        for path in [
            config.extract_bin(),
            config.store_bin(),
            config.pairs_tsv(),
            config.init_bin(),
            config.embeddings_bin(),
            config.eval_jsonl(),
        ] {
            assert!(path.exists(), "missing {}", path.display());
        }
        for stage in ALL_STAGES {
            let manifest = read_manifest(&config, stage).unwrap();
            assert_eq!(manifest.config_hash, format!("{:016x}", config.config_hash()));
            // Manifest hashes match artifact contents.
            for entry in manifest.inputs.iter().chain(&manifest.outputs) {
                let actual = crate::hash_file(Path::new(&entry.path)).unwrap();
                assert_eq!(entry.hash, format!("{actual:016x}"), "{}", entry.path);
            }
        }
        let table = report(&config, None).unwrap();
        assert!(table.contains("overall"));
    }

    #[test]
    fn rerun_is_deterministic_and_config_change_warns() {
        let dir = tempfile::tempdir().unwrap();
        let config = toy_config(dir.path());
        run_all(&config).unwrap();
        let first = crate::hash_file(&config.embeddings_bin()).unwrap();
        run_all(&config).unwrap();
        let second = crate::hash_file(&config.embeddings_bin()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn missing_prerequisite_names_the_stage() {
        let dir = tempfile::tempdir().unwrap();
        let config = toy_config(dir.path());
        let err = run_stage(&config, Stage::Ppmi).unwrap_err();
        match err {
            Error::MissingArtifact { run_first, .. } => assert_eq!(run_first, "extract"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn report_groups_dim_sweeps() {
        let dir = tempfile::tempdir().unwrap();
        let config = PipelineConfig {
            out_dir: dir.path().to_path_buf(),
            ..PipelineConfig::default()
        };
        for (dim, acc) in [(8usize, 0.5), (16, 0.7), (32, 0.8)] {
            let records = vec![EvalRecord {
                dataset: "toy".into(),
                measure: "pairdiff".into(),
                scope: "overall".into(),
                total: 40,
                correct: (acc * 40.0) as usize,
                accuracy: acc,
                flagged: 0,
                dim,
                epsilon: 1e-5,
                train_instances: None,
                label: None,
            }];
            write_records(&records, &dir.path().join(format!("eval_toy_d{dim}.jsonl"))).unwrap();
        }
        let sweep_dir = dir.path().join("sweeps");
        let out = report(&config, Some(&sweep_dir)).unwrap();
        assert!(out.contains("sweep_dim_toy_pairdiff"));
        assert!(sweep_dir.join("sweep_dim_toy_pairdiff.tsv").exists());
        let svg = std::fs::read_to_string(sweep_dir.join("sweep_dim_toy_pairdiff.svg")).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn report_with_no_artifacts_is_a_notice() {
        let dir = tempfile::tempdir().unwrap();
        let config = PipelineConfig {
            out_dir: dir.path().join("empty"),
            ..PipelineConfig::default()
        };
        let out = report(&config, None).unwrap();
        assert!(out.contains("no eval artifacts"));
    }
}
