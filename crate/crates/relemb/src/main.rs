use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use relemb::analogy::{self, Measure};
use relemb::association::{compute_ppmi, AssociationStore};
use relemb::cli::{self, DatasetFormat, PipelineConfig, Stage};
use relemb::corpus::{self, CorpusScan, ExtractionOutput, Vocabulary};
use relemb::embedding::EmbeddingMatrix;
use relemb::trainer::{self, TrainConfig, TrainMode};
use relemb::trainset::{self, MiningConfig};
use relemb::Error;

/// Relation-aware word embeddings: mine lexical patterns from a corpus,
/// train word vectors on pattern pairs, and evaluate them on analogies.
#[derive(Parser)]
#[command(name = "relemb", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a corpus into word pairs, patterns, and co-occurrence counts.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 50)]
        min_sentences: u32,
        #[arg(long, default_value_t = 10_000)]
        top_patterns: usize,
        /// Stop-word list file; a built-in default list is used if omitted.
        #[arg(long)]
        stopwords: Option<PathBuf>,
        /// Output directory for the binary artifact and TSV exports.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute PPMI association scores from an extraction artifact.
    Ppmi {
        /// The extract.bin produced by `extract`.
        #[arg(long)]
        extract: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional TSV export of the scores.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Mine relationally similar/dissimilar pattern pairs for training.
    MinePairs {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 50_000)]
        pos: usize,
        #[arg(long, default_value_t = 50_000)]
        neg: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Sample negatives from this bottom fraction instead of the strict
        /// bottom of the ranking.
        #[arg(long)]
        neg_sample_window: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Initialize the embedding matrix (random or from pre-trained vectors).
    Init {
        /// Vocabulary TSV (or word-per-line list).
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 300)]
        dim: usize,
        /// Pre-trained vectors in `word v1 ... vd` text format.
        #[arg(long)]
        pretrained: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn word vectors from mined pattern pairs.
    Train {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        /// Initial embeddings (binary file from `init`).
        #[arg(long)]
        init: PathBuf,
        #[arg(long, default_value_t = 300)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = trainer::DEFAULT_LEARNING_RATE)]
        lr: f64,
        #[arg(long, default_value = "optimized")]
        mode: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Where to write per-epoch metrics (JSON lines; also printed).
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Evaluate embeddings on an analogy benchmark.
    Eval {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        format: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = analogy::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Where to write the JSON-lines report records.
        #[arg(long)]
        report: PathBuf,
        /// Optional provenance label recorded with the results.
        #[arg(long)]
        label: Option<String>,
        /// Optional train-set size recorded with the results (for sweeps).
        #[arg(long)]
        train_size: Option<usize>,
    },
    /// Run one pipeline stage (or `all`) against a configuration file.
    Run {
        /// `extract`, `ppmi`, `mine-pairs`, `init`, `train`, `eval`, or `all`.
        stage: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Consolidated accuracy table and sweep curves from eval artifacts.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Directory for sweep TSV/SVG files.
        #[arg(long)]
        sweep_out: Option<PathBuf>,
    },
}

fn run(command: Command) -> relemb::Result<()> {
    match command {
        Command::Extract {
            corpus,
            window,
            min_sentences,
            top_patterns,
            stopwords,
            out,
        } => {
            let scan = CorpusScan::read_path(&corpus)?;
            if scan.malformed_lines > 0 {
                eprintln!(
                    "warning: skipped {} malformed (non-UTF-8) lines",
                    scan.malformed_lines
                );
            }
            let stopwords = match stopwords {
                Some(path) => corpus::load_stopwords(&path)?,
                None => corpus::parse_stopwords(corpus::DEFAULT_STOPWORDS),
            };
            let output =
                corpus::extract(&scan, window, min_sentences, top_patterns, &stopwords)?;
            output.save_binary_path(&out.join("extract.bin"))?;
            output.save_tsv(&out.join("extract_tsv"))?;
            println!(
                "extract: {} words, {} pairs, {} patterns, {} co-occurrence triples",
                output.vocab.len(),
                output.pairs.len(),
                output.patterns.len(),
                output.cooccurrences.len()
            );
        }
        Command::Ppmi { extract, out, tsv } => {
            let extraction = ExtractionOutput::load_binary(&extract)?;
            let store = compute_ppmi(
                &extraction.patterns,
                &extraction.pairs,
                &extraction.cooccurrences,
            )?;
            store.save_path(&out)?;
            if let Some(tsv) = tsv {
                store.export_tsv(&extraction.vocab, &tsv)?;
            }
            println!(
                "ppmi: {} patterns x {} pairs",
                store.pattern_count(),
                store.pair_count()
            );
        }
        Command::MinePairs {
            store,
            pos,
            neg,
            seed,
            neg_sample_window,
            out,
        } => {
            let store = AssociationStore::load(&store)?;
            let instances = trainset::select_train_pairs(
                &store,
                &MiningConfig {
                    n_pos: pos,
                    n_neg: neg,
                    seed,
                    neg_sample_window,
                },
            )?;
            trainset::save_train_pairs(&instances, &out)?;
            println!("mine-pairs: {} instances written to {}", instances.len(), out.display());
        }
        Command::Init {
            vocab,
            dim,
            pretrained,
            seed,
            out,
        } => {
            let vocab = Vocabulary::load_tsv(&vocab)?;
            let (matrix, coverage) =
                cli::build_initial_embeddings(vocab, dim, seed, pretrained.as_deref())?;
            matrix.save_binary_path(&out)?;
            match coverage {
                Some(c) => println!(
                    "init: {} x {}, pre-trained coverage {:.1}%",
                    matrix.word_count(),
                    matrix.dim(),
                    100.0 * c
                ),
                None => println!("init: {} x {}, random Gaussian", matrix.word_count(), matrix.dim()),
            }
        }
        Command::Train {
            store,
            pairs,
            init,
            dim,
            epochs,
            lr,
            mode,
            seed,
            out,
            metrics,
        } => {
            let store = AssociationStore::load(&store)?;
            let instances = trainset::load_train_pairs(&pairs)?;
            let initial = EmbeddingMatrix::load_binary(&init)?;
            if initial.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: initial.dim(),
                    context: format!("{}", init.display()),
                });
            }
            let mode: TrainMode = mode.parse()?;
            let outcome = trainer::train(
                &instances,
                &store,
                initial,
                &TrainConfig {
                    epochs,
                    learning_rate: lr,
                    mode,
                    seed,
                },
            )?;
            outcome.embeddings.save_binary_path(&out)?;
            let mut buf = Vec::new();
            for m in &outcome.metrics {
                let line = serde_json::to_string(m)
                    .map_err(|e| Error::Data(format!("metrics serialization: {e}")))?;
                println!("{line}");
                buf.extend_from_slice(line.as_bytes());
                buf.push(b'\n');
            }
            if let Some(path) = metrics {
                relemb::atomic_write(&path, &buf)?;
            }
        }
        Command::Eval {
            embeddings,
            dataset,
            format,
            measure,
            epsilon,
            report,
            label,
            train_size,
        } => {
            let embeddings = EmbeddingMatrix::load_auto(&embeddings)?;
            let format: DatasetFormat = format.parse()?;
            let measure: Measure = measure.parse()?;
            let parsed = match format {
                DatasetFormat::Google => analogy::parse_google(&dataset)?,
                DatasetFormat::ChoiceTsv => analogy::parse_choice_tsv(&dataset)?,
            };
            let result = analogy::evaluate(&parsed, &embeddings, measure, epsilon);
            let records =
                cli::report_to_records(&result, embeddings.dim(), epsilon, train_size, label);
            cli::write_records(&records, &report)?;
            print!("{}", cli::render_report_table(&result));
        }
        Command::Run { stage, config } => {
            let config = PipelineConfig::load(&config)?;
            if stage == "all" {
                cli::run_all(&config)?;
            } else {
                let stage: Stage = stage.parse()?;
                cli::run_stage(&config, stage)?;
            }
        }
        Command::Report { config, sweep_out } => {
            let config = PipelineConfig::load(&config)?;
            print!("{}", cli::report(&config, sweep_out.as_deref())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // Help and version requests are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
