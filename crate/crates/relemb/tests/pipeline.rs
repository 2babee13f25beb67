//! Drives the `relemb` binary end to end: exit codes, artifacts, staleness
//! warnings, and the report command.

use std::path::Path;
use std::process::{Command, Output};

use relemb::synth::{generate_choice_questions, generate_corpus, SynthSpec};

fn relemb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relemb"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn relemb")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_toy(dir: &Path) {
    let spec = SynthSpec::mini(5);
    std::fs::write(dir.join("corpus.txt"), generate_corpus(&spec)).unwrap();
    std::fs::write(
        dir.join("questions.tsv"),
        generate_choice_questions(&spec, 30, 11),
    )
    .unwrap();
    std::fs::write(
        dir.join("pipeline.conf"),
        "corpus = corpus.txt\nmin_sentences = 5\ntop_patterns = 30\nn_pos = 25\nn_neg = 25\n\
         dim = 8\nepochs = 3\nlearning_rate = 0.1\nseed = 7\n\
         eval_dataset = questions.tsv\neval_format = choice-tsv\neval_measure = pairdiff\n\
         out_dir = out\n",
    )
    .unwrap();
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = relemb(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    write_toy(dir.path());
    let out = relemb(&["run", "bogus-stage", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    // A missing configuration file, by contrast, is a data error.
    let out = relemb(&["run", "all", "--config", "missing.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = relemb(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("extract"));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = relemb(
        &[
            "extract",
            "--corpus",
            "missing.txt",
            "--window",
            "5",
            "--min-sentences",
            "50",
            "--top-patterns",
            "100",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    write_toy(dir.path());
    // Stage run without its prerequisite names the stage to run first.
    let out = relemb(&["run", "train", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ppmi"), "{}", stderr(&out));
}

#[test]
fn run_all_produces_artifacts_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let out = relemb(&["run", "all", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("extract:"));
    assert!(text.contains("mean_loss"));
    assert!(text.contains("overall"));
    for artifact in [
        "out/extract.bin",
        "out/extract_tsv/vocab.tsv",
        "out/extract_tsv/pattern_cooc.tsv",
        "out/assoc.bin",
        "out/assoc.tsv",
        "out/train_pairs.tsv",
        "out/init.bin",
        "out/embeddings.bin",
        "out/train_metrics.jsonl",
        "out/eval_questions_pairdiff.jsonl",
        "out/extract.manifest.json",
        "out/train.manifest.json",
    ] {
        assert!(dir.path().join(artifact).exists(), "missing {artifact}");
    }

    let first = std::fs::read(dir.path().join("out/embeddings.bin")).unwrap();
    let out = relemb(&["run", "all", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let second = std::fs::read(dir.path().join("out/embeddings.bin")).unwrap();
    assert_eq!(first, second, "rerun must be bit-identical");

    // The report command consolidates the eval records.
    let out = relemb(&["report", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("pairdiff"));
}

#[test]
fn config_change_warns_about_stale_manifests() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let out = relemb(&["run", "extract", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    // Change a setting that the extract artifact depended on.
    let conf = dir.path().join("pipeline.conf");
    let text = std::fs::read_to_string(&conf).unwrap();
    std::fs::write(&conf, text.replace("min_sentences = 5", "min_sentences = 6")).unwrap();
    let out = relemb(&["run", "ppmi", "--config", "pipeline.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("stale manifest"),
        "expected staleness warning, got: {}",
        stderr(&out)
    );
}

#[test]
fn standalone_subcommands_compose_into_a_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let run = |args: &[&str]| {
        let out = relemb(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        out
    };
    run(&[
        "extract",
        "--corpus",
        "corpus.txt",
        "--window",
        "5",
        "--min-sentences",
        "5",
        "--top-patterns",
        "30",
        "--out",
        "work",
    ]);
    run(&[
        "ppmi",
        "--extract",
        "work/extract.bin",
        "--out",
        "work/assoc.bin",
        "--tsv",
        "work/assoc.tsv",
    ]);
    run(&[
        "mine-pairs",
        "--store",
        "work/assoc.bin",
        "--pos",
        "25",
        "--neg",
        "25",
        "--seed",
        "7",
        "--out",
        "work/pairs.tsv",
    ]);
    run(&[
        "init",
        "--vocab",
        "work/extract_tsv/vocab.tsv",
        "--dim",
        "8",
        "--seed",
        "7",
        "--out",
        "work/init.bin",
    ]);
    let out = run(&[
        "train",
        "--store",
        "work/assoc.bin",
        "--pairs",
        "work/pairs.tsv",
        "--init",
        "work/init.bin",
        "--dim",
        "8",
        "--epochs",
        "3",
        "--lr",
        "0.1",
        "--mode",
        "naive",
        "--seed",
        "7",
        "--out",
        "work/emb.bin",
        "--metrics",
        "work/metrics.jsonl",
    ]);
    assert_eq!(stdout(&out).lines().count(), 3, "one metrics line per epoch");
    run(&[
        "eval",
        "--embeddings",
        "work/emb.bin",
        "--dataset",
        "questions.tsv",
        "--format",
        "choice-tsv",
        "--measure",
        "pairdiff",
        "--report",
        "work/report.jsonl",
    ]);
    assert!(dir.path().join("work/report.jsonl").exists());
    assert!(dir.path().join("work/metrics.jsonl").exists());
}

#[test]
fn eval_reads_google_format_and_text_embeddings() {
    let dir = tempfile::tempdir().unwrap();
    // Planted offsets in the text format.
    std::fs::write(
        dir.path().join("emb.txt"),
        "man 1 0 0.2\nwoman 1 1 0.2\nking 3 0 0.9\nqueen 3 1 0.9\napple -2 0.5 -0.7\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("google.txt"),
        ": family\nman woman king queen\n: gram1-opposite\nking queen man woman\n",
    )
    .unwrap();
    let out = relemb(
        &[
            "eval",
            "--embeddings",
            "emb.txt",
            "--dataset",
            "google.txt",
            "--format",
            "google",
            "--measure",
            "cosadd",
            "--report",
            "report.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("semantic"), "{text}");
    assert!(text.contains("syntactic"), "{text}");
    let records = std::fs::read_to_string(dir.path().join("report.jsonl")).unwrap();
    assert!(records.lines().count() >= 3);
    // Both questions have exact planted offsets.
    assert!(text.contains("100.00%"), "{text}");
}
