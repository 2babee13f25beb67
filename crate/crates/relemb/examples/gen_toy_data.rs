//! Regenerates the bundled toy corpus and its analogy questions:
//!
//! ```text
//! cargo run --example gen_toy_data -- data/
//! ```

use relemb::synth::{generate_choice_questions, generate_corpus, SynthSpec};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data".to_string());
    let dir = std::path::PathBuf::from(dir);
    std::fs::create_dir_all(&dir).expect("create output directory");

    let spec = SynthSpec::default();
    let corpus = generate_corpus(&spec);
    let tokens = corpus.split_whitespace().count();
    std::fs::write(dir.join("toy_corpus.txt"), &corpus).expect("write corpus");

    let questions = generate_choice_questions(&spec, 200, 2);
    std::fs::write(dir.join("toy_questions.tsv"), &questions).expect("write questions");

    println!(
        "wrote {} ({} tokens) and {} (200 questions)",
        dir.join("toy_corpus.txt").display(),
        tokens,
        dir.join("toy_questions.tsv").display()
    );
}
