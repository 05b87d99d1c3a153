//! `skp` — KB linearization and KBQA data preparation toolkit.

mod commands;
mod config;
mod manifest;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use skp_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "skp",
    version,
    about = "Linearize a knowledge base and prepare retrieval-ready KBQA data",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn an N-Triples dump into a passage corpus
    Linearize(commands::linearize::Args),
    /// Randomly drop a fraction of dump facts, preserving the format
    Ablate(commands::ablate::Args),
    /// Generate masking examples and contrastive pairs from a corpus
    GenPretrain(commands::gen_pretrain::Args),
    /// Compute masking / contrastive / joint losses from a JSON input
    Loss(commands::loss::Args),
    /// Build a block attention mask from a segment layout
    Mask(commands::mask::Args),
    /// Embed texts with the deterministic stand-in embedder
    EmbedStub(commands::embed::Args),
    /// Cluster an embedding file into an inverted-file index
    BuildIndex(commands::index::Args),
    /// Rank corpus rows against query embeddings
    Search(commands::search::Args),
    /// Score retrieval results and answer predictions
    Eval(commands::eval::Args),
    /// Run the whole chain from dump to metric report
    Pipeline(commands::pipeline::Args),
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("skp: {e}");
        std::process::exit(2);
    }
    if let Err(e) = run(cli) {
        eprintln!("skp: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Linearize(args) => commands::linearize::run(&args),
        Command::Ablate(args) => commands::ablate::run(&args),
        Command::GenPretrain(args) => commands::gen_pretrain::run(&args),
        Command::Loss(args) => commands::loss::run(&args),
        Command::Mask(args) => commands::mask::run(&args),
        Command::EmbedStub(args) => commands::embed::run(&args),
        Command::BuildIndex(args) => commands::index::run(&args),
        Command::Search(args) => commands::search::run(&args),
        Command::Eval(args) => commands::eval::run(&args),
        Command::Pipeline(args) => commands::pipeline::run(&args),
    }
}

/// Usage problems exit 2, everything else (data, format, io) exits 1.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

/// `SKP_THREADS` caps the rayon pool; unset means available parallelism.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SKP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::Config(format!("SKP_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size thread pool: {e}")))
}

/// One question to embed and search for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub question_id: String,
    pub text: String,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut items = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item: T = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("{}:{}: bad record: {e}", path.display(), no + 1))
        })?;
        items.push(item);
    }
    Ok(items)
}
