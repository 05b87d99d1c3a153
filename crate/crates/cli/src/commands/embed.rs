use std::io::BufRead;
use std::path::PathBuf;

use serde_json::json;

use skp_core::linearize::read_corpus;
use skp_core::retrieval::{save_embeddings, stub_embed};
use skp_core::{Error, Result};

use crate::manifest::RunManifest;
use crate::QuestionRecord;

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// Passage corpus JSONL; embeds each passage text
    Passages,
    /// Questions JSONL {question_id, text}; embeds each question
    Questions,
    /// Plain text, one input per non-empty line
    Lines,
}

#[derive(clap::Args)]
pub struct Args {
    /// Texts to embed, format per --format
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Embedding matrix to write
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "passages")]
    pub format: InputFormat,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: &Args) -> Result<()> {
    let texts: Vec<String> = match args.format {
        InputFormat::Passages => {
            read_corpus(&args.input)?.into_iter().map(|p| p.text).collect()
        }
        InputFormat::Questions => crate::read_jsonl::<QuestionRecord>(&args.input)?
            .into_iter()
            .map(|q| q.text)
            .collect(),
        InputFormat::Lines => {
            let file = std::fs::File::open(&args.input)?;
            std::io::BufReader::new(file)
                .lines()
                .collect::<std::io::Result<Vec<_>>>()?
                .into_iter()
                .filter(|l| !l.trim().is_empty())
                .collect()
        }
    };
    if texts.is_empty() {
        return Err(Error::Data(format!("{} holds no texts to embed", args.input.display())));
    }

    let matrix = stub_embed(&texts, args.dim, args.seed)?;
    save_embeddings(&args.out, &matrix)?;

    let mut manifest = RunManifest::new(
        "embed-stub",
        json!({ "dim": args.dim, "seed": args.seed, "rows": matrix.n() }),
    );
    manifest.input("texts", &args.input)?;
    manifest.output("embeddings", &args.out)?;
    manifest.write_beside(&args.out)?;

    println!("embedded {} texts at dimension {}", matrix.n(), args.dim);
    Ok(())
}
