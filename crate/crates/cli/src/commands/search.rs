use std::path::PathBuf;

use serde_json::json;

use skp_core::retrieval::{create_backend, load_embeddings, DEFAULT_K};
use skp_core::Result;

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Corpus embedding matrix
    #[arg(long)]
    pub corpus: PathBuf,
    /// Query embedding matrix
    #[arg(long)]
    pub queries: PathBuf,
    /// Results JSONL to write
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Search backend: exact or ivf
    #[arg(long, default_value = "exact")]
    pub backend: String,
    /// Index file, required for the ivf backend
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Clusters probed per query (ivf only)
    #[arg(long, default_value_t = 16)]
    pub nprobe: usize,
}

pub fn run(args: &Args) -> Result<()> {
    let backend = create_backend(&args.backend, args.index.as_deref(), args.nprobe)?;
    let corpus = load_embeddings(&args.corpus)?;
    let queries = load_embeddings(&args.queries)?;
    let results = backend.search(&corpus, &queries, args.k)?;
    crate::write_jsonl(&args.out, &results)?;

    let mut manifest = RunManifest::new(
        "search",
        json!({ "backend": args.backend, "k": args.k, "nprobe": args.nprobe }),
    );
    manifest.input("corpus", &args.corpus)?;
    manifest.input("queries", &args.queries)?;
    manifest.input_opt("index", args.index.as_deref())?;
    manifest.output("results", &args.out)?;
    manifest.write_beside(&args.out)?;

    println!("ranked {} queries at k = {} with the {} backend", results.len(), args.k, args.backend);
    Ok(())
}
