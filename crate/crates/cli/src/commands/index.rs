use std::path::PathBuf;

use serde_json::json;

use skp_core::retrieval::{build_ivf, load_embeddings, save_index};
use skp_core::Result;

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Corpus embedding matrix
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Index file to write
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: &Args) -> Result<()> {
    let corpus = load_embeddings(&args.embeddings)?;
    let index = build_ivf(&corpus, args.clusters, args.seed)?;
    save_index(&args.out, &index)?;

    let mut manifest = RunManifest::new(
        "build-index",
        json!({ "clusters": args.clusters, "seed": args.seed, "rows": corpus.n() }),
    );
    manifest.input("embeddings", &args.embeddings)?;
    manifest.output("index", &args.out)?;
    manifest.write_beside(&args.out)?;

    println!("clustered {} rows into {} lists", corpus.n(), index.n_clusters());
    Ok(())
}
