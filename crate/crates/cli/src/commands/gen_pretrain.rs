use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use skp_core::linearize::read_corpus;
use skp_core::pretrain::{
    derive_seed, make_kcd_pair, make_km_example, plan_batches, Batch, BatchManifest,
    DEFAULT_BATCH_SIZE,
};
use skp_core::{Error, Result};

use crate::manifest::RunManifest;

/// Seed stream for the batch plan, outside the range of passage ids.
const BATCH_STREAM: u64 = 1 << 62;

#[derive(clap::Args)]
pub struct Args {
    /// Passage corpus JSONL
    #[arg(long)]
    pub corpus: PathBuf,
    /// Masking examples JSONL to write
    #[arg(long)]
    pub out_km: PathBuf,
    /// Contrastive pairs JSONL to write
    #[arg(long)]
    pub out_kcd: PathBuf,
    /// Batch plan JSON; defaults to the km path with a .batches.json suffix
    #[arg(long)]
    pub batches: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    /// Passages to sample into the batch plan; defaults to all
    #[arg(long)]
    pub sample_count: Option<usize>,
    /// Tokenizer mode: whitespace or wordpiece
    #[arg(long, default_value = "whitespace")]
    pub tokenizer: String,
    /// WordPiece vocab file
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}

#[derive(Serialize)]
struct BatchPlanFile {
    #[serde(flatten)]
    summary: BatchManifest,
    batches: Vec<Batch>,
}

pub fn run(args: &Args) -> Result<()> {
    let passages = read_corpus(&args.corpus)?;
    if passages.is_empty() {
        return Err(Error::Data(format!("corpus {} holds no passages", args.corpus.display())));
    }
    let tokenizer = super::build_tokenizer(&args.tokenizer, args.vocab.as_deref())?;

    let km = passages
        .par_iter()
        .map(|p| make_km_example(p, tokenizer.as_ref(), derive_seed(args.seed, p.id)))
        .collect::<Result<Vec<_>>>()?;
    let kcd = passages
        .par_iter()
        .map(|p| make_kcd_pair(p, tokenizer.as_ref(), derive_seed(args.seed, p.id)))
        .collect::<Result<Vec<_>>>()?;
    crate::write_jsonl(&args.out_km, &km)?;
    crate::write_jsonl(&args.out_kcd, &kcd)?;

    let ids: Vec<u64> = passages.iter().map(|p| p.id).collect();
    let sample_count = args.sample_count.unwrap_or(ids.len());
    let (batches, summary) =
        plan_batches(&ids, args.batch_size, derive_seed(args.seed, BATCH_STREAM), sample_count)?;
    let batches_path =
        args.batches.clone().unwrap_or_else(|| args.out_km.with_extension("batches.json"));
    crate::write_json(&batches_path, &BatchPlanFile { summary, batches })?;

    let mut manifest = RunManifest::new(
        "gen-pretrain",
        json!({
            "seed": args.seed,
            "batch_size": args.batch_size,
            "sample_count": sample_count,
            "tokenizer": args.tokenizer,
        }),
    );
    manifest.input("corpus", &args.corpus)?;
    manifest.input_opt("vocab", args.vocab.as_deref())?;
    manifest.output("km", &args.out_km)?;
    manifest.output("kcd", &args.out_kcd)?;
    manifest.output("batches", &batches_path)?;
    manifest.write_beside(&args.out_km)?;

    println!(
        "generated {} masking examples and {} contrastive pairs; planned {} batches",
        km.len(),
        kcd.len(),
        summary.batches
    );
    Ok(())
}
