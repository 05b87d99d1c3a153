use std::path::PathBuf;

use serde_json::json;

use skp_core::ingest::ParsePolicy;
use skp_core::linearize::{linearize_kb, write_corpus, LinearizeOptions, DEFAULT_BUDGET};
use skp_core::Result;

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// N-Triples dump, plain or gzipped
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Passage corpus JSONL to write
    #[arg(long)]
    pub out: PathBuf,
    /// Token budget per merged passage
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Tokenizer mode: whitespace or wordpiece
    #[arg(long, default_value = "whitespace")]
    pub tokenizer: String,
    /// WordPiece vocab file
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// TSV of node id to display name
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Explicit CVT node list; default is the degree heuristic
    #[arg(long)]
    pub cvt_list: Option<PathBuf>,
    /// Malformed line handling: skip or abort
    #[arg(long, default_value = "skip")]
    pub parse_policy: ParsePolicy,
    /// Stats JSON path; defaults to the corpus path with a .stats.json suffix
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<()> {
    let (triples, parse_stats) = super::parse_dump(&args.input, args.parse_policy)?;
    let resolver = super::build_resolver(args.names.as_deref())?;
    let tokenizer = super::build_tokenizer(&args.tokenizer, args.vocab.as_deref())?;
    let opts = LinearizeOptions {
        budget: args.budget,
        tokenizer: tokenizer.as_ref(),
        resolver: &resolver,
        cvt_policy: super::cvt_policy(args.cvt_list.as_deref())?,
    };
    let (passages, stats) = linearize_kb(&triples, &opts)?;

    write_corpus(&args.out, &passages)?;
    let stats_path =
        args.stats.clone().unwrap_or_else(|| args.out.with_extension("stats.json"));
    crate::write_json(&stats_path, &json!({ "parse": parse_stats, "linearize": stats }))?;

    let mut manifest = RunManifest::new(
        "linearize",
        json!({
            "budget": args.budget,
            "tokenizer": args.tokenizer,
            "parse_policy": args.parse_policy,
            "cvt": if args.cvt_list.is_some() { "explicit" } else { "heuristic" },
        }),
    );
    manifest.input("dump", &args.input)?;
    manifest.input_opt("names", args.names.as_deref())?;
    manifest.input_opt("cvt_list", args.cvt_list.as_deref())?;
    manifest.input_opt("vocab", args.vocab.as_deref())?;
    manifest.output("corpus", &args.out)?;
    manifest.output("stats", &stats_path)?;
    manifest.write_beside(&args.out)?;

    println!(
        "linearized {} triples into {} passages ({} CVT sentences, {} duplicates removed)",
        stats.triples_linearized, stats.passages_out, stats.cvt_sentences, stats.duplicates_removed
    );
    Ok(())
}
