use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::PathBuf;

use serde_json::json;

use skp_core::ingest::{open_ntriples, parse_ntriples_line, ParsePolicy};
use skp_core::linearize::ablate_kb;
use skp_core::Result;

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// N-Triples dump, plain or gzipped
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Subsampled dump to write (always plain text)
    #[arg(long)]
    pub out: PathBuf,
    /// Fraction of facts to drop, in [0, 1]
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Malformed line handling: skip or abort
    #[arg(long, default_value = "skip")]
    pub parse_policy: ParsePolicy,
}

/// Subsamples at the line level so surviving facts keep their original
/// spelling; blank lines and comments are not facts and are dropped.
pub fn run(args: &Args) -> Result<()> {
    let mut facts: Vec<String> = Vec::new();
    let mut skipped = 0u64;
    for (no, line) in open_ntriples(&args.input)?.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_ntriples_line(trimmed, no as u64 + 1) {
            Ok(_) => facts.push(line),
            Err(e) => match args.parse_policy {
                ParsePolicy::SkipAndCount => skipped += 1,
                ParsePolicy::Abort => return Err(e),
            },
        }
    }
    let total = facts.len();
    let kept = ablate_kb(&facts, args.fraction, args.seed)?;

    let mut w = BufWriter::new(File::create(&args.out)?);
    for line in &kept {
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let mut manifest = RunManifest::new(
        "ablate",
        json!({
            "fraction": args.fraction,
            "seed": args.seed,
            "parse_policy": args.parse_policy,
            "facts_in": total,
            "facts_kept": kept.len(),
            "lines_skipped": skipped,
        }),
    );
    manifest.input("dump", &args.input)?;
    manifest.output("dump", &args.out)?;
    manifest.write_beside(&args.out)?;

    println!("kept {} of {total} facts ({skipped} malformed lines skipped)", kept.len());
    Ok(())
}
