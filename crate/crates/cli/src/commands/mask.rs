use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use skp_core::mask::{build_mask, build_mask_with_types, SegmentLayout};
use skp_core::{Error, Result};

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Layout JSON: {"question_len": n, "passage_lens": [...], "types": [...]?}
    #[arg(long)]
    pub layout: PathBuf,
    /// Mask JSON path; defaults to the layout with a .mask.json suffix
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Let same-type passages see each other (requires "types")
    #[arg(long)]
    pub same_type_visible: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaskInput {
    question_len: usize,
    passage_lens: Vec<usize>,
    types: Option<Vec<String>>,
}

#[derive(Serialize)]
struct MaskOutput {
    n: usize,
    zero_count: u64,
    rows: Vec<Vec<u8>>,
}

pub fn run(args: &Args) -> Result<()> {
    let text = std::fs::read_to_string(&args.layout)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.layout.display())))?;
    let input: MaskInput = serde_json::from_str(&text)
        .map_err(|e| Error::Data(format!("bad layout {}: {e}", args.layout.display())))?;
    let layout =
        SegmentLayout { question_len: input.question_len, passage_lens: input.passage_lens };

    let mask = match &input.types {
        Some(types) => build_mask_with_types(&layout, types, args.same_type_visible)?,
        None if args.same_type_visible => {
            return Err(Error::Argument(
                "--same-type-visible requires a `types` list in the layout".into(),
            ))
        }
        None => build_mask(&layout)?,
    };
    let output = MaskOutput { n: mask.n(), zero_count: mask.zero_count(), rows: mask.dense() };

    let out = args.out.clone().unwrap_or_else(|| args.layout.with_extension("mask.json"));
    crate::write_json(&out, &output)?;

    let mut manifest = RunManifest::new(
        "mask",
        json!({
            "question_len": layout.question_len,
            "passages": layout.passage_lens.len(),
            "same_type_visible": args.same_type_visible,
        }),
    );
    manifest.input("layout", &args.layout)?;
    manifest.output("mask", &out)?;
    manifest.write_beside(&out)?;

    println!("built {0}x{0} mask with {1} zeros", output.n, output.zero_count);
    Ok(())
}
