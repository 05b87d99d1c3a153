use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use skp_core::loss::{
    infonce_loss, joint_loss, mlm_loss, LossVariant, NegativeSource, DEFAULT_ALPHA,
};
use skp_core::{Error, Result};

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Loss input JSON (see `LossInput` fields)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report path; defaults to the input with a .loss.json suffix
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Either `masked_probs`, or `originals` plus `positives`, or both.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LossInput {
    masked_probs: Option<Vec<f64>>,
    originals: Option<Vec<Vec<f64>>>,
    positives: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_tau")]
    tau: f64,
    #[serde(default)]
    variant: LossVariant,
    #[serde(default)]
    negatives: NegativeSource,
    #[serde(default = "default_alpha")]
    alpha: f64,
}

fn default_tau() -> f64 {
    0.05
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Serialize)]
struct LossOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    l_mlm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l_joint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<LossVariant>,
}

pub fn run(args: &Args) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let input: LossInput = serde_json::from_str(&text)
        .map_err(|e| Error::Data(format!("bad loss input {}: {e}", args.input.display())))?;

    let l_mlm = input.masked_probs.as_deref().map(mlm_loss).transpose()?;
    let l_c = match (&input.originals, &input.positives) {
        (Some(originals), Some(positives)) => Some(infonce_loss(
            originals,
            positives,
            input.tau,
            input.variant,
            input.negatives,
        )?),
        (None, None) => None,
        _ => {
            return Err(Error::Argument(
                "`originals` and `positives` must be given together".into(),
            ))
        }
    };
    if l_mlm.is_none() && l_c.is_none() {
        return Err(Error::Argument(
            "loss input holds neither `masked_probs` nor embedding pairs".into(),
        ));
    }
    let joint = match (l_mlm, l_c) {
        (Some(m), Some(c)) => Some(joint_loss(m, c, input.alpha)?),
        _ => None,
    };

    let output = LossOutput {
        l_mlm,
        l_c,
        l_joint: joint.map(|j| j.l_joint),
        alpha: joint.map(|j| j.alpha),
        tau: l_c.map(|_| input.tau),
        variant: l_c.map(|_| input.variant),
    };
    let out = args.out.clone().unwrap_or_else(|| args.input.with_extension("loss.json"));
    crate::write_json(&out, &output)?;

    let mut manifest = RunManifest::new(
        "loss",
        json!({ "tau": input.tau, "alpha": input.alpha, "variant": input.variant, "negatives": input.negatives }),
    );
    manifest.input("loss_input", &args.input)?;
    manifest.output("report", &out)?;
    manifest.write_beside(&out)?;

    let parts: Vec<String> = [
        l_mlm.map(|v| format!("l_mlm = {v:.6}")),
        l_c.map(|v| format!("l_c = {v:.6}")),
        joint.map(|j| format!("l_joint = {:.6}", j.l_joint)),
    ]
    .into_iter()
    .flatten()
    .collect();
    println!("{}", parts.join(", "));
    Ok(())
}
