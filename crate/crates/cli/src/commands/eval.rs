use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use skp_core::eval::{
    answer_hits_at_1, load_gold, load_predictions, retrieval_report, Hits1Report,
};
use skp_core::linearize::read_corpus;
use skp_core::retrieval::RetrievalResult;
use skp_core::Result;

use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    /// Retrieval results JSONL
    #[arg(long)]
    pub results: PathBuf,
    /// Passage corpus JSONL the result ids point into
    #[arg(long)]
    pub corpus: PathBuf,
    /// Gold answers JSONL {question_id, answers}
    #[arg(long)]
    pub gold: PathBuf,
    /// Predicted answers JSONL {question_id, answer}; adds answer Hits@1
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Hits@k cutoffs
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 10, 20, 50, 100])]
    pub ks: Vec<usize>,
    /// Metric report to write
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct EvalOutput {
    criterion: &'static str,
    hits_at: BTreeMap<u64, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    answer_hits_at_1: Option<Hits1Report>,
}

pub fn run(args: &Args) -> Result<()> {
    let results: Vec<RetrievalResult> = crate::read_jsonl(&args.results)?;
    let passages = read_corpus(&args.corpus)?;
    let gold = load_gold(&args.gold)?;

    let report = retrieval_report(&results, &passages, &gold, &args.ks)?;
    let answer = match &args.predictions {
        Some(path) => {
            let predictions = load_predictions(path)?;
            let answer = answer_hits_at_1(&predictions, &gold)?;
            for q in &answer.missing {
                eprintln!("skp: warning: no prediction for question `{q}`, counted as miss");
            }
            Some(answer)
        }
        None => None,
    };
    let output = EvalOutput {
        criterion: report.criterion,
        hits_at: report.hits_at,
        answer_hits_at_1: answer,
    };
    crate::write_json(&args.out, &output)?;

    let mut manifest = RunManifest::new("eval", json!({ "ks": args.ks }));
    manifest.input("results", &args.results)?;
    manifest.input("corpus", &args.corpus)?;
    manifest.input("gold", &args.gold)?;
    manifest.input_opt("predictions", args.predictions.as_deref())?;
    manifest.output("report", &args.out)?;
    manifest.write_beside(&args.out)?;

    let line: Vec<String> =
        output.hits_at.iter().map(|(k, v)| format!("hits@{k} = {v:.4}")).collect();
    println!("{}", line.join(", "));
    if let Some(answer) = &output.answer_hits_at_1 {
        println!("answer hits@1 = {:.4}", answer.hits_at_1);
    }
    Ok(())
}
