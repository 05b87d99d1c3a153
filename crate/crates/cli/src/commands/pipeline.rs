use std::path::{Path, PathBuf};

use serde_json::json;

use skp_core::ingest::ParsePolicy;
use skp_core::loss::{infonce_loss, NegativeSource};
use skp_core::pretrain::{derive_seed, KcdPair};
use skp_core::retrieval::stub_embed;
use skp_core::Result;

use super::{ablate, embed, eval, gen_pretrain, index, linearize, search};
use crate::config::PipelineConfig;
use crate::manifest::RunManifest;

// Stage seed streams derived from the one master seed.
const STREAM_ABLATE: u64 = 1;
const STREAM_PRETRAIN: u64 = 2;
const STREAM_EMBED_PASSAGES: u64 = 3;
const STREAM_EMBED_QUESTIONS: u64 = 4;
const STREAM_INDEX: u64 = 5;
const STREAM_EMBED_KCD: u64 = 6;

#[derive(clap::Args)]
pub struct Args {
    /// Pipeline config JSON
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's output directory
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Override the config's master seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Override the search backend: exact or ivf
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub drop_fraction: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

pub fn run(args: &Args) -> Result<()> {
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(v) = &args.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.budget {
        cfg.budget = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = &args.backend {
        cfg.backend = v.clone();
    }
    if let Some(v) = args.drop_fraction {
        cfg.drop_fraction = v;
    }
    if let Some(v) = args.tau {
        cfg.tau = v;
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let out = |name: &str| cfg.out_dir.join(name);
    let dump = cfg.dump.clone().expect("validated");
    let mut artifacts: Vec<(&'static str, PathBuf)> = Vec::new();

    // Optional fact ablation, then linearization.
    let linearize_input = if cfg.drop_fraction > 0.0 {
        let ablated = out("ablated.nt");
        ablate::run(&ablate::Args {
            input: dump.clone(),
            out: ablated.clone(),
            fraction: cfg.drop_fraction,
            seed: derive_seed(cfg.seed, STREAM_ABLATE),
            parse_policy: ParsePolicy::SkipAndCount,
        })?;
        artifacts.push(("ablated_dump", ablated.clone()));
        ablated
    } else {
        dump.clone()
    };

    let corpus = out("corpus.jsonl");
    let stats = out("stats.json");
    linearize::run(&linearize::Args {
        input: linearize_input,
        out: corpus.clone(),
        budget: cfg.budget,
        tokenizer: cfg.tokenizer.clone(),
        vocab: cfg.vocab.clone(),
        names: cfg.name_map.clone(),
        cvt_list: cfg.cvt_list.clone(),
        parse_policy: ParsePolicy::SkipAndCount,
        stats: Some(stats.clone()),
    })?;
    artifacts.push(("corpus", corpus.clone()));
    artifacts.push(("stats", stats));

    // Pre-training data.
    let km = out("km.jsonl");
    let kcd = out("kcd.jsonl");
    let batches = out("batches.json");
    gen_pretrain::run(&gen_pretrain::Args {
        corpus: corpus.clone(),
        out_km: km.clone(),
        out_kcd: kcd.clone(),
        batches: Some(batches.clone()),
        seed: derive_seed(cfg.seed, STREAM_PRETRAIN),
        batch_size: cfg.batch_size,
        sample_count: cfg.sample_count,
        tokenizer: cfg.tokenizer.clone(),
        vocab: cfg.vocab.clone(),
    })?;
    artifacts.push(("km", km));
    artifacts.push(("kcd", kcd.clone()));
    artifacts.push(("batches", batches));

    // Contrastive loss over stub embeddings of the generated pairs.
    let loss_path = kcd_loss(&cfg, &kcd, &out("loss.json"))?;
    artifacts.push(("loss", loss_path));

    // Embeddings, optional index, search, metrics.
    let passages_emb = out("passages.skpe");
    embed::run(&embed::Args {
        input: corpus.clone(),
        out: passages_emb.clone(),
        format: embed::InputFormat::Passages,
        dim: cfg.embed_dim,
        seed: derive_seed(cfg.seed, STREAM_EMBED_PASSAGES),
    })?;
    artifacts.push(("passage_embeddings", passages_emb.clone()));

    let index_path = if cfg.backend == "ivf" {
        let path = out("index.skpi");
        index::run(&index::Args {
            embeddings: passages_emb.clone(),
            out: path.clone(),
            clusters: cfg.n_clusters,
            seed: derive_seed(cfg.seed, STREAM_INDEX),
        })?;
        artifacts.push(("index", path.clone()));
        Some(path)
    } else {
        None
    };

    if let Some(questions) = &cfg.questions {
        let questions_emb = out("questions.skpe");
        embed::run(&embed::Args {
            input: questions.clone(),
            out: questions_emb.clone(),
            format: embed::InputFormat::Questions,
            dim: cfg.embed_dim,
            seed: derive_seed(cfg.seed, STREAM_EMBED_QUESTIONS),
        })?;
        artifacts.push(("question_embeddings", questions_emb.clone()));

        let results = out("results.jsonl");
        search::run(&search::Args {
            corpus: passages_emb.clone(),
            queries: questions_emb,
            out: results.clone(),
            k: cfg.k,
            backend: cfg.backend.clone(),
            index: index_path,
            nprobe: cfg.nprobe,
        })?;
        artifacts.push(("results", results.clone()));

        if let Some(gold) = &cfg.gold {
            let report = out("report.json");
            eval::run(&eval::Args {
                results,
                corpus: corpus.clone(),
                gold: gold.clone(),
                predictions: None,
                ks: cfg.ks.clone(),
                out: report.clone(),
            })?;
            artifacts.push(("report", report));
        }
    }

    let mut manifest = RunManifest::new(
        "pipeline",
        json!({
            "config": cfg,
            "seeds": {
                "ablate": derive_seed(cfg.seed, STREAM_ABLATE),
                "pretrain": derive_seed(cfg.seed, STREAM_PRETRAIN),
                "embed_passages": derive_seed(cfg.seed, STREAM_EMBED_PASSAGES),
                "embed_questions": derive_seed(cfg.seed, STREAM_EMBED_QUESTIONS),
                "index": derive_seed(cfg.seed, STREAM_INDEX),
                "embed_kcd": derive_seed(cfg.seed, STREAM_EMBED_KCD),
            },
        }),
    );
    manifest.input("config", &args.config)?;
    manifest.input("dump", &dump)?;
    manifest.input_opt("name_map", cfg.name_map.as_deref())?;
    manifest.input_opt("cvt_list", cfg.cvt_list.as_deref())?;
    manifest.input_opt("vocab", cfg.vocab.as_deref())?;
    manifest.input_opt("questions", cfg.questions.as_deref())?;
    manifest.input_opt("gold", cfg.gold.as_deref())?;
    for (role, path) in &artifacts {
        manifest.output(role, path)?;
    }
    manifest.write_to(&cfg.out_dir.join("manifest.json"))?;

    println!("pipeline complete: {}", cfg.out_dir.display());
    Ok(())
}

/// Embeds the contrastive pairs with the stub embedder and reports the
/// batch-level contrastive loss. Needs at least two pairs for in-batch
/// negatives; with fewer the report records the pair count only.
fn kcd_loss(cfg: &PipelineConfig, kcd_path: &Path, out: &Path) -> Result<PathBuf> {
    let pairs: Vec<KcdPair> = crate::read_jsonl(kcd_path)?;
    let report = if pairs.len() < 2 {
        json!({ "pairs": pairs.len(), "tau": cfg.tau, "variant": cfg.loss_variant })
    } else {
        let originals: Vec<String> = pairs.iter().map(|p| p.original.clone()).collect();
        let positives: Vec<String> = pairs.iter().map(|p| p.positive.clone()).collect();
        let seed = derive_seed(cfg.seed, STREAM_EMBED_KCD);
        let l_c = infonce_loss(
            &to_f64(&stub_embed(&originals, cfg.embed_dim, seed)?),
            &to_f64(&stub_embed(&positives, cfg.embed_dim, seed)?),
            cfg.tau,
            cfg.loss_variant,
            NegativeSource::Positives,
        )?;
        json!({ "pairs": pairs.len(), "tau": cfg.tau, "variant": cfg.loss_variant, "l_c": l_c })
    };
    crate::write_json(out, &report)?;
    println!("contrastive loss over {} stub-embedded pairs", pairs.len());
    Ok(out.to_path_buf())
}

fn to_f64(matrix: &skp_core::retrieval::EmbeddingMatrix) -> Vec<Vec<f64>> {
    matrix.rows().map(|row| row.iter().map(|v| f64::from(*v)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_seed_streams_are_distinct() {
        let seeds: std::collections::BTreeSet<u64> = [
            STREAM_ABLATE,
            STREAM_PRETRAIN,
            STREAM_EMBED_PASSAGES,
            STREAM_EMBED_QUESTIONS,
            STREAM_INDEX,
            STREAM_EMBED_KCD,
        ]
        .iter()
        .map(|s| derive_seed(0, *s))
        .collect();
        assert_eq!(seeds.len(), 6);
    }
}
