//! Pipeline configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use skp_core::loss::LossVariant;
use skp_core::{Error, Result};

/// JSON config for `skp pipeline`. Every field has a default except
/// `dump`; relative paths are resolved against the config file's
/// directory, so a bundled fixture works from any working directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// N-Triples dump, plain or gzipped. Required.
    pub dump: Option<PathBuf>,
    /// TSV of `node_id<TAB>display name`.
    pub name_map: Option<PathBuf>,
    /// Explicit CVT node id list; absent means the degree heuristic.
    pub cvt_list: Option<PathBuf>,
    /// WordPiece vocab, required only for `"tokenizer": "wordpiece"`.
    pub vocab: Option<PathBuf>,
    /// Questions JSONL `{question_id, text}`; enables search and eval.
    pub questions: Option<PathBuf>,
    /// Gold answers JSONL `{question_id, answers}`; enables eval.
    pub gold: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub budget: usize,
    pub tokenizer: String,
    /// Master seed; each stage derives its own stream from it.
    pub seed: u64,
    pub batch_size: usize,
    /// Passages to sample into the batch plan; absent means all.
    pub sample_count: Option<usize>,
    /// Retrieval depth.
    pub k: usize,
    /// Hits@k cutoffs for the metric report.
    pub ks: Vec<usize>,
    /// Fraction of dump facts to drop before linearization.
    pub drop_fraction: f64,
    pub loss_variant: LossVariant,
    pub tau: f64,
    pub backend: String,
    pub embed_dim: usize,
    pub n_clusters: usize,
    pub nprobe: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dump: None,
            name_map: None,
            cvt_list: None,
            vocab: None,
            questions: None,
            gold: None,
            out_dir: PathBuf::from("out"),
            budget: skp_core::linearize::DEFAULT_BUDGET,
            tokenizer: "whitespace".into(),
            seed: 0,
            batch_size: skp_core::pretrain::DEFAULT_BATCH_SIZE,
            sample_count: None,
            k: skp_core::retrieval::DEFAULT_K,
            ks: vec![1, 10, 20, 50, 100],
            drop_fraction: 0.0,
            loss_variant: LossVariant::Paper,
            tau: 0.05,
            backend: "exact".into(),
            embed_dim: 64,
            n_clusters: 256,
            nprobe: 16,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [
            &mut config.dump,
            &mut config.name_map,
            &mut config.cvt_list,
            &mut config.vocab,
            &mut config.questions,
            &mut config.gold,
        ]
        .into_iter()
        .flatten()
        {
            *p = resolve(base, p);
        }
        config.out_dir = resolve(base, &config.out_dir);
        Ok(config)
    }

    /// Checks required fields and that referenced inputs exist.
    pub fn validate(&self) -> Result<()> {
        let dump = self
            .dump
            .as_ref()
            .ok_or_else(|| Error::Config("config is missing `dump`".into()))?;
        for (role, path) in [
            ("dump", Some(dump)),
            ("name_map", self.name_map.as_ref()),
            ("cvt_list", self.cvt_list.as_ref()),
            ("vocab", self.vocab.as_ref()),
            ("questions", self.questions.as_ref()),
            ("gold", self.gold.as_ref()),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(Error::Config(format!(
                        "{role} file {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        if self.gold.is_some() && self.questions.is_none() {
            return Err(Error::Config("config has `gold` but no `questions`".into()));
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
