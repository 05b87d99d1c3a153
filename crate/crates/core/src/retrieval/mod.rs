//! Embedding storage and dense top-k retrieval.
//!
//! Two interchangeable backends live behind the [`SearchBackend`] trait and
//! are selected by name via [`create_backend`]: `exact` (scores every corpus
//! row) and `ivf` (probes an inverted-file index built by [`build_ivf`]).
//! Both rank by dot product and break score ties toward the lower row id,
//! so an `ivf` backend probing every cluster reproduces `exact` output.

mod exact;
mod ivf;
mod store;
mod stub;

use std::path::Path;

pub use exact::{search_exact, RetrievalResult, DEFAULT_K};
pub use ivf::{build_ivf, load_index, save_index, search_ivf, IvfIndex};
pub use store::{load_embeddings, save_embeddings, EmbeddingMatrix};
pub use stub::stub_embed;

use crate::error::{Error, Result};

/// A retrieval strategy over a fixed corpus matrix.
pub trait SearchBackend: Send + Sync {
    /// Registry name, e.g. `"exact"`.
    fn name(&self) -> &'static str;

    fn search(
        &self,
        corpus: &EmbeddingMatrix,
        queries: &EmbeddingMatrix,
        k: usize,
    ) -> Result<Vec<RetrievalResult>>;
}

/// Brute-force scan of the whole corpus.
pub struct ExactBackend;

impl SearchBackend for ExactBackend {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn search(
        &self,
        corpus: &EmbeddingMatrix,
        queries: &EmbeddingMatrix,
        k: usize,
    ) -> Result<Vec<RetrievalResult>> {
        search_exact(corpus, queries, k)
    }
}

/// Inverted-file probe search over a prebuilt index.
pub struct IvfBackend {
    index: IvfIndex,
    nprobe: usize,
}

impl IvfBackend {
    pub fn new(index: IvfIndex, nprobe: usize) -> Self {
        IvfBackend { index, nprobe }
    }
}

impl SearchBackend for IvfBackend {
    fn name(&self) -> &'static str {
        "ivf"
    }

    fn search(
        &self,
        corpus: &EmbeddingMatrix,
        queries: &EmbeddingMatrix,
        k: usize,
    ) -> Result<Vec<RetrievalResult>> {
        search_ivf(&self.index, corpus, queries, k, self.nprobe)
    }
}

/// Names accepted by [`create_backend`].
pub const BACKENDS: &[&str] = &["exact", "ivf"];

/// Instantiates a backend by registry name.
///
/// `ivf` requires a saved index file; passing one to `exact` is accepted
/// and ignored.
pub fn create_backend(
    name: &str,
    index: Option<&Path>,
    nprobe: usize,
) -> Result<Box<dyn SearchBackend>> {
    match name {
        "exact" => Ok(Box::new(ExactBackend)),
        "ivf" => {
            let path = index
                .ok_or_else(|| Error::Config("ivf backend requires an index file".into()))?;
            Ok(Box::new(IvfBackend::new(load_index(path)?, nprobe)))
        }
        other => Err(Error::Config(format!(
            "unknown search backend `{other}` (expected one of {BACKENDS:?})"
        ))),
    }
}
