//! Knowledge-base linearization and KBQA data preparation.
//!
//! The pipeline turns an RDF N-Triples dump into text passages a dual-encoder
//! retriever can index, and produces everything around that transformation:
//!
//! - [`ingest`] — streaming N-Triples parsing, term normalization, and
//!   compound-value-type (CVT) node detection.
//! - [`tokenize`] — whitespace and WordPiece tokenizers behind a common
//!   trait, selected by name.
//! - [`linearize`] — the six-case priority merge that folds triples sharing
//!   keys into passages under a token budget, plus CVT sentence conversion
//!   and seeded fact subsampling.
//! - [`pretrain`] — whole-component masking examples and contrastive pairs
//!   generated from the passage corpus.
//! - [`loss`] — masked-token, InfoNCE, and joint loss kernels over
//!   caller-supplied arrays.
//! - [`mask`] — block attention masks that keep distinct passages invisible
//!   to each other while everything sees the question.
//! - [`retrieval`] — embedding storage, a deterministic stub embedder, and
//!   exact / IVF dot-product top-k search behind a common trait.
//! - [`eval`] — answer Hits@1 and retrieval Hits@k.
//!
//! Every seeded operation is deterministic in its inputs and seed, and all
//! serialized outputs are byte-stable across runs and thread counts.

pub mod error;
pub mod eval;
pub mod ingest;
pub mod linearize;
pub mod loss;
pub mod mask;
pub mod pretrain;
pub mod retrieval;
pub mod tokenize;

pub use error::{Error, Result};
