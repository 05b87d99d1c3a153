//! Deterministic stand-in embedder.
//!
//! Each row depends only on `(seed, text)`: the pair is hashed, the hash
//! seeds a per-row RNG, and the sampled Gaussian vector is L2-normalized.
//! Equal texts map to equal rows; row order follows input order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::retrieval::store::EmbeddingMatrix;

/// Embed `texts` into unit vectors of the given dimension.
pub fn stub_embed<S: AsRef<str> + Sync>(
    texts: &[S],
    dim: usize,
    seed: u64,
) -> Result<EmbeddingMatrix> {
    if dim < 2 {
        return Err(Error::Argument(format!("embedding dimension {dim} is below 2")));
    }
    if texts.is_empty() {
        return Err(Error::Argument("no texts to embed".into()));
    }
    let values: Vec<f32> =
        texts.par_iter().flat_map_iter(|t| embed_one(t.as_ref(), dim, seed)).collect();
    EmbeddingMatrix::new(texts.len(), dim, values)
}

fn embed_one(text: &str, dim: usize, seed: u64) -> Vec<f32> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(text.as_bytes());
    let mut rng = ChaCha8Rng::from_seed(hasher.finalize().into());
    let raw: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < f64::MIN_POSITIVE {
        // Unreachable in practice; keeps the unit-norm contract total.
        let mut row = vec![0.0; dim];
        row[0] = 1.0;
        return row;
    }
    raw.iter().map(|v| (v / norm) as f32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_unit_norm() {
        let m = stub_embed(&["a", "bb", "ccc"], 64, 7).unwrap();
        for row in m.rows() {
            let norm = row.iter().map(|v| f64::from(*v) * f64::from(*v)).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
        }
    }

    #[test]
    fn same_text_and_seed_give_the_same_row() {
        let a = stub_embed(&["obama born in hawaii"], 32, 3).unwrap();
        let b = stub_embed(&["x", "obama born in hawaii"], 32, 3).unwrap();
        assert_eq!(a.row(0), b.row(1));
    }

    #[test]
    fn seed_changes_the_row() {
        let a = stub_embed(&["obama born in hawaii"], 32, 3).unwrap();
        let b = stub_embed(&["obama born in hawaii"], 32, 4).unwrap();
        assert_ne!(a.row(0), b.row(0));
    }

    #[test]
    fn distinct_texts_give_distinct_rows() {
        let texts: Vec<String> = (0..1000).map(|i| format!("passage number {i}")).collect();
        let m = stub_embed(&texts, 64, 0).unwrap();
        for i in 0..m.n() {
            for j in i + 1..m.n() {
                assert_ne!(m.row(i), m.row(j), "rows {i} and {j} collide");
            }
        }
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(matches!(stub_embed(&["a"], 1, 0), Err(Error::Argument(_))));
        let none: &[&str] = &[];
        assert!(matches!(stub_embed(none, 8, 0), Err(Error::Argument(_))));
    }
}
