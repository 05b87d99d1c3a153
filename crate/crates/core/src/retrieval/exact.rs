//! Exact dot-product top-k search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retrieval::store::EmbeddingMatrix;

pub const DEFAULT_K: usize = 100;

/// Top-k hits for one query, scores descending, ties broken by lower id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub query_id: u64,
    pub hits: Vec<(u64, f32)>,
}

pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Heap entry ordered by "badness": the heap's max is the weakest hit.
#[derive(PartialEq, Eq)]
struct Candidate {
    id: u64,
    score_bits: u32,
}

impl Candidate {
    fn new(id: u64, score: f32) -> Self {
        Candidate { id, score_bits: score.to_bits() }
    }

    fn score(&self) -> f32 {
        f32::from_bits(self.score_bits)
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score()
            .total_cmp(&self.score())
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rank `ids` by dot product against `query` and keep the best `k`.
pub(crate) fn top_k_by_dot(
    query: &[f32],
    corpus: &EmbeddingMatrix,
    ids: impl Iterator<Item = u64>,
    k: usize,
) -> Vec<(u64, f32)> {
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
    for id in ids {
        let cand = Candidate::new(id, dot(query, corpus.row(id as usize)));
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().unwrap() {
            heap.pop();
            heap.push(cand);
        }
    }
    let mut hits: Vec<(u64, f32)> = heap.into_iter().map(|c| (c.id, c.score())).collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    hits
}

/// Score every corpus row against every query.
pub fn search_exact(
    corpus: &EmbeddingMatrix,
    queries: &EmbeddingMatrix,
    k: usize,
) -> Result<Vec<RetrievalResult>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if corpus.dim() != queries.dim() {
        return Err(Error::Argument(format!(
            "corpus dimension {} does not match query dimension {}",
            corpus.dim(),
            queries.dim()
        )));
    }
    Ok((0..queries.n())
        .into_par_iter()
        .map(|q| RetrievalResult {
            query_id: q as u64,
            hits: top_k_by_dot(queries.row(q), corpus, 0..corpus.n() as u64, k),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn matrix(rows: &[&[f32]]) -> EmbeddingMatrix {
        let dim = rows[0].len();
        let values: Vec<f32> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingMatrix::new(rows.len(), dim, values).unwrap()
    }

    fn random_matrix(rng: &mut StdRng, n: usize, dim: usize) -> EmbeddingMatrix {
        let values: Vec<f32> = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        EmbeddingMatrix::new(n, dim, values).unwrap()
    }

    /// Reference ranking: score everything, sort fully.
    fn full_sort(corpus: &EmbeddingMatrix, query: &[f32], k: usize) -> Vec<(u64, f32)> {
        let mut all: Vec<(u64, f32)> =
            (0..corpus.n()).map(|i| (i as u64, dot(query, corpus.row(i)))).collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    #[test]
    fn picks_the_aligned_basis_vector() {
        let corpus = matrix(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]]);
        let queries = matrix(&[&[0.9, 0.1]]);
        let out = search_exact(&corpus, &queries, 2).unwrap();
        assert_eq!(out[0].query_id, 0);
        assert_eq!(out[0].hits[0].0, 0);
        assert_eq!(out[0].hits[1].0, 1);
    }

    #[test]
    fn score_ties_prefer_the_lower_id() {
        let corpus = matrix(&[&[0.5, 0.5], &[1.0, 0.0], &[0.5, 0.5]]);
        let queries = matrix(&[&[0.0, 1.0]]);
        let out = search_exact(&corpus, &queries, 3).unwrap();
        let ids: Vec<u64> = out[0].hits.iter().map(|h| h.0).collect();
        assert_eq!(ids, vec![0, 2, 1]);
    }

    #[test]
    fn matches_a_full_sort_on_random_data() {
        let mut rng = StdRng::seed_from_u64(11);
        let corpus = random_matrix(&mut rng, 500, 16);
        let queries = random_matrix(&mut rng, 20, 16);
        for k in [1, 7, 100, 500] {
            let out = search_exact(&corpus, &queries, k).unwrap();
            for (q, result) in out.iter().enumerate() {
                assert_eq!(result.hits, full_sort(&corpus, queries.row(q), k));
            }
        }
    }

    #[test]
    fn k_beyond_corpus_returns_every_row() {
        let corpus = matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let queries = matrix(&[&[1.0, 1.0]]);
        let out = search_exact(&corpus, &queries, 10).unwrap();
        assert_eq!(out[0].hits.len(), 2);
    }

    #[test]
    fn rejects_mismatched_dimensions_and_zero_k() {
        let corpus = matrix(&[&[1.0, 0.0]]);
        let wide = matrix(&[&[1.0, 0.0, 0.0]]);
        assert!(matches!(search_exact(&corpus, &wide, 1), Err(Error::Argument(_))));
        assert!(matches!(search_exact(&corpus, &corpus, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn a_strictly_better_row_displaces_the_kth_hit() {
        let mut rng = StdRng::seed_from_u64(5);
        let corpus = random_matrix(&mut rng, 50, 8);
        let queries = random_matrix(&mut rng, 1, 8);
        let k = 5;
        let before = search_exact(&corpus, &queries, k).unwrap()[0].hits.clone();
        let kth = before[k - 1];

        let mut values = corpus.values().to_vec();
        let boosted: Vec<f32> = queries.row(0).iter().map(|v| v * 10.0).collect();
        values.extend_from_slice(&boosted);
        let bigger = EmbeddingMatrix::new(51, 8, values).unwrap();
        let after = search_exact(&bigger, &queries, k).unwrap()[0].hits.clone();
        assert!(after.iter().any(|h| h.0 == 50));
        assert!(!after.contains(&kth));
    }
}
