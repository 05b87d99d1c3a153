//! Inverted-file index: k-means coarse quantizer plus per-cluster id lists.
//!
//! Build and search are deterministic for a fixed seed: k-means runs a
//! fixed number of Lloyd iterations from a seeded sample of rows, means
//! are accumulated serially in f64, and empty clusters are re-seeded from
//! the points farthest from their assigned centroid (ties to the lower
//! row id). Search probes the `nprobe` nearest centroids by squared L2,
//! the same metric assignment uses, then ranks candidates by exact dot
//! product with the tie rules of exact search. With `nprobe` equal to the
//! cluster count the candidate set is the whole corpus, so results match
//! exact search term for term.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::retrieval::exact::{top_k_by_dot, RetrievalResult};
use crate::retrieval::store::EmbeddingMatrix;

const KMEANS_ITERATIONS: usize = 25;
const MAGIC: &[u8; 4] = b"SKPI";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct IvfIndex {
    dim: usize,
    /// Flat `n_clusters * dim` centroid matrix.
    centroids: Vec<f32>,
    /// Row ids per cluster, ascending within each list.
    lists: Vec<Vec<u64>>,
}

impl IvfIndex {
    pub fn n_clusters(&self) -> usize {
        self.lists.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lists(&self) -> &[Vec<u64>] {
        &self.lists
    }

    fn centroid(&self, c: usize) -> &[f32] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }
}

/// Squared L2 distance.
fn dist2(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid, ties to the lower cluster id.
fn nearest_centroid(point: &[f32], centroids: &[f32], dim: usize) -> (usize, f32) {
    let mut best = (0, f32::INFINITY);
    for (c, centroid) in centroids.chunks(dim).enumerate() {
        let d = dist2(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(corpus: &EmbeddingMatrix, centroids: &[f32]) -> Vec<(usize, f32)> {
    (0..corpus.n())
        .into_par_iter()
        .map(|i| nearest_centroid(corpus.row(i), centroids, corpus.dim()))
        .collect()
}

/// Cluster the corpus and build the inverted lists.
pub fn build_ivf(corpus: &EmbeddingMatrix, n_clusters: usize, seed: u64) -> Result<IvfIndex> {
    if n_clusters == 0 || n_clusters > corpus.n() {
        return Err(Error::Argument(format!(
            "cluster count {n_clusters} outside 1..={}",
            corpus.n()
        )));
    }
    let dim = corpus.dim();

    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut centroids = Vec::with_capacity(n_clusters * dim);
    for i in rand::seq::index::sample(&mut rng, corpus.n(), n_clusters) {
        centroids.extend_from_slice(corpus.row(i));
    }

    for _ in 0..KMEANS_ITERATIONS {
        let assignment = assign(corpus, &centroids);

        let mut sums = vec![0.0f64; n_clusters * dim];
        let mut counts = vec![0u64; n_clusters];
        for (i, (c, _)) in assignment.iter().enumerate() {
            counts[*c] += 1;
            let sum = &mut sums[c * dim..(c + 1) * dim];
            for (s, v) in sum.iter_mut().zip(corpus.row(i)) {
                *s += f64::from(*v);
            }
        }

        // Farthest-point pool for re-seeding empty clusters.
        let mut by_distance: Vec<usize> = (0..corpus.n()).collect();
        by_distance.sort_by(|a, b| {
            assignment[*b].1.total_cmp(&assignment[*a].1).then_with(|| a.cmp(b))
        });
        let mut next_far = by_distance.into_iter();

        for c in 0..n_clusters {
            let centroid = &mut centroids[c * dim..(c + 1) * dim];
            if counts[c] == 0 {
                centroid.copy_from_slice(corpus.row(next_far.next().unwrap()));
            } else {
                let sum = &sums[c * dim..(c + 1) * dim];
                for (out, s) in centroid.iter_mut().zip(sum) {
                    *out = (*s / counts[c] as f64) as f32;
                }
            }
        }
    }

    let mut lists = vec![Vec::new(); n_clusters];
    for (i, (c, _)) in assign(corpus, &centroids).iter().enumerate() {
        lists[*c].push(i as u64);
    }
    Ok(IvfIndex { dim, centroids, lists })
}

/// Probe the `nprobe` nearest clusters and rank their members exactly.
pub fn search_ivf(
    index: &IvfIndex,
    corpus: &EmbeddingMatrix,
    queries: &EmbeddingMatrix,
    k: usize,
    nprobe: usize,
) -> Result<Vec<RetrievalResult>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if nprobe == 0 || nprobe > index.n_clusters() {
        return Err(Error::Argument(format!(
            "nprobe {nprobe} outside 1..={}",
            index.n_clusters()
        )));
    }
    if queries.dim() != index.dim || corpus.dim() != index.dim {
        return Err(Error::Argument(format!(
            "index dimension {} does not match corpus {} / queries {}",
            index.dim,
            corpus.dim(),
            queries.dim()
        )));
    }
    if let Some(bad) = index.lists.iter().flatten().find(|id| **id >= corpus.n() as u64) {
        return Err(Error::Data(format!(
            "index names row {bad} but the corpus holds {} rows",
            corpus.n()
        )));
    }

    Ok((0..queries.n())
        .into_par_iter()
        .map(|q| {
            let query = queries.row(q);
            let mut ranked: Vec<(usize, f32)> = (0..index.n_clusters())
                .map(|c| (c, dist2(query, index.centroid(c))))
                .collect();
            ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            let candidates = ranked[..nprobe]
                .iter()
                .flat_map(|(c, _)| index.lists[*c].iter().copied());
            RetrievalResult { query_id: q as u64, hits: top_k_by_dot(query, corpus, candidates, k) }
        })
        .collect())
}

pub fn save_index(path: &Path, index: &IvfIndex) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(index.n_clusters() as u32).to_le_bytes())?;
    w.write_all(&(index.dim as u32).to_le_bytes())?;
    for v in &index.centroids {
        w.write_all(&v.to_le_bytes())?;
    }
    for list in &index.lists {
        w.write_all(&(list.len() as u64).to_le_bytes())?;
        for id in list {
            w.write_all(&id.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<IvfIndex> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let mut r = ByteReader { bytes: &bytes, offset: 0 };

    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format { offset: 0, message: "bad magic, not an index file".into() });
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {version}") });
    }
    let n_clusters = r.u32("cluster count")? as usize;
    let dim = r.u32("dimension")? as usize;
    if n_clusters == 0 || dim == 0 {
        return Err(Error::Format {
            offset: 8,
            message: format!("degenerate shape: {n_clusters} clusters, dimension {dim}"),
        });
    }
    let mut centroids = Vec::with_capacity(n_clusters * dim);
    for _ in 0..n_clusters * dim {
        let at = r.offset as u64;
        let v = r.f32("centroid value")?;
        if !v.is_finite() {
            return Err(Error::Format { offset: at, message: "non-finite centroid value".into() });
        }
        centroids.push(v);
    }
    let mut lists = Vec::with_capacity(n_clusters);
    for _ in 0..n_clusters {
        let len = r.u64("list length")? as usize;
        let mut list = Vec::with_capacity(len.min(1 << 20));
        for _ in 0..len {
            list.push(r.u64("row id")?);
        }
        lists.push(list);
    }
    if r.offset != bytes.len() {
        return Err(Error::Format {
            offset: r.offset as u64,
            message: format!("{} trailing bytes", bytes.len() - r.offset),
        });
    }
    Ok(IvfIndex { dim, centroids, lists })
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + len > self.bytes.len() {
            return Err(Error::Format {
                offset: self.bytes.len() as u64,
                message: format!("file truncated reading {what}"),
            });
        }
        let out = &self.bytes[self.offset..self.offset + len];
        self.offset += len;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}
