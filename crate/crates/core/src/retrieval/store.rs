//! Binary embedding storage.
//!
//! File layout: magic `SKPE`, version `u32`, row count `u64`, dimension
//! `u32` (all little-endian, 20 header bytes), then `n * dim` `f32`
//! values row-major. Load of a save is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SKPE";
const VERSION: u32 = 1;
const HEADER_LEN: u64 = 20;

/// Row-major dense matrix of finite `f32` values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    dim: usize,
    values: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(n: usize, dim: usize, values: Vec<f32>) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Argument(format!("degenerate matrix shape {n}x{dim}")));
        }
        if values.len() != n * dim {
            return Err(Error::Argument(format!(
                "{} values cannot fill a {n}x{dim} matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("matrix contains a non-finite value".into()));
        }
        Ok(EmbeddingMatrix { n, dim, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks(self.dim)
    }
}

pub fn save_embeddings(path: &Path, m: &EmbeddingMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(m.n as u64).to_le_bytes())?;
    let dim = u32::try_from(m.dim)
        .map_err(|_| Error::Argument(format!("dimension {} exceeds u32", m.dim)))?;
    w.write_all(&dim.to_le_bytes())?;
    for v in &m.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let mut r = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 4];
    read_at(&mut r, &mut magic, 0, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format { offset: 0, message: "bad magic, not an embedding file".into() });
    }
    let mut word = [0u8; 4];
    read_at(&mut r, &mut word, 4, "version")?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {version}") });
    }
    let mut long = [0u8; 8];
    read_at(&mut r, &mut long, 8, "row count")?;
    let n = u64::from_le_bytes(long);
    read_at(&mut r, &mut word, 16, "dimension")?;
    let dim = u32::from_le_bytes(word);
    if n == 0 || dim == 0 {
        return Err(Error::Format { offset: 8, message: format!("degenerate shape {n}x{dim}") });
    }

    let expected = n
        .checked_mul(u64::from(dim))
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Format { offset: 8, message: "shape overflows".into() })?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if (payload.len() as u64) != expected {
        return Err(Error::Format {
            offset: HEADER_LEN + payload.len().min(expected as usize) as u64,
            message: format!(
                "payload holds {} bytes, header promises {expected}",
                payload.len()
            ),
        });
    }
    let values: Vec<f32> =
        payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    EmbeddingMatrix::new(n as usize, dim as usize, values)
        .map_err(|e| Error::Format { offset: HEADER_LEN, message: e.to_string() })
}

fn read_at(r: &mut impl Read, buf: &mut [u8], offset: u64, what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|_| Error::Format {
        offset,
        message: format!("file truncated reading {what}"),
    })
}
