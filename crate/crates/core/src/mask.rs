//! Block attention masks for a question concatenated with retrieved
//! passages: everything sees the question and itself, while distinct
//! passage segments stay mutually invisible.
//!
//! The mask is stored as one equivalence class per position (question =
//! class 0), so construction is O(n) and the dense matrix materializes
//! only on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Run-length layout: question first, then each passage segment. This is
/// also the canonical serialized descriptor form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentLayout {
    pub question_len: usize,
    pub passage_lens: Vec<usize>,
}

impl SegmentLayout {
    pub fn total_len(&self) -> usize {
        self.question_len + self.passage_lens.iter().sum::<usize>()
    }

    fn validate(&self) -> Result<()> {
        if self.question_len < 1 {
            return Err(Error::Argument("question length must be at least 1".into()));
        }
        if let Some(i) = self.passage_lens.iter().position(|&l| l < 1) {
            return Err(Error::Argument(format!("passage segment {i} has length 0")));
        }
        Ok(())
    }
}

/// Symmetric visibility matrix with all-ones diagonal. `bit(i, j)` is true
/// iff either position is a question token or both lie in the same
/// visibility class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionMask {
    class: Vec<u32>,
}

impl AttentionMask {
    pub fn n(&self) -> usize {
        self.class.len()
    }

    pub fn bit(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.class[i], self.class[j]);
        a == 0 || b == 0 || a == b
    }

    /// Full 0/1 matrix, row-major.
    pub fn dense(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| u8::from(self.bit(i, j))).collect()).collect()
    }

    /// Number of zero cells, counted combinatorially: pairs of passage
    /// positions in different classes (question rows and columns hold no
    /// zeros).
    pub fn zero_count(&self) -> u64 {
        let mut sizes: std::collections::BTreeMap<u32, u64> = Default::default();
        for &c in &self.class {
            if c != 0 {
                *sizes.entry(c).or_default() += 1;
            }
        }
        let total: u64 = sizes.values().sum();
        let same: u64 = sizes.values().map(|s| s * s).sum();
        total * total - same
    }
}

/// Builds the mask with every passage segment its own visibility class.
pub fn build_mask(layout: &SegmentLayout) -> Result<AttentionMask> {
    layout.validate()?;
    let mut class = vec![0u32; layout.question_len];
    for (i, &len) in layout.passage_lens.iter().enumerate() {
        class.extend(std::iter::repeat_n(1 + i as u32, len));
    }
    Ok(AttentionMask { class })
}

/// Like [`build_mask`], but each passage carries a type label; with
/// `same_type_visible` set, same-type segments share a class and therefore
/// see each other. With it unset the labels are ignored.
pub fn build_mask_with_types(
    layout: &SegmentLayout,
    types: &[impl AsRef<str>],
    same_type_visible: bool,
) -> Result<AttentionMask> {
    if types.len() != layout.passage_lens.len() {
        return Err(Error::Argument(format!(
            "{} type labels for {} passage segments",
            types.len(),
            layout.passage_lens.len()
        )));
    }
    if !same_type_visible {
        return build_mask(layout);
    }
    layout.validate()?;
    let mut class = vec![0u32; layout.question_len];
    for (i, &len) in layout.passage_lens.iter().enumerate() {
        let rep = types.iter().position(|t| t.as_ref() == types[i].as_ref()).unwrap();
        class.extend(std::iter::repeat_n(1 + rep as u32, len));
    }
    Ok(AttentionMask { class })
}
