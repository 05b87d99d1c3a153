//! Hub-node (compound value type) detection.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{NameMap, ObjectKind, Triple};
use crate::error::{Error, Result};

/// How hub nodes are identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CvtPolicy {
    /// Trust an explicit id list; a listed node counts only if it actually
    /// appears in the triples.
    ExplicitList(BTreeSet<String>),
    /// Structural rule: object of at least one triple, subject of at least
    /// two, and absent from the name map.
    Heuristic,
}

/// Per-node subject/object degrees. Shardable: counts from disjoint triple
/// shards merge associatively and commutatively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeCounts {
    subject_of: BTreeMap<String, u64>,
    object_of: BTreeMap<String, u64>,
}

impl DegreeCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples<'a, I: IntoIterator<Item = &'a Triple>>(triples: I) -> Self {
        let mut counts = Self::new();
        for t in triples {
            counts.observe(t);
        }
        counts
    }

    /// Literal objects are values, not nodes, so they earn no object degree.
    pub fn observe(&mut self, triple: &Triple) {
        *self.subject_of.entry(triple.subject.clone()).or_insert(0) += 1;
        if triple.object_kind == ObjectKind::Entity {
            *self.object_of.entry(triple.object.clone()).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: DegreeCounts) {
        for (node, n) in other.subject_of {
            *self.subject_of.entry(node).or_insert(0) += n;
        }
        for (node, n) in other.object_of {
            *self.object_of.entry(node).or_insert(0) += n;
        }
    }

    pub fn subject_degree(&self, node: &str) -> u64 {
        self.subject_of.get(node).copied().unwrap_or(0)
    }

    pub fn object_degree(&self, node: &str) -> u64 {
        self.object_of.get(node).copied().unwrap_or(0)
    }

    /// Every node seen as a subject or as an entity object.
    pub fn nodes(&self) -> BTreeSet<String> {
        self.subject_of.keys().chain(self.object_of.keys()).cloned().collect()
    }

    fn satisfies_heuristic(&self, node: &str) -> bool {
        self.object_degree(node) >= 1 && self.subject_degree(node) >= 2
    }
}

/// Reads one node id per line; blank lines are skipped.
pub fn load_cvt_list(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read cvt list {}: {e}", path.display()))
    })?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

/// Flags hub nodes over the whole collection.
///
/// An explicit list overrides structure entirely: the result is the list
/// intersected with the nodes present. The heuristic flags unnamed nodes
/// with object degree >= 1 and subject degree >= 2.
pub fn detect_cvt(
    triples: &[Triple],
    policy: &CvtPolicy,
    name_map: Option<&NameMap>,
) -> BTreeSet<String> {
    let counts = DegreeCounts::from_triples(triples);
    match policy {
        CvtPolicy::ExplicitList(list) => {
            let present = counts.nodes();
            list.intersection(&present).cloned().collect()
        }
        CvtPolicy::Heuristic => counts
            .nodes()
            .into_iter()
            .filter(|n| counts.satisfies_heuristic(n))
            .filter(|n| name_map.is_none_or(|m| !m.contains(n)))
            .collect(),
    }
}
