//! Streaming N-Triples ingestion: parse dumps into normalized triples,
//! resolve human-readable surfaces, and flag CVT hub nodes.

mod cvt;
mod normalize;
mod parse;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

pub use cvt::{detect_cvt, load_cvt_list, CvtPolicy, DegreeCounts};
pub use normalize::{normalize_term, strip_namespace, SurfaceResolver};
pub use parse::{
    collect_triples, open_ntriples, parse_ntriples, parse_ntriples_line, NtriplesIter,
    ParsePolicy, ParseStats,
};

use crate::error::{Error, Result};

/// Whether a triple's object names a KB node or carries a literal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Entity,
    Literal,
}

/// One subject/predicate/object fact, terms already stripped of IRI
/// brackets and namespace prefixes. Literal objects hold the bare lexical
/// value (quotes, language tags, and datatype suffixes removed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub object_kind: ObjectKind,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
        object_kind: ObjectKind,
    ) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
            object_kind,
        }
    }

    /// Shorthand for an entity-object triple.
    pub fn entity(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Triple::new(subject, predicate, object, ObjectKind::Entity)
    }

    /// Shorthand for a literal-object triple.
    pub fn literal(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Triple::new(subject, predicate, object, ObjectKind::Literal)
    }
}

/// Human-readable rendering of a term: no IRI brackets, namespace prefixes,
/// underscores, or datatype/language tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SurfaceForm(pub String);

impl SurfaceForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl std::fmt::Display for SurfaceForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// id -> human-readable name table, loaded from a two-column TSV.
#[derive(Debug, Clone, Default)]
pub struct NameMap {
    names: HashMap<String, String>,
}

impl NameMap {
    pub fn new() -> Self {
        NameMap::default()
    }

    /// Loads a two-column TSV (`id TAB name`, UTF-8). Blank lines are
    /// skipped; a non-blank line without a tab is a configuration error.
    pub fn from_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| {
            Error::Config(format!("cannot read name map {}: {e}", path.display()))
        })?;
        let mut names = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (id, name) = line.split_once('\t').ok_or_else(|| {
                Error::Config(format!(
                    "name map {} line {}: expected `id<TAB>name`",
                    path.display(),
                    i + 1
                ))
            })?;
            names.insert(id.trim().to_string(), name.trim().to_string());
        }
        Ok(NameMap { names })
    }

    pub fn insert(&mut self, id: impl Into<String>, name: impl Into<String>) {
        self.names.insert(id.into(), name.into());
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.names.get(id).map(|s| s.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.names.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_map_rejects_missing_tab() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("names.tsv");
        std::fs::write(&path, "m.1\tAlpha\nbroken line\n").unwrap();
        assert!(matches!(NameMap::from_file(&path), Err(Error::Config(_))));
    }

    #[test]
    fn name_map_loads_entries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("names.tsv");
        std::fs::write(&path, "m.1\tAlpha\nm.2\tBeta Two\n\n").unwrap();
        let map = NameMap::from_file(&path).unwrap();
        assert_eq!(map.get("m.1"), Some("Alpha"));
        assert_eq!(map.get("m.2"), Some("Beta Two"));
        assert_eq!(map.len(), 2);
    }
}
