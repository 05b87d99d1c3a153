//! Passage corpus records and JSONL persistence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::render::SurfaceTriple;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassageKind {
    MergedGroup,
    Singleton,
    CvtSentence,
}

/// One linearized passage. `triples` holds the members' surface forms in
/// render order; for CVT sentences that includes the hub node id even
/// though the text never shows it (index 0 is the inbound head).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub id: u64,
    pub text: String,
    pub kind: PassageKind,
    pub token_count: usize,
    pub triples: Vec<SurfaceTriple>,
}

/// Sidecar counters for one linearization run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizeStats {
    pub triples_in: u64,
    pub duplicates_removed: u64,
    pub triples_linearized: u64,
    pub cvt_sentences: u64,
    pub degenerate_cvt_nodes: u64,
    pub passages_out: u64,
    /// passages_out / triples_linearized; 0 when nothing was linearized.
    pub reduction_ratio: f64,
}

/// Writes one JSON object per line, in slice order.
pub fn write_corpus(path: &Path, passages: &[Passage]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in passages {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<Vec<Passage>> {
    let reader = BufReader::new(File::open(path)?);
    let mut passages = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Passage = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("{}:{}: bad passage record: {e}", path.display(), no + 1))
        })?;
        passages.push(p);
    }
    Ok(passages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Passage> {
        vec![
            Passage {
                id: 0,
                text: "obama child malia, sasha".into(),
                kind: PassageKind::MergedGroup,
                token_count: 4,
                triples: vec![
                    ["obama".into(), "child".into(), "malia".into()],
                    ["obama".into(), "child".into(), "sasha".into()],
                ],
            },
            Passage {
                id: 1,
                text: "obama born in hawaii".into(),
                kind: PassageKind::Singleton,
                token_count: 4,
                triples: vec![["obama".into(), "born in".into(), "hawaii".into()]],
            },
        ]
    }

    #[test]
    fn corpus_roundtrips_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let passages = sample();
        write_corpus(&path, &passages).unwrap();
        assert_eq!(read_corpus(&path).unwrap(), passages);
    }

    #[test]
    fn record_schema_is_frozen() {
        let json = serde_json::to_string(&sample()[1]).unwrap();
        assert_eq!(
            json,
            r#"{"id":1,"text":"obama born in hawaii","kind":"singleton","token_count":4,"triples":[["obama","born in","hawaii"]]}"#
        );
    }

    #[test]
    fn bad_record_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"id\":0}\n").unwrap();
        let err = read_corpus(&path).unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains(":1:")));
    }
}
