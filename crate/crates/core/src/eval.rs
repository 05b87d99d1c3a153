//! Answer Hits@1 and retrieval Hits@k.
//!
//! Both metrics compare strings only after [`normalize_answer`]. Hits@1 is
//! exact match against any gold alias; retrieval Hits@k counts a question
//! as hit when one of its top-k passages contains an alias as a contiguous
//! token subsequence. Token granularity keeps "art" from matching "party";
//! the report names the criterion so scores stay comparable.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::Passage;
use crate::retrieval::RetrievalResult;

/// What counts as a relevant passage, recorded in every report.
pub const RELEVANCE_CRITERION: &str =
    "normalized gold alias appears in the passage text as a contiguous token subsequence";

/// One question with its gold answer aliases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaRecord {
    pub question_id: String,
    pub answers: Vec<String>,
}

/// One predicted answer string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub question_id: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hits1Report {
    pub hits_at_1: f64,
    /// Gold questions with no prediction; each counted as a miss.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalReport {
    pub criterion: &'static str,
    pub hits_at: BTreeMap<u64, f64>,
}

/// Lowercase, strip punctuation, collapse whitespace runs, trim.
pub fn normalize_answer(s: &str) -> String {
    let lowered = s.to_lowercase();
    let kept: String =
        lowered.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Reads gold records, enforcing that every alias survives normalization.
pub fn load_gold(path: &Path) -> Result<Vec<QaRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: QaRecord = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("{}:{}: bad gold record: {e}", path.display(), no + 1))
        })?;
        validate_gold(&record)?;
        records.push(record);
    }
    Ok(records)
}

fn validate_gold(record: &QaRecord) -> Result<()> {
    if record.answers.is_empty() {
        return Err(Error::Data(format!("question `{}` has no answers", record.question_id)));
    }
    if let Some(blank) = record.answers.iter().find(|a| normalize_answer(a).is_empty()) {
        return Err(Error::Data(format!(
            "question `{}` has alias `{blank}` that normalizes to nothing",
            record.question_id
        )));
    }
    Ok(())
}

/// Reads predictions into a map; duplicate question ids are a data error.
pub fn load_predictions(path: &Path) -> Result<BTreeMap<String, String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut map = BTreeMap::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("{}:{}: bad prediction record: {e}", path.display(), no + 1))
        })?;
        if map.insert(p.question_id.clone(), p.answer).is_some() {
            return Err(Error::Data(format!(
                "{}:{}: duplicate prediction for question `{}`",
                path.display(),
                no + 1,
                p.question_id
            )));
        }
    }
    Ok(map)
}

/// Fraction of gold questions whose normalized prediction exactly equals
/// any normalized alias. Missing predictions count as misses and are
/// listed in the report.
pub fn answer_hits_at_1(
    predictions: &BTreeMap<String, String>,
    gold: &[QaRecord],
) -> Result<Hits1Report> {
    if gold.is_empty() {
        return Err(Error::Argument("empty gold list".into()));
    }
    let mut hits = 0usize;
    let mut missing = Vec::new();
    for record in gold {
        validate_gold(record)?;
        match predictions.get(&record.question_id) {
            None => missing.push(record.question_id.clone()),
            Some(answer) => {
                let predicted = normalize_answer(answer);
                if record.answers.iter().any(|a| normalize_answer(a) == predicted) {
                    hits += 1;
                }
            }
        }
    }
    Ok(Hits1Report { hits_at_1: hits as f64 / gold.len() as f64, missing: missing })
}

/// Is `needle` a contiguous sub-slice of `haystack`?
fn contains_tokens(haystack: &[&str], needle: &[&str]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Per-question rank of the first relevant passage (1-based), or `None`.
///
/// `gold[i]` is matched to the result whose `query_id` is `i`.
fn first_hit_ranks(
    results: &[RetrievalResult],
    passages: &[Passage],
    gold: &[QaRecord],
) -> Result<Vec<Option<usize>>> {
    let texts: BTreeMap<u64, String> =
        passages.iter().map(|p| (p.id, normalize_answer(&p.text))).collect();
    let by_query: BTreeMap<u64, &RetrievalResult> =
        results.iter().map(|r| (r.query_id, r)).collect();

    let mut ranks = Vec::with_capacity(gold.len());
    for (i, record) in gold.iter().enumerate() {
        validate_gold(record)?;
        let result = by_query.get(&(i as u64)).ok_or_else(|| {
            Error::Data(format!(
                "no retrieval result for question {i} (`{}`)",
                record.question_id
            ))
        })?;
        let aliases: Vec<String> =
            record.answers.iter().map(|a| normalize_answer(a)).collect();
        let mut rank = None;
        for (pos, (id, _)) in result.hits.iter().enumerate() {
            let text = texts.get(id).ok_or_else(|| {
                Error::Data(format!("retrieval hit names unknown passage id {id}"))
            })?;
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let relevant = aliases.iter().any(|alias| {
                let needle: Vec<&str> = alias.split_whitespace().collect();
                contains_tokens(&tokens, &needle)
            });
            if relevant {
                rank = Some(pos + 1);
                break;
            }
        }
        ranks.push(rank);
    }
    Ok(ranks)
}

/// Fraction of questions with a relevant passage in the top-min(k, |hits|).
pub fn retrieval_hits_at_k(
    results: &[RetrievalResult],
    passages: &[Passage],
    gold: &[QaRecord],
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if gold.is_empty() {
        return Err(Error::Argument("empty gold list".into()));
    }
    let ranks = first_hit_ranks(results, passages, gold)?;
    Ok(hits_within(&ranks, k))
}

/// One pass over the data, one Hits@k value per requested cutoff.
pub fn retrieval_report(
    results: &[RetrievalResult],
    passages: &[Passage],
    gold: &[QaRecord],
    ks: &[usize],
) -> Result<RetrievalReport> {
    if gold.is_empty() {
        return Err(Error::Argument("empty gold list".into()));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Argument("cutoff list must be non-empty and positive".into()));
    }
    let ranks = first_hit_ranks(results, passages, gold)?;
    let hits_at =
        ks.iter().map(|k| (*k as u64, hits_within(&ranks, *k))).collect::<BTreeMap<_, _>>();
    Ok(RetrievalReport { criterion: RELEVANCE_CRITERION, hits_at })
}

fn hits_within(ranks: &[Option<usize>], k: usize) -> f64 {
    let hits = ranks.iter().filter(|r| matches!(r, Some(rank) if *rank <= k)).count();
    hits as f64 / ranks.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::PassageKind;

    fn gold(id: &str, answers: &[&str]) -> QaRecord {
        QaRecord {
            question_id: id.into(),
            answers: answers.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn passage(id: u64, text: &str) -> Passage {
        Passage {
            id,
            text: text.into(),
            kind: PassageKind::Singleton,
            token_count: text.split_whitespace().count(),
            triples: vec![],
        }
    }

    fn result(query_id: u64, ids: &[u64]) -> RetrievalResult {
        let hits = ids.iter().enumerate().map(|(i, id)| (*id, 1.0 - i as f32 * 0.1)).collect();
        RetrievalResult { query_id, hits }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_answer("Barack Obama!"), "barack obama");
        assert_eq!(normalize_answer("  THE   Hague "), "the hague");
        assert_eq!(normalize_answer(""), "");
        assert_eq!(normalize_answer("U.S.A."), "usa");
    }

    #[test]
    fn hits_at_1_matches_exactly_after_normalization() {
        let gold = vec![gold("q0", &["hawaii"])];
        let mut preds = BTreeMap::new();
        preds.insert("q0".to_string(), "Hawaii".to_string());
        let report = answer_hits_at_1(&preds, &gold).unwrap();
        assert_eq!(report.hits_at_1, 1.0);
        assert!(report.missing.is_empty());
    }

    #[test]
    fn hits_at_1_rejects_containment() {
        let gold = vec![gold("q0", &["hawaii"])];
        let mut preds = BTreeMap::new();
        preds.insert("q0".to_string(), "Honolulu Hawaii".to_string());
        assert_eq!(answer_hits_at_1(&preds, &gold).unwrap().hits_at_1, 0.0);
    }

    #[test]
    fn one_hit_of_two_questions_is_half() {
        let gold = vec![gold("q0", &["hawaii"]), gold("q1", &["kenya"])];
        let mut preds = BTreeMap::new();
        preds.insert("q0".to_string(), "hawaii".to_string());
        preds.insert("q1".to_string(), "canada".to_string());
        assert_eq!(answer_hits_at_1(&preds, &gold).unwrap().hits_at_1, 0.5);
    }

    #[test]
    fn missing_prediction_is_a_listed_miss() {
        let gold = vec![gold("q0", &["hawaii"]), gold("q1", &["kenya"])];
        let mut preds = BTreeMap::new();
        preds.insert("q0".to_string(), "hawaii".to_string());
        let report = answer_hits_at_1(&preds, &gold).unwrap();
        assert_eq!(report.hits_at_1, 0.5);
        assert_eq!(report.missing, vec!["q1".to_string()]);
    }

    #[test]
    fn empty_gold_is_an_argument_error() {
        assert!(matches!(answer_hits_at_1(&BTreeMap::new(), &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn gold_without_surviving_aliases_is_a_data_error() {
        let bad = vec![gold("q0", &["!!!"])];
        assert!(matches!(answer_hits_at_1(&BTreeMap::new(), &bad), Err(Error::Data(_))));
        let none = vec![QaRecord { question_id: "q0".into(), answers: vec![] }];
        assert!(matches!(answer_hits_at_1(&BTreeMap::new(), &none), Err(Error::Data(_))));
    }

    #[test]
    fn rank_cutoff_rule() {
        let passages = vec![passage(0, "x"), passage(1, "y"), passage(2, "obama born in hawaii")];
        let results = vec![result(0, &[0, 1, 2])];
        let gold = vec![gold("q0", &["Hawaii"])];
        assert_eq!(retrieval_hits_at_k(&results, &passages, &gold, 2).unwrap(), 0.0);
        assert_eq!(retrieval_hits_at_k(&results, &passages, &gold, 3).unwrap(), 1.0);
        assert_eq!(retrieval_hits_at_k(&results, &passages, &gold, 5).unwrap(), 1.0);
    }

    #[test]
    fn containment_is_token_level() {
        let passages = vec![passage(0, "the party line")];
        let results = vec![result(0, &[0])];
        let art = vec![gold("q0", &["art"])];
        assert_eq!(retrieval_hits_at_k(&results, &passages, &art, 1).unwrap(), 0.0);

        let passages = vec![passage(0, "lives in New York City now")];
        let ny = vec![gold("q0", &["new york"])];
        assert_eq!(retrieval_hits_at_k(&results, &passages, &ny, 1).unwrap(), 1.0);
    }

    #[test]
    fn multi_token_alias_must_be_contiguous() {
        let passages = vec![passage(0, "new haven and york")];
        let results = vec![result(0, &[0])];
        let gold = vec![gold("q0", &["new york"])];
        assert_eq!(retrieval_hits_at_k(&results, &passages, &gold, 1).unwrap(), 0.0);
    }

    #[test]
    fn report_covers_every_cutoff_and_is_monotone() {
        let passages = vec![
            passage(0, "noise"),
            passage(1, "more noise"),
            passage(2, "answer alpha"),
            passage(3, "answer beta"),
        ];
        let results = vec![result(0, &[0, 2, 1]), result(1, &[0, 1, 3])];
        let gold = vec![gold("q0", &["alpha"]), gold("q1", &["beta"])];
        let report = retrieval_report(&results, &passages, &gold, &[1, 2, 3, 10]).unwrap();
        assert_eq!(report.criterion, RELEVANCE_CRITERION);
        let values: Vec<f64> = report.hits_at.values().copied().collect();
        assert_eq!(values, vec![0.0, 0.5, 1.0, 1.0]);
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn question_order_does_not_change_the_metric() {
        let passages = vec![passage(0, "alpha"), passage(1, "beta")];
        let results = vec![result(0, &[0]), result(1, &[1])];
        let gold_fwd = vec![gold("q0", &["alpha"]), gold("q1", &["gamma"])];
        // Swapping questions swaps their query ids with them.
        let results_rev = vec![result(0, &[1]), result(1, &[0])];
        let gold_rev = vec![gold("q1", &["gamma"]), gold("q0", &["alpha"])];
        let a = retrieval_hits_at_k(&results, &passages, &gold_fwd, 1).unwrap();
        let b = retrieval_hits_at_k(&results_rev, &passages, &gold_rev, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scores_do_not_matter_once_ranked() {
        let passages = vec![passage(0, "alpha"), passage(1, "beta")];
        let gold = vec![gold("q0", &["beta"])];
        let cheap = vec![RetrievalResult { query_id: 0, hits: vec![(0, 0.2), (1, 0.1)] }];
        let rich = vec![RetrievalResult { query_id: 0, hits: vec![(0, 9.0), (1, 5.0)] }];
        for k in 1..=2 {
            assert_eq!(
                retrieval_hits_at_k(&cheap, &passages, &gold, k).unwrap(),
                retrieval_hits_at_k(&rich, &passages, &gold, k).unwrap()
            );
        }
    }

    #[test]
    fn unknown_passage_id_is_a_data_error() {
        let passages = vec![passage(0, "alpha")];
        let results = vec![result(0, &[7])];
        let gold = vec![gold("q0", &["alpha"])];
        let err = retrieval_hits_at_k(&results, &passages, &gold, 1).unwrap_err();
        assert!(matches!(&err, Error::Data(m) if m.contains('7')), "{err}");
    }

    #[test]
    fn missing_query_id_is_a_data_error() {
        let passages = vec![passage(0, "alpha")];
        let results = vec![result(5, &[0])];
        let gold = vec![gold("q0", &["alpha"])];
        assert!(matches!(
            retrieval_hits_at_k(&results, &passages, &gold, 1),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn gold_files_roundtrip_and_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gold.jsonl");
        std::fs::write(
            &path,
            "{\"question_id\":\"q0\",\"answers\":[\"Hawaii\",\"HI\"]}\n\n{\"question_id\":\"q1\",\"answers\":[\"Kenya\"]}\n",
        )
        .unwrap();
        let records = load_gold(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].answers, vec!["Hawaii", "HI"]);

        std::fs::write(&path, "{\"question_id\":\"q0\",\"answers\":[]}\n").unwrap();
        assert!(matches!(load_gold(&path), Err(Error::Data(_))));
        std::fs::write(&path, "not json\n").unwrap();
        assert!(matches!(load_gold(&path), Err(Error::Data(_))));
    }

    #[test]
    fn prediction_files_reject_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        std::fs::write(
            &path,
            "{\"question_id\":\"q0\",\"answer\":\"a\"}\n{\"question_id\":\"q0\",\"answer\":\"b\"}\n",
        )
        .unwrap();
        assert!(matches!(load_predictions(&path), Err(Error::Data(_))));
    }
}
