//! Triple-to-passage linearization.
//!
//! `linearize_kb` is the entry point: deduplicate, route CVT stars to
//! sentence conversion, fold the remaining vanilla triples through the
//! six-case priority merge under a token budget, and render everything to
//! a passage corpus with sequential ids. Emission order is CVT sentences
//! (hub nodes sorted), then groups in grouping order, then singletons.

mod ablate;
mod group;
mod passage;
mod render;

pub use ablate::ablate_kb;
pub use group::{group_triples, surface_triple, GroupKey, TripleGroup};
pub use passage::{read_corpus, write_corpus, LinearizeStats, Passage, PassageKind};
pub use render::{
    render_case, render_cvt, render_singleton, respan, Component, Rendered, SurfaceTriple,
    TermSpan,
};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ingest::{detect_cvt, CvtPolicy, ObjectKind, SurfaceResolver, Triple};
use crate::tokenize::Tokenizer;

/// Token budget above which buckets split instead of merging further.
pub const DEFAULT_BUDGET: usize = 100;

pub struct LinearizeOptions<'a> {
    pub budget: usize,
    pub tokenizer: &'a dyn Tokenizer,
    pub resolver: &'a SurfaceResolver,
    pub cvt_policy: CvtPolicy,
}

/// Sentence conversion of one CVT star.
#[derive(Debug, Clone, PartialEq)]
pub struct CvtSentence {
    pub text: String,
    pub spans: Vec<TermSpan>,
    /// Raw members in render order: inbound head first, then outbound.
    pub members: Vec<Triple>,
    /// Star triples the sentence cannot carry (extra inbound edges and
    /// self-loops); the caller returns them to the vanilla pool.
    pub leftover: Vec<Triple>,
}

/// Converts a star into one sentence: the first inbound triple's subject
/// and predicate, then a `", "`-joined `predicate object` clause per
/// outbound triple in input order. The hub id never appears in the text.
///
/// A star missing either side is degenerate: the caller reports it and
/// treats the node as an ordinary entity.
pub fn linearize_cvt(
    node: &str,
    star: &[Triple],
    resolver: &SurfaceResolver,
) -> Result<CvtSentence> {
    let mut inbound: Vec<Triple> = Vec::new();
    let mut outbound: Vec<Triple> = Vec::new();
    let mut leftover: Vec<Triple> = Vec::new();
    for t in star {
        let object_is_node = t.object_kind == ObjectKind::Entity && t.object == node;
        if object_is_node && t.subject == node {
            leftover.push(t.clone());
        } else if object_is_node {
            inbound.push(t.clone());
        } else if t.subject == node {
            outbound.push(t.clone());
        } else {
            return Err(Error::Argument(format!(
                "triple ({}, {}, {}) is not incident to cvt node {node}",
                t.subject, t.predicate, t.object
            )));
        }
    }
    if inbound.is_empty() {
        return Err(Error::DegenerateCvt {
            node: node.to_string(),
            reason: "no inbound triple".into(),
        });
    }
    if outbound.is_empty() {
        return Err(Error::DegenerateCvt {
            node: node.to_string(),
            reason: "no outbound triple".into(),
        });
    }

    let head = inbound.remove(0);
    leftover.extend(inbound);
    let head_surface = surface_triple(resolver, &head);
    let out_surfaces: Vec<SurfaceTriple> =
        outbound.iter().map(|t| surface_triple(resolver, t)).collect();
    let rendered = render_cvt(&head_surface, &out_surfaces);

    let mut members = Vec::with_capacity(1 + outbound.len());
    members.push(head);
    members.extend(outbound);
    Ok(CvtSentence { text: rendered.text, spans: rendered.spans, members, leftover })
}

struct PendingPassage {
    text: String,
    kind: PassageKind,
    members: Vec<Triple>,
}

/// Full linearization: dedup, CVT routing, grouping, rendering.
pub fn linearize_kb(
    triples: &[Triple],
    opts: &LinearizeOptions,
) -> Result<(Vec<Passage>, LinearizeStats)> {
    let mut seen = HashSet::new();
    let mut pool: Vec<Triple> = Vec::new();
    for t in triples {
        if seen.insert(t.clone()) {
            pool.push(t.clone());
        }
    }
    let duplicates_removed = (triples.len() - pool.len()) as u64;

    let cvt_nodes = detect_cvt(&pool, &opts.cvt_policy, opts.resolver.name_map());
    // A triple touching two hubs belongs to its object's star: inbound
    // edges are the scarce side a sentence cannot exist without.
    let mut star_of: Vec<Option<String>> = pool
        .iter()
        .map(|t| {
            if t.object_kind == ObjectKind::Entity && cvt_nodes.contains(&t.object) {
                Some(t.object.clone())
            } else if cvt_nodes.contains(&t.subject) {
                Some(t.subject.clone())
            } else {
                None
            }
        })
        .collect();

    let mut pending: Vec<PendingPassage> = Vec::new();
    let mut degenerate_cvt_nodes = 0u64;
    for node in &cvt_nodes {
        let star_idx: Vec<usize> = (0..pool.len())
            .filter(|&i| star_of[i].as_deref() == Some(node.as_str()))
            .collect();
        if star_idx.is_empty() {
            continue;
        }
        let star: Vec<Triple> = star_idx.iter().map(|&i| pool[i].clone()).collect();
        match linearize_cvt(node, &star, opts.resolver) {
            Ok(cvt) => {
                for t in &cvt.leftover {
                    let i = star_idx.iter().copied().find(|&i| pool[i] == *t).unwrap();
                    star_of[i] = None;
                }
                pending.push(PendingPassage {
                    text: cvt.text,
                    kind: PassageKind::CvtSentence,
                    members: cvt.members,
                });
            }
            Err(Error::DegenerateCvt { .. }) => {
                degenerate_cvt_nodes += 1;
                for &i in &star_idx {
                    star_of[i] = None;
                }
            }
            Err(e) => return Err(e),
        }
    }
    let cvt_sentences = pending.len() as u64;

    let vanilla: Vec<Triple> = (0..pool.len())
        .filter(|&i| star_of[i].is_none())
        .map(|i| pool[i].clone())
        .collect();
    for g in group_triples(&vanilla, opts.budget, opts.tokenizer, opts.resolver) {
        let surfaces: Vec<SurfaceTriple> =
            g.members.iter().map(|t| surface_triple(opts.resolver, t)).collect();
        let (text, kind) = match (&g.key, g.members.len()) {
            (Some(key), n) if n >= 2 => {
                (render_case(key.case(), &surfaces).text, PassageKind::MergedGroup)
            }
            _ => (render_singleton(&surfaces[0]).text, PassageKind::Singleton),
        };
        pending.push(PendingPassage { text, kind, members: g.members });
    }

    debug_assert!(
        {
            let mut counts: std::collections::HashMap<&Triple, i64> = Default::default();
            for t in &pool {
                *counts.entry(t).or_default() += 1;
            }
            for p in &pending {
                for t in &p.members {
                    *counts.entry(t).or_default() -= 1;
                }
            }
            counts.values().all(|&c| c == 0)
        },
        "passages do not partition the deduplicated input"
    );

    let passages: Vec<Passage> = pending
        .into_iter()
        .enumerate()
        .map(|(id, p)| Passage {
            id: id as u64,
            token_count: opts.tokenizer.token_count(&p.text),
            triples: p.members.iter().map(|t| surface_triple(opts.resolver, t)).collect(),
            text: p.text,
            kind: p.kind,
        })
        .collect();

    let stats = LinearizeStats {
        triples_in: triples.len() as u64,
        duplicates_removed,
        triples_linearized: pool.len() as u64,
        cvt_sentences,
        degenerate_cvt_nodes,
        passages_out: passages.len() as u64,
        reduction_ratio: if pool.is_empty() {
            0.0
        } else {
            passages.len() as f64 / pool.len() as f64
        },
    };
    Ok((passages, stats))
}
