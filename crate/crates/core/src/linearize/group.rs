//! Greedy six-case priority grouping.

use indexmap::IndexMap;

use super::render::{render_case, SurfaceTriple};
use crate::ingest::{ObjectKind, SurfaceResolver, Triple};
use crate::tokenize::Tokenizer;

/// Shared key of a merged group. Case number doubles as priority: lower
/// cases share more and are consumed first. Object keys carry the object
/// kind so a literal never merges with an identically spelled entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKey {
    SubjectPredicate { subject: String, predicate: String },
    SubjectObject { subject: String, object: String, object_kind: ObjectKind },
    PredicateObject { predicate: String, object: String, object_kind: ObjectKind },
    Subject { subject: String },
    Predicate { predicate: String },
    Object { object: String, object_kind: ObjectKind },
}

impl GroupKey {
    pub fn case(&self) -> u8 {
        match self {
            GroupKey::SubjectPredicate { .. } => 1,
            GroupKey::SubjectObject { .. } => 2,
            GroupKey::PredicateObject { .. } => 3,
            GroupKey::Subject { .. } => 4,
            GroupKey::Predicate { .. } => 5,
            GroupKey::Object { .. } => 6,
        }
    }

    fn for_case(t: &Triple, case: u8) -> GroupKey {
        match case {
            1 => GroupKey::SubjectPredicate {
                subject: t.subject.clone(),
                predicate: t.predicate.clone(),
            },
            2 => GroupKey::SubjectObject {
                subject: t.subject.clone(),
                object: t.object.clone(),
                object_kind: t.object_kind,
            },
            3 => GroupKey::PredicateObject {
                predicate: t.predicate.clone(),
                object: t.object.clone(),
                object_kind: t.object_kind,
            },
            4 => GroupKey::Subject { subject: t.subject.clone() },
            5 => GroupKey::Predicate { predicate: t.predicate.clone() },
            6 => GroupKey::Object { object: t.object.clone(), object_kind: t.object_kind },
            _ => unreachable!(),
        }
    }
}

/// One grouping decision. `key` is `None` only for triples no case could
/// pair (true singletons); a one-member group with `Some(key)` is a budget
/// split remnant and still counts as consumed by its case.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleGroup {
    pub key: Option<GroupKey>,
    pub members: Vec<Triple>,
}

/// Resolves one triple's three surfaces.
pub fn surface_triple(resolver: &SurfaceResolver, t: &Triple) -> SurfaceTriple {
    [resolver.subject(t).0, resolver.predicate(t).0, resolver.object(t).0]
}

/// Greedy sequential assignment over cases 1..6.
///
/// For each case in priority order the still-unconsumed triples are
/// bucketed by that case's key (first-appearance order); every bucket with
/// at least two triples is consumed, filled in input order and split when
/// the rendered group would exceed `budget` tokens. Leftovers after case 6
/// become singletons. Expects deduplicated input; every triple lands in
/// exactly one group.
pub fn group_triples(
    triples: &[Triple],
    budget: usize,
    tokenizer: &dyn Tokenizer,
    resolver: &SurfaceResolver,
) -> Vec<TripleGroup> {
    let surfaces: Vec<SurfaceTriple> =
        triples.iter().map(|t| surface_triple(resolver, t)).collect();
    let mut alive: Vec<usize> = (0..triples.len()).collect();
    let mut out = Vec::new();

    for case in 1..=6u8 {
        let mut buckets: IndexMap<GroupKey, Vec<usize>> = IndexMap::new();
        for &i in &alive {
            buckets.entry(GroupKey::for_case(&triples[i], case)).or_default().push(i);
        }
        let mut consumed = vec![false; triples.len()];
        let mut consumed_any = false;
        for (key, idxs) in buckets {
            if idxs.len() < 2 {
                continue;
            }
            consumed_any = true;
            let mut cur: Vec<usize> = Vec::new();
            for i in idxs {
                if !cur.is_empty() {
                    let cand: Vec<SurfaceTriple> = cur
                        .iter()
                        .chain(std::iter::once(&i))
                        .map(|&j| surfaces[j].clone())
                        .collect();
                    if tokenizer.token_count(&render_case(case, &cand).text) > budget {
                        out.push(TripleGroup {
                            key: Some(key.clone()),
                            members: cur.drain(..).map(|j| triples[j].clone()).collect(),
                        });
                    }
                }
                consumed[i] = true;
                cur.push(i);
            }
            out.push(TripleGroup {
                key: Some(key),
                members: cur.into_iter().map(|j| triples[j].clone()).collect(),
            });
        }
        if consumed_any {
            alive.retain(|&i| !consumed[i]);
        }
    }

    for i in alive {
        out.push(TripleGroup { key: None, members: vec![triples[i].clone()] });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::Whitespace;
    use proptest::prelude::*;

    fn groups(triples: &[Triple], budget: usize) -> Vec<TripleGroup> {
        let resolver = SurfaceResolver::new(None);
        group_triples(triples, budget, &Whitespace, &resolver)
    }

    fn arb_triple() -> impl Strategy<Value = Triple> {
        let term = prop::sample::select(vec!["a", "b", "c", "d"]);
        (term.clone(), term.clone(), term, any::<bool>()).prop_map(|(s, p, o, lit)| {
            if lit {
                Triple::literal(s, p, o)
            } else {
                Triple::entity(s, p, o)
            }
        })
    }

    fn dedup(triples: Vec<Triple>) -> Vec<Triple> {
        let mut out: Vec<Triple> = Vec::new();
        for t in triples {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    proptest! {
        /// Every input triple lands in exactly one group.
        #[test]
        fn grouping_partitions_the_input(
            raw in prop::collection::vec(arb_triple(), 0..24),
            budget in 4usize..20,
        ) {
            let kb = dedup(raw);
            let mut flattened: Vec<Triple> =
                groups(&kb, budget).into_iter().flat_map(|g| g.members).collect();
            let mut expected = kb.clone();
            let key = |t: &Triple| format!("{:?}", t);
            flattened.sort_by_key(&key);
            expected.sort_by_key(&key);
            prop_assert_eq!(flattened, expected);
        }

        /// No multi-member case-k group could have merged at a lower case.
        #[test]
        fn no_group_belongs_to_a_higher_priority_case(
            raw in prop::collection::vec(arb_triple(), 0..24),
            budget in 4usize..20,
        ) {
            let kb = dedup(raw);
            for g in groups(&kb, budget) {
                let (Some(key), members) = (&g.key, &g.members) else { continue };
                if members.len() < 2 {
                    continue;
                }
                for lower in 1..key.case() {
                    let shared = members
                        .iter()
                        .all(|t| GroupKey::for_case(t, lower) == GroupKey::for_case(&members[0], lower));
                    prop_assert!(!shared, "case-{} group could merge at case {lower}", key.case());
                }
            }
        }

        /// All members of a group share the group's key exactly.
        #[test]
        fn members_share_their_group_key(
            raw in prop::collection::vec(arb_triple(), 0..24),
            budget in 4usize..20,
        ) {
            let kb = dedup(raw);
            for g in groups(&kb, budget) {
                let Some(key) = &g.key else { continue };
                for t in &g.members {
                    prop_assert_eq!(&GroupKey::for_case(t, key.case()), key);
                }
            }
        }
    }

    #[test]
    fn compression_kicks_in_when_any_pair_exists() {
        let kb =
            vec![Triple::entity("s", "p", "o1"), Triple::entity("s", "p", "o2"), Triple::entity("x", "y", "z")];
        assert!(groups(&kb, 100).len() < kb.len());
    }
}
