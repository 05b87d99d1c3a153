//! Whole-component masking examples (KM) and contrastive pairs (KCD).
//!
//! Both example kinds share one seeded draw: pick a member triple of the
//! passage uniformly, then one of its rendered components uniformly, and
//! replace every token that component covers with the mask symbol. KM
//! records the masked frame with recovery targets; KCD records the
//! original/positive text pair the masking induces.
//!
//! On vanilla passages all three components of every member are rendered.
//! CVT sentences never render the hub node, so there the draw is uniform
//! over the components that do appear (inbound member: subject and
//! relation; outbound members: relation and object).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::{respan, Component, Passage};
use crate::tokenize::{Tokenizer, CLS, MASK, SEP};

pub const DEFAULT_BATCH_SIZE: usize = 8;

/// One knowledge-aware MLM example over a framed token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmExample {
    /// `[CLS] … [SEP]` sequence with the chosen component masked.
    pub tokens: Vec<String>,
    /// Contiguous indices into `tokens` holding the mask symbol.
    pub masked_positions: Vec<usize>,
    /// Original tokens at those positions, in order.
    pub targets: Vec<String>,
    pub component: Component,
    /// Which member triple the component came from, for auditability.
    pub member_index: usize,
}

/// One contrastive pair: the passage text and its masked variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KcdPair {
    pub original: String,
    pub positive: String,
    pub passage_id: u64,
}

/// One planned batch of passage ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub passage_ids: Vec<u64>,
}

/// Sidecar for a batch plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchManifest {
    pub seed: u64,
    pub batch_size: usize,
    pub sample_count: usize,
    pub batches: usize,
    /// Passages lost to the trailing <2 batch rule.
    pub dropped_trailing: usize,
}

/// Stable per-item seed derivation (splitmix64 finalizer), so sharded
/// generation produces the same stream regardless of worker count.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct MaskedFrame {
    tokens: Vec<String>,
    masked_positions: Vec<usize>,
    targets: Vec<String>,
    component: Component,
    member_index: usize,
}

fn mask_frame(passage: &Passage, tokenizer: &dyn Tokenizer, seed: u64) -> Result<MaskedFrame> {
    if passage.triples.is_empty() {
        return Err(Error::Argument(format!("passage {} has no member triples", passage.id)));
    }
    let rendered = respan(passage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let member = rng.random_range(0..passage.triples.len());
    let available: Vec<Component> = [Component::Subject, Component::Relation, Component::Object]
        .into_iter()
        .filter(|&c| rendered.span_of(member, c).is_some())
        .collect();
    let component = available[rng.random_range(0..available.len())];
    let span = rendered.span_of(member, component).unwrap();

    let seq = tokenizer.tokenize(&passage.text);
    let mut tokens = Vec::with_capacity(seq.len() + 2);
    let mut masked_positions = Vec::new();
    let mut targets = Vec::new();
    tokens.push(CLS.to_string());
    for tok in seq.tokens() {
        if tok.start < span.end && tok.end > span.start {
            masked_positions.push(tokens.len());
            targets.push(tok.text.clone());
            tokens.push(MASK.to_string());
        } else {
            tokens.push(tok.text.clone());
        }
    }
    tokens.push(SEP.to_string());
    if masked_positions.is_empty() {
        return Err(Error::Data(format!(
            "passage {}: selected component covers no tokens",
            passage.id
        )));
    }
    Ok(MaskedFrame { tokens, masked_positions, targets, component, member_index: member })
}

/// Masks one uniformly drawn component of one uniformly drawn member.
/// Deterministic in (passage, tokenizer, seed); frame tokens never mask.
pub fn make_km_example(
    passage: &Passage,
    tokenizer: &dyn Tokenizer,
    seed: u64,
) -> Result<KmExample> {
    let f = mask_frame(passage, tokenizer, seed)?;
    Ok(KmExample {
        tokens: f.tokens,
        masked_positions: f.masked_positions,
        targets: f.targets,
        component: f.component,
        member_index: f.member_index,
    })
}

/// Builds the contrastive pair induced by the same seeded draw as
/// [`make_km_example`]: original = framed unmasked tokens, positive = the
/// masked frame. Both sides are space-joined token text, so they always
/// align position for position.
pub fn make_kcd_pair(
    passage: &Passage,
    tokenizer: &dyn Tokenizer,
    seed: u64,
) -> Result<KcdPair> {
    let f = mask_frame(passage, tokenizer, seed)?;
    let mut original = f.tokens.clone();
    for (&pos, target) in f.masked_positions.iter().zip(&f.targets) {
        original[pos] = target.clone();
    }
    Ok(KcdPair {
        original: original.join(" "),
        positive: f.tokens.join(" "),
        passage_id: passage.id,
    })
}

/// Samples `sample_count` passages without replacement, shuffles them, and
/// cuts batches of `batch_size`. A trailing batch of size < 2 is dropped
/// because contrastive batches need in-batch negatives.
pub fn plan_batches(
    passage_ids: &[u64],
    batch_size: usize,
    seed: u64,
    sample_count: usize,
) -> Result<(Vec<Batch>, BatchManifest)> {
    if batch_size < 2 {
        return Err(Error::Argument(format!("batch size {batch_size} < 2")));
    }
    if sample_count > passage_ids.len() {
        return Err(Error::Argument(format!(
            "sample count {sample_count} exceeds corpus size {}",
            passage_ids.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<u64> = rand::seq::index::sample(&mut rng, passage_ids.len(), sample_count)
        .iter()
        .map(|i| passage_ids[i])
        .collect();
    chosen.shuffle(&mut rng);

    let mut batches: Vec<Batch> =
        chosen.chunks(batch_size).map(|c| Batch { passage_ids: c.to_vec() }).collect();
    let mut dropped_trailing = 0;
    if let Some(last) = batches.last() {
        if last.passage_ids.len() < 2 {
            dropped_trailing = last.passage_ids.len();
            batches.pop();
        }
    }
    let manifest = BatchManifest {
        seed,
        batch_size,
        sample_count,
        batches: batches.len(),
        dropped_trailing,
    };
    Ok((batches, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::PassageKind;
    use crate::tokenize::Whitespace;

    fn singleton(s: &str, p: &str, o: &str) -> Passage {
        let text = format!("{s} {p} {o}");
        Passage {
            id: 0,
            token_count: text.split_whitespace().count(),
            text,
            kind: PassageKind::Singleton,
            triples: vec![[s.to_string(), p.to_string(), o.to_string()]],
        }
    }

    fn seed_selecting(passage: &Passage, component: Component) -> u64 {
        (0..200)
            .find(|&s| {
                make_km_example(passage, &Whitespace, s).unwrap().component == component
            })
            .expect("no seed under 200 selects the component")
    }

    #[test]
    fn relation_mask_covers_both_relation_tokens() {
        let p = singleton("A", "born in", "B");
        let seed = seed_selecting(&p, Component::Relation);
        let ex = make_km_example(&p, &Whitespace, seed).unwrap();
        assert_eq!(ex.tokens, ["[CLS]", "A", "[MASK]", "[MASK]", "B", "[SEP]"]);
        assert_eq!(ex.masked_positions, [2, 3]);
        assert_eq!(ex.targets, ["born", "in"]);
    }

    #[test]
    fn multi_token_object_masks_all_its_tokens() {
        let p = singleton("obama", "born in", "new york city");
        let seed = seed_selecting(&p, Component::Object);
        let ex = make_km_example(&p, &Whitespace, seed).unwrap();
        assert_eq!(ex.masked_positions.len(), 3);
        assert_eq!(ex.targets, ["new", "york", "city"]);
        let contiguous = ex.masked_positions.windows(2).all(|w| w[1] == w[0] + 1);
        assert!(contiguous);
    }

    #[test]
    fn same_seed_reproduces_the_example() {
        let p = singleton("A", "born in", "B");
        let a = make_km_example(&p, &Whitespace, 41).unwrap();
        let b = make_km_example(&p, &Whitespace, 41).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_tokens_never_mask_and_targets_reconstruct() {
        let passages = [
            singleton("A", "born in", "B"),
            singleton("obama", "child", "malia ann obama"),
        ];
        for p in &passages {
            for seed in 0..50 {
                let ex = make_km_example(p, &Whitespace, seed).unwrap();
                assert_ne!(ex.tokens[0], MASK);
                assert_ne!(ex.tokens[ex.tokens.len() - 1], MASK);
                let mut rebuilt = ex.tokens.clone();
                for (&pos, t) in ex.masked_positions.iter().zip(&ex.targets) {
                    rebuilt[pos] = t.clone();
                }
                let mut expected = vec![CLS.to_string()];
                expected.extend(p.text.split_whitespace().map(String::from));
                expected.push(SEP.to_string());
                assert_eq!(rebuilt, expected);
            }
        }
    }

    #[test]
    fn component_draw_is_roughly_uniform() {
        let p = singleton("A", "born in", "B");
        let mut counts = [0u32; 3];
        let n = 3000;
        for seed in 0..n {
            let ex = make_km_example(&p, &Whitespace, seed).unwrap();
            counts[match ex.component {
                Component::Subject => 0,
                Component::Relation => 1,
                Component::Object => 2,
            }] += 1;
        }
        for c in counts {
            let freq = f64::from(c) / f64::from(u32::try_from(n).unwrap());
            assert!((freq - 1.0 / 3.0).abs() < 0.03, "component frequency {freq}");
        }
    }

    #[test]
    fn cvt_draws_avoid_the_unrendered_hub() {
        let p = Passage {
            id: 3,
            text: "X award nomination nominee A, year 1998".into(),
            kind: PassageKind::CvtSentence,
            token_count: 7,
            triples: vec![
                ["X".into(), "award nomination".into(), "c1".into()],
                ["c1".into(), "nominee".into(), "A".into()],
                ["c1".into(), "year".into(), "1998".into()],
            ],
        };
        for seed in 0..100 {
            let ex = make_km_example(&p, &Whitespace, seed).unwrap();
            if ex.member_index == 0 {
                assert_ne!(ex.component, Component::Object, "hub object must not be drawn");
            } else {
                assert_ne!(ex.component, Component::Subject, "hub subject must not be drawn");
            }
            assert!(!ex.targets.iter().any(|t| t == "c1"));
        }
    }

    #[test]
    fn kcd_pair_differs_only_at_masked_positions() {
        let p = singleton("A", "born in", "B");
        for seed in 0..20 {
            let pair = make_kcd_pair(&p, &Whitespace, seed).unwrap();
            assert_ne!(pair.original, pair.positive);
            let o: Vec<&str> = pair.original.split(' ').collect();
            let m: Vec<&str> = pair.positive.split(' ').collect();
            assert_eq!(o.len(), m.len());
            assert!(m.contains(&MASK));
            for (a, b) in o.iter().zip(&m) {
                assert!(a == b || *b == MASK);
            }
        }
    }

    #[test]
    fn kcd_matches_km_draw_for_the_same_seed() {
        let p = singleton("A", "born in", "B");
        let ex = make_km_example(&p, &Whitespace, 7).unwrap();
        let pair = make_kcd_pair(&p, &Whitespace, 7).unwrap();
        let masked: Vec<&str> = pair.positive.split(' ').collect();
        for &pos in &ex.masked_positions {
            assert_eq!(masked[pos], MASK);
        }
    }

    #[test]
    fn batch_plan_shapes_match_the_drop_rule() {
        let ids: Vec<u64> = (0..20).collect();
        let (batches, manifest) = plan_batches(&ids, 8, 5, 20).unwrap();
        let sizes: Vec<usize> = batches.iter().map(|b| b.passage_ids.len()).collect();
        assert_eq!(sizes, [8, 8, 4]);
        assert_eq!(manifest.dropped_trailing, 0);

        let ids: Vec<u64> = (0..17).collect();
        let (batches, manifest) = plan_batches(&ids, 8, 5, 17).unwrap();
        let sizes: Vec<usize> = batches.iter().map(|b| b.passage_ids.len()).collect();
        assert_eq!(sizes, [8, 8]);
        assert_eq!(manifest.dropped_trailing, 1);
    }

    #[test]
    fn batch_plan_is_a_seeded_sample_without_replacement() {
        let ids: Vec<u64> = (0..50).collect();
        let (a, _) = plan_batches(&ids, 8, 9, 30).unwrap();
        let (b, _) = plan_batches(&ids, 8, 9, 30).unwrap();
        assert_eq!(a, b);
        let mut drawn: Vec<u64> =
            a.iter().flat_map(|b| b.passage_ids.iter().copied()).collect();
        drawn.sort_unstable();
        let before = drawn.len();
        drawn.dedup();
        assert_eq!(drawn.len(), before, "a passage was sampled twice");
    }

    #[test]
    fn batch_plan_rejects_bad_arguments() {
        let ids: Vec<u64> = (0..5).collect();
        assert!(matches!(plan_batches(&ids, 1, 0, 5), Err(Error::Argument(_))));
        assert!(matches!(plan_batches(&ids, 8, 0, 6), Err(Error::Argument(_))));
    }

    #[test]
    fn derived_seeds_spread_streams() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        let c = derive_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, 0));
    }
}
