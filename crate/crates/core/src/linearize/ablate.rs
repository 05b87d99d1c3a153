//! Seeded fact subsampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Keeps each fact independently with probability `1 - drop_fraction`.
/// One uniform draw per input item in input order, so the surviving
/// subset is a pure function of (input order, seed). Generic so callers
/// can subsample parsed triples and raw dump lines with one rule.
pub fn ablate_kb<T: Clone>(items: &[T], drop_fraction: f64, seed: u64) -> Result<Vec<T>> {
    if !(0.0..=1.0).contains(&drop_fraction) {
        return Err(Error::Argument(format!(
            "drop fraction {drop_fraction} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(items
        .iter()
        .filter(|_| rng.random::<f64>() >= drop_fraction)
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Triple;

    fn kb(n: usize) -> Vec<Triple> {
        (0..n).map(|i| Triple::entity(format!("s{i}"), "p", "o")).collect()
    }

    #[test]
    fn fraction_zero_is_identity() {
        let triples = kb(10);
        assert_eq!(ablate_kb(&triples, 0.0, 7).unwrap(), triples);
    }

    #[test]
    fn fraction_one_empties_the_stream() {
        assert!(ablate_kb(&kb(10), 1.0, 7).unwrap().is_empty());
    }

    #[test]
    fn same_seed_keeps_the_same_subset() {
        let triples = kb(10);
        let a = ablate_kb(&triples, 0.5, 7).unwrap();
        let b = ablate_kb(&triples, 0.5, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn survivors_preserve_input_order() {
        let triples = kb(100);
        let kept = ablate_kb(&triples, 0.5, 3).unwrap();
        let positions: Vec<usize> = kept
            .iter()
            .map(|t| triples.iter().position(|u| u == t).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn out_of_range_fraction_is_rejected() {
        assert!(matches!(ablate_kb(&kb(1), 1.5, 0), Err(Error::Argument(_))));
        assert!(matches!(ablate_kb(&kb(1), -0.1, 0), Err(Error::Argument(_))));
    }
}
