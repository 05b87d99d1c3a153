//! Pure loss kernels over caller-supplied probabilities and vectors.
//!
//! Nothing here trains: callers bring pre-computed masked-token
//! probabilities and embedding rows, and get scalars back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default joint-loss mixing weight.
pub const DEFAULT_ALPHA: f64 = 0.6;

/// Probabilities are clamped here before the log so degenerate zeros keep
/// a finite, ordered loss.
pub const PROB_EPSILON: f64 = 1e-12;

/// Which denominator the contrastive loss uses. `Paper` reads the formula
/// literally: the positive pair is absent, so only the N-1 in-batch
/// negatives appear. `Standard` is the conventional form with the positive
/// term added, which keeps the loss non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossVariant {
    #[default]
    Paper,
    Standard,
}

impl std::str::FromStr for LossVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(LossVariant::Paper),
            "standard" => Ok(LossVariant::Standard),
            other => Err(Error::Config(format!(
                "unknown loss variant `{other}` (expected paper or standard)"
            ))),
        }
    }
}

/// Where in-batch negatives come from: the other members' positive
/// (masked) representations, or their originals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeSource {
    #[default]
    Positives,
    Originals,
}

impl std::str::FromStr for NegativeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positives" => Ok(NegativeSource::Positives),
            "originals" => Ok(NegativeSource::Originals),
            other => Err(Error::Config(format!(
                "unknown negative source `{other}` (expected positives or originals)"
            ))),
        }
    }
}

/// Joint loss decomposition. `l_joint = alpha * l_mlm + (1 - alpha) * l_c`
/// holds to machine precision by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub l_mlm: f64,
    pub l_c: f64,
    pub l_joint: f64,
    pub alpha: f64,
}

/// Un-normalized masked-token negative log likelihood: -Σ ln P(x_m).
pub fn mlm_loss(masked_token_probs: &[f64]) -> Result<f64> {
    if masked_token_probs.is_empty() {
        return Err(Error::Argument("mlm loss over an empty probability array".into()));
    }
    if let Some(bad) = masked_token_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Argument(format!("probability {bad} outside [0, 1]")));
    }
    // `+ 0.0` turns the -0.0 of an all-ones input into plain zero.
    Ok(-masked_token_probs.iter().map(|p| p.max(PROB_EPSILON).ln()).sum::<f64>() + 0.0)
}

/// dot(u, v) / (|u| |v|).
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Argument(format!(
            "cosine over mismatched dims {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::Argument("cosine over non-finite entries".into()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Argument("cosine over a zero vector".into()));
    }
    Ok(dot / (nu * nv))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// In-batch contrastive loss over cosine similarities at temperature `tau`.
///
/// Row i's positive is `positives[i]`; its negatives are the other batch
/// members' rows from `negatives` (positives by default). The `Paper`
/// variant excludes the positive term from the denominator; `Standard`
/// includes it.
pub fn infonce_loss(
    originals: &[Vec<f64>],
    positives: &[Vec<f64>],
    tau: f64,
    variant: LossVariant,
    negatives: NegativeSource,
) -> Result<f64> {
    let n = originals.len();
    if n < 2 {
        return Err(Error::Argument(format!("contrastive batch of {n} rows; need at least 2")));
    }
    if positives.len() != n {
        return Err(Error::Argument(format!(
            "matrix shapes differ: {n} originals vs {} positives",
            positives.len()
        )));
    }
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::Argument(format!("temperature {tau} must be positive")));
    }
    let pool = match negatives {
        NegativeSource::Positives => positives,
        NegativeSource::Originals => originals,
    };

    let mut total = 0.0;
    for i in 0..n {
        let pos = cosine_similarity(&originals[i], &positives[i])? / tau;
        let mut terms: Vec<f64> = Vec::with_capacity(n);
        if variant == LossVariant::Standard {
            terms.push(pos);
        }
        for j in 0..n {
            if j != i {
                terms.push(cosine_similarity(&originals[i], &pool[j])? / tau);
            }
        }
        total += pos - log_sum_exp(&terms);
    }
    Ok(-total / n as f64)
}

/// `l_joint = alpha * l_mlm + (1 - alpha) * l_c`.
pub fn joint_loss(l_mlm: f64, l_c: f64, alpha: f64) -> Result<LossReport> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Argument(format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(LossReport { l_mlm, l_c, l_joint: alpha * l_mlm + (1.0 - alpha) * l_c, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct two-loop restatement of the formula, naive summation, no
    /// log-sum-exp: the implementation must match it closely.
    fn naive_infonce(
        originals: &[Vec<f64>],
        positives: &[Vec<f64>],
        tau: f64,
        variant: LossVariant,
        negatives: NegativeSource,
    ) -> f64 {
        let n = originals.len();
        let pool = match negatives {
            NegativeSource::Positives => positives,
            NegativeSource::Originals => originals,
        };
        let cos = |a: &[f64], b: &[f64]| {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            dot / (na * nb)
        };
        let mut total = 0.0;
        for i in 0..n {
            let num = (cos(&originals[i], &positives[i]) / tau).exp();
            let mut den = 0.0;
            for j in 0..n {
                if j != i {
                    den += (cos(&originals[i], &pool[j]) / tau).exp();
                }
            }
            if variant == LossVariant::Standard {
                den += num;
            }
            total += (num / den).ln();
        }
        -total / n as f64
    }

    fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0 + 0.01).collect())
            .collect()
    }

    #[test]
    fn perfect_probabilities_cost_nothing() {
        assert_eq!(mlm_loss(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn half_probabilities_cost_two_log_two() {
        let loss = mlm_loss(&[0.5, 0.5]).unwrap();
        assert!((loss - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_clamps_to_epsilon() {
        let loss = mlm_loss(&[0.0]).unwrap();
        assert!((loss - (-PROB_EPSILON.ln())).abs() < 1e-12);
        assert!(loss.is_finite());
    }

    #[test]
    fn mlm_rejects_bad_input() {
        assert!(matches!(mlm_loss(&[]), Err(Error::Argument(_))));
        assert!(matches!(mlm_loss(&[1.5]), Err(Error::Argument(_))));
        assert!(matches!(mlm_loss(&[-0.1]), Err(Error::Argument(_))));
    }

    proptest! {
        #[test]
        fn mlm_is_monotone_non_increasing(
            probs in prop::collection::vec(0.0f64..=1.0, 1..8),
            idx in 0usize..8,
            bump in 0.0f64..=1.0,
        ) {
            let idx = idx % probs.len();
            let mut raised = probs.clone();
            raised[idx] = (raised[idx] + bump).min(1.0);
            let before = mlm_loss(&probs).unwrap();
            let after = mlm_loss(&raised).unwrap();
            prop_assert!(after <= before + 1e-12);
        }
    }

    #[test]
    fn cosine_identity_orthogonal_antipodal() {
        let u = vec![3.0, 4.0];
        assert!((cosine_similarity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        assert!((cosine_similarity(&u, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_rejects_zero_vectors_and_dim_mismatch() {
        assert!(matches!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Argument(_))));
        assert!(matches!(cosine_similarity(&[1.0], &[1.0, 0.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn equal_similarities_reduce_to_log_batch_minus_one() {
        for n in [2usize, 3, 8, 64] {
            let rows: Vec<Vec<f64>> = vec![vec![0.6, 0.8]; n];
            let loss =
                infonce_loss(&rows, &rows, 0.05, LossVariant::Paper, NegativeSource::Positives)
                    .unwrap();
            let expected = ((n - 1) as f64).ln();
            assert!((loss - expected).abs() < 1e-9, "n = {n}: {loss} vs {expected}");
        }
    }

    #[test]
    fn implementation_matches_the_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = rng.random_range(2..=8);
            let d = rng.random_range(2..=16);
            let originals = random_rows(&mut rng, n, d);
            let positives = random_rows(&mut rng, n, d);
            let tau = 0.05 + rng.random::<f64>();
            for variant in [LossVariant::Paper, LossVariant::Standard] {
                for negatives in [NegativeSource::Positives, NegativeSource::Originals] {
                    let got =
                        infonce_loss(&originals, &positives, tau, variant, negatives).unwrap();
                    let want = naive_infonce(&originals, &positives, tau, variant, negatives);
                    assert!(
                        (got - want).abs() < 1e-9,
                        "trial {trial} {variant:?} {negatives:?}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn loss_is_invariant_to_row_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let originals = random_rows(&mut rng, 4, 8);
        let positives = random_rows(&mut rng, 4, 8);
        let base = infonce_loss(&originals, &positives, 0.1, LossVariant::Paper, NegativeSource::Positives)
            .unwrap();
        let mut scaled = originals.clone();
        for x in &mut scaled[2] {
            *x *= 37.5;
        }
        let after = infonce_loss(&scaled, &positives, 0.1, LossVariant::Paper, NegativeSource::Positives)
            .unwrap();
        assert!((base - after).abs() < 1e-9);
    }

    #[test]
    fn standard_variant_never_goes_negative_but_paper_can() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(2..=6);
            let d = rng.random_range(2..=8);
            let o = random_rows(&mut rng, n, d);
            let p = random_rows(&mut rng, n, d);
            let std_loss =
                infonce_loss(&o, &p, 0.2, LossVariant::Standard, NegativeSource::Positives)
                    .unwrap();
            assert!(std_loss >= -1e-12);
        }
        // Identical pairs with orthogonal other members: the positive term
        // dominates every negative, so the paper form dips below zero.
        let o = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let paper =
            infonce_loss(&o, &o, 0.5, LossVariant::Paper, NegativeSource::Positives).unwrap();
        assert!(paper < 0.0);
    }

    #[test]
    fn infonce_rejects_bad_arguments() {
        let rows = vec![vec![1.0, 0.0]];
        assert!(matches!(
            infonce_loss(&rows, &rows, 0.1, LossVariant::Paper, NegativeSource::Positives),
            Err(Error::Argument(_))
        ));
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            infonce_loss(&rows, &rows, 0.0, LossVariant::Paper, NegativeSource::Positives),
            Err(Error::Argument(_))
        ));
        let short = vec![vec![1.0, 0.0]];
        assert!(matches!(
            infonce_loss(&rows, &short, 0.1, LossVariant::Paper, NegativeSource::Positives),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn joint_mixes_at_the_default_weight() {
        let r = joint_loss(1.0, 2.0, DEFAULT_ALPHA).unwrap();
        assert!((r.l_joint - 1.4).abs() < 1e-12);
    }

    #[test]
    fn joint_endpoints_are_exact() {
        let r = joint_loss(1.25, 7.5, 1.0).unwrap();
        assert_eq!(r.l_joint, r.l_mlm);
        let r = joint_loss(1.25, 7.5, 0.0).unwrap();
        assert_eq!(r.l_joint, r.l_c);
    }

    #[test]
    fn joint_rejects_out_of_range_alpha() {
        assert!(matches!(joint_loss(1.0, 1.0, 1.1), Err(Error::Argument(_))));
        assert!(matches!(joint_loss(1.0, 1.0, -0.1), Err(Error::Argument(_))));
    }
}
