//! Scores from token probabilities and embeddings.

use serde::{Deserialize, Serialize};

use super::record::TokenProb;
use crate::error::{Error, Result};

pub const OPTION_TOKENS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// Candidate tokens at one position of a completion, most probable first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDistribution {
    pub position: usize,
    entries: Vec<TokenProb>,
}

impl TokenDistribution {
    pub fn new(position: usize, mut entries: Vec<TokenProb>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| !(0.0..=1.0).contains(&e.prob)) {
            return Err(Error::Derivation(format!("probability {} for `{}` outside [0,1]", bad.prob, bad.token)));
        }
        entries.sort_by(|a, b| b.prob.total_cmp(&a.prob));
        Ok(TokenDistribution { position, entries })
    }

    /// From (token, log probability) pairs.
    pub fn from_logprobs(position: usize, top: &[(String, f64)]) -> Result<Self> {
        Self::new(
            position,
            top.iter()
                .map(|(t, lp)| TokenProb {
                    token: t.clone(),
                    prob: lp.exp().min(1.0),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[TokenProb] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikertScore {
    /// Σ rank·p / Σ p over the option tokens present.
    pub normalized: f64,
    /// Σ rank·p without dividing by the option mass.
    pub raw: f64,
}

/// Probability-weighted option rank (first option = 1). Tokens are compared
/// after trimming whitespace; repeated spellings of one option add up.
pub fn likert_weighted_score(dist: &TokenDistribution, options: &[&str]) -> Result<LikertScore> {
    let mut mass = 0.0;
    let mut raw = 0.0;
    for e in dist.entries() {
        if let Some(k) = options.iter().position(|o| *o == e.token.trim()) {
            mass += e.prob;
            raw += (k + 1) as f64 * e.prob;
        }
    }
    if mass <= 0.0 {
        return Err(Error::Derivation("no option token among the candidates".into()));
    }
    Ok(LikertScore {
        normalized: raw / mass,
        raw,
    })
}

fn numeric_token(token: &str, max: u32) -> Option<f64> {
    let t = token.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse::<u32>().ok().filter(|v| *v <= max).map(f64::from)
}

/// Σ value·p over the numeric tokens among the five most probable, without
/// renormalizing. `max` bounds accepted values (100 for ratings, 20 for
/// similarity).
pub fn numeric_weighted_score_bounded(dist: &TokenDistribution, max: u32) -> Result<f64> {
    let mut found = false;
    let mut total = 0.0;
    for e in dist.entries().iter().take(5) {
        if let Some(v) = numeric_token(&e.token, max) {
            found = true;
            total += v * e.prob;
        }
    }
    if found {
        Ok(total)
    } else {
        Err(Error::Derivation("no numeric token among the top five".into()))
    }
}

pub fn numeric_weighted_score(dist: &TokenDistribution) -> Result<f64> {
    numeric_weighted_score_bounded(dist, 100)
}

/// Index of the first generated token that starts an answer: an option
/// letter, or a number when `numeric` is set.
pub fn locate_answer(tokens: &[String], numeric: bool) -> Option<usize> {
    tokens.iter().position(|t| {
        let t = t.trim();
        if numeric {
            t.chars().next().is_some_and(|c| c.is_ascii_digit())
        } else {
            OPTION_TOKENS.contains(&t)
        }
    })
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!("vector lengths differ: {} vs {}", a.len(), b.len())));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("cosine of a zero vector".into()));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(pairs: &[(&str, f64)]) -> TokenDistribution {
        TokenDistribution::new(
            0,
            pairs
                .iter()
                .map(|(t, p)| TokenProb {
                    token: t.to_string(),
                    prob: *p,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn likert_examples() {
        assert_eq!(likert_weighted_score(&dist(&[("A", 1.0)]), &OPTION_TOKENS).unwrap().normalized, 1.0);
        assert_eq!(likert_weighted_score(&dist(&[("A", 0.5), ("F", 0.5)]), &OPTION_TOKENS).unwrap().normalized, 3.5);
        let s = likert_weighted_score(&dist(&[("A", 0.7), ("B", 0.2), ("F", 0.1)]), &OPTION_TOKENS).unwrap();
        // 0.7·1 + 0.2·2 + 0.1·6 over a mass of 1.0.
        assert!((s.normalized - 1.7).abs() < 1e-12);
        assert!((s.raw - 1.7).abs() < 1e-12);
        assert!(likert_weighted_score(&dist(&[("The", 0.9)]), &OPTION_TOKENS).is_err());
    }

    #[test]
    fn likert_normalizes_partial_mass() {
        let s = likert_weighted_score(&dist(&[("B", 0.3), (" B", 0.1), ("x", 0.6)]), &OPTION_TOKENS).unwrap();
        assert!((s.normalized - 2.0).abs() < 1e-12);
        assert!((s.raw - 0.8).abs() < 1e-12);
    }

    #[test]
    fn numeric_examples() {
        let d = dist(&[("80", 0.5), ("70", 0.3), ("90", 0.1), ("60", 0.05), ("100", 0.05)]);
        // 40 + 21 + 9 + 3 + 5
        assert!((numeric_weighted_score(&d).unwrap() - 78.0).abs() < 1e-12);
        assert_eq!(numeric_weighted_score(&dist(&[("0", 1.0)])).unwrap(), 0.0);
        assert!(numeric_weighted_score(&dist(&[("I", 0.5), ("The", 0.4)])).is_err());
    }

    #[test]
    fn numeric_uses_only_top_five() {
        let d = dist(&[("a", 0.3), ("b", 0.2), ("c", 0.2), ("d", 0.1), ("50", 0.1), ("90", 0.09)]);
        assert!((numeric_weighted_score(&d).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(cosine(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn answer_position() {
        let toks: Vec<String> = ["I", " think", " E"].iter().map(|s| s.to_string()).collect();
        assert_eq!(locate_answer(&toks, false), Some(2));
        let toks: Vec<String> = ["Around", " 75", "."].iter().map(|s| s.to_string()).collect();
        assert_eq!(locate_answer(&toks, true), Some(1));
    }

    proptest! {
        // Renaming options while keeping their order leaves the score unchanged.
        #[test]
        fn likert_rename_invariant(ps in proptest::collection::vec(0.0f64..1.0, 6)) {
            let total: f64 = ps.iter().sum();
            prop_assume!(total > 1e-6);
            let ps: Vec<f64> = ps.iter().map(|p| p / total).collect();
            let a: Vec<(&str, f64)> = OPTION_TOKENS.iter().copied().zip(ps.iter().copied()).collect();
            let renamed = ["1", "2", "3", "4", "5", "6"];
            let b: Vec<(&str, f64)> = renamed.iter().copied().zip(ps.iter().copied()).collect();
            let sa = likert_weighted_score(&dist(&a), &OPTION_TOKENS).unwrap().normalized;
            let sb = likert_weighted_score(&dist(&b), &renamed).unwrap().normalized;
            prop_assert!((sa - sb).abs() < 1e-12);
            prop_assert!((1.0..=6.0).contains(&sa));
        }
    }
}
