//! Recoding preferences to signs and the exact two-sided sign test.

use serde::{Deserialize, Serialize};

use super::{Direction, StatKind, StatResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// `+` above the midpoint, `−` below, `None` for an exact tie. The value
/// must already be oriented so that higher favours the predicted argument.
pub fn recode_pair(value: f64, midpoint: f64) -> Option<Sign> {
    if value > midpoint {
        Some(Sign::Plus)
    } else if value < midpoint {
        Some(Sign::Minus)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSeries {
    /// Split label, e.g. `Mammals/typicality`.
    pub split: String,
    pub signs: Vec<Sign>,
    pub n_discarded_ties: usize,
    /// Judgments without a score.
    pub n_missing: usize,
}

impl SignSeries {
    pub fn new(split: &str) -> Self {
        SignSeries {
            split: split.into(),
            signs: Vec::new(),
            n_discarded_ties: 0,
            n_missing: 0,
        }
    }

    /// Recodes canonical values around `midpoint`, dropping ties and missing
    /// values with a count.
    pub fn from_values(split: &str, values: impl IntoIterator<Item = Option<f64>>, midpoint: f64) -> Self {
        let mut s = Self::new(split);
        for v in values {
            s.push(v, midpoint);
        }
        s
    }

    pub fn push(&mut self, value: Option<f64>, midpoint: f64) {
        match value.map(|v| recode_pair(v, midpoint)) {
            Some(Some(sign)) => self.signs.push(sign),
            Some(None) => self.n_discarded_ties += 1,
            None => self.n_missing += 1,
        }
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn plus(&self) -> usize {
        self.signs.iter().filter(|s| **s == Sign::Plus).count()
    }
}

/// Largest n for which the running products in the exact sum fit in a u128.
const EXACT_INTEGER_LIMIT: u64 = 120;

/// P[X ≤ k] for X ~ Binomial(n, 1/2).
pub fn binomial_half_cdf(n: u64, k: u64) -> f64 {
    if k >= n {
        1.0
    } else if n <= EXACT_INTEGER_LIMIT {
        cdf_exact(n, k)
    } else {
        cdf_log(n, k)
    }
}

fn cdf_exact(n: u64, k: u64) -> f64 {
    let mut c: u128 = 1;
    let mut total: u128 = 1;
    for i in 1..=k {
        c = c * u128::from(n - i + 1) / u128::from(i);
        total += c;
    }
    total as f64 / 2f64.powi(n as i32)
}

// Terms are summed relative to the largest so nothing underflows before it
// matters.
fn cdf_log(n: u64, k: u64) -> f64 {
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut ln_c = 0.0;
    let mut logs = Vec::with_capacity(k as usize + 1);
    logs.push(-ln2n);
    for i in 1..=k {
        ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        logs.push(ln_c - ln2n);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

/// Exact two-sided sign test against p = 1/2:
/// p = min(1, 2·min(P[X ≤ k], P[X ≥ k])) with k the number of `+` signs.
pub fn sign_test(series: &SignSeries) -> Result<StatResult> {
    let n = series.n() as u64;
    if n == 0 {
        return Err(Error::Degenerate(format!("sign test on an empty series ({})", series.split)));
    }
    let k = series.plus() as u64;
    let lower = binomial_half_cdf(n, k);
    // By symmetry P[X ≥ k] = P[X ≤ n − k].
    let upper = binomial_half_cdf(n, n - k);
    let p = (2.0 * lower.min(upper)).min(1.0);
    let direction = match (2 * k).cmp(&n) {
        std::cmp::Ordering::Greater => Direction::Predicted,
        std::cmp::Ordering::Less => Direction::Opposite,
        std::cmp::Ordering::Equal => Direction::None,
    };
    Ok(StatResult::new(StatKind::SignP, p, direction, n as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(plus: usize, minus: usize) -> SignSeries {
        let mut s = SignSeries::new("t");
        s.signs.extend(std::iter::repeat(Sign::Plus).take(plus));
        s.signs.extend(std::iter::repeat(Sign::Minus).take(minus));
        s
    }

    #[test]
    fn recode_examples() {
        assert_eq!(recode_pair(5.0, 3.5), Some(Sign::Plus));
        assert_eq!(recode_pair(3.5, 3.5), None);
        assert_eq!(recode_pair(2.0, 3.5), Some(Sign::Minus));
        let s = SignSeries::from_values("x", [Some(5.0), Some(3.5), None, Some(1.0)], 3.5);
        assert_eq!((s.n(), s.plus(), s.n_discarded_ties, s.n_missing), (2, 1, 1, 1));
    }

    #[test]
    fn all_agree() {
        let r = sign_test(&series(24, 0)).unwrap();
        assert_eq!(r.value, 2.0 * 0.5f64.powi(24));
        assert_eq!(r.direction, Direction::Predicted);
    }

    #[test]
    fn even_split() {
        let r = sign_test(&series(12, 12)).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.direction, Direction::None);
    }

    #[test]
    fn mostly_opposite() {
        let r = sign_test(&series(2, 22)).unwrap();
        // 2·(1 + 24 + 276)/2^24
        assert_eq!(r.value, 602.0 / 16_777_216.0);
        assert_eq!(r.direction, Direction::Opposite);
        assert!(r.value < 0.001);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(sign_test(&SignSeries::new("e")).is_err());
    }

    #[test]
    fn log_branch_matches_exact() {
        for n in [1u64, 7, 24, 60, 119, 120] {
            for k in 0..n {
                let (e, l) = (cdf_exact(n, k), cdf_log(n, k));
                assert!((e - l).abs() <= 1e-10 * e, "n={n} k={k}: {e} vs {l}");
            }
        }
        let p = binomial_half_cdf(2000, 1000);
        assert!((p - 0.5089).abs() < 1e-3);
        let far = binomial_half_cdf(2000, 900);
        assert!(far > 0.0 && far < 1e-5);
    }

    proptest! {
        #[test]
        fn permutation_invariant(signs in proptest::collection::vec(any::<bool>(), 1..60), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut s = SignSeries::new("p");
            s.signs = signs.iter().map(|b| if *b { Sign::Plus } else { Sign::Minus }).collect();
            let before = sign_test(&s).unwrap();
            s.signs.shuffle(&mut crate::rng::indexed_stream(seed, 0));
            prop_assert_eq!(sign_test(&s).unwrap(), before);
        }

        #[test]
        fn p_in_unit_interval(n in 1usize..400, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as usize;
            let r = sign_test(&series(k, n - k)).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.value));
        }
    }
}
