//! Bootstrap comparison of two models' correlations with human data.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rank::spearman;
use super::{Direction, StatKind, StatResult};
use crate::error::{Error, Result};
use crate::rng;

/// Redraws allowed per resample before giving up on degenerate data.
pub const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// (wins + ties/2) / resamples, where a win is ρ(a, h) > ρ(b, h).
    pub proportion: f64,
    /// wins / resamples.
    pub strict: f64,
    pub ties: usize,
    pub resamples: usize,
    pub seed: u64,
}

impl BootstrapOutcome {
    pub fn to_result(&self) -> StatResult {
        let direction = if self.proportion > 0.5 {
            Direction::Predicted
        } else if self.proportion < 0.5 {
            Direction::Opposite
        } else {
            Direction::None
        };
        StatResult {
            seed: Some(self.seed),
            resamples: Some(self.resamples),
            ..StatResult::new(StatKind::BootstrapProportion, self.proportion, direction, self.resamples)
        }
    }
}

/// Resamples stimuli with replacement and counts how often `pred_a`
/// correlates better with `human` than `pred_b` does. Resample `i` draws
/// from sub-stream `i` of `seed`; a resample in which any of the three
/// series has no rank variance is redrawn.
pub fn bootstrap_compare(
    pred_a: &[f64],
    pred_b: &[f64],
    human: &[f64],
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapOutcome> {
    let n = human.len();
    if pred_a.len() != n || pred_b.len() != n {
        return Err(Error::Validation(format!(
            "misaligned inputs: {} / {} / {} stimuli",
            pred_a.len(),
            pred_b.len(),
            n
        )));
    }
    if n < 3 || n_resamples == 0 {
        return Err(Error::Validation("bootstrap needs at least 3 stimuli and 1 resample".into()));
    }
    let (mut wins, mut ties) = (0usize, 0usize);
    let (mut a, mut b, mut h) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n_resamples {
        let mut rng = rng::indexed_stream(seed, i as u64);
        let mut done = false;
        for _ in 0..MAX_REDRAWS {
            for k in 0..n {
                let j = rng.gen_range(0..n);
                a[k] = pred_a[j];
                b[k] = pred_b[j];
                h[k] = human[j];
            }
            let (ra, rb) = match (spearman(&a, &h), spearman(&b, &h)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(Error::Degenerate(_)), _) | (_, Err(Error::Degenerate(_))) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            if ra > rb {
                wins += 1;
            } else if ra == rb {
                ties += 1;
            }
            done = true;
            break;
        }
        if !done {
            return Err(Error::Degenerate(format!(
                "resample {i}: no variance after {MAX_REDRAWS} redraws"
            )));
        }
    }
    let total = n_resamples as f64;
    Ok(BootstrapOutcome {
        proportion: (wins as f64 + ties as f64 / 2.0) / total,
        strict: wins as f64 / total,
        ties,
        resamples: n_resamples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn series(seed: u64, n: usize) -> Vec<f64> {
        let mut r = rng::indexed_stream(seed, 77);
        (0..n).map(|_| r.gen_range(0.0..100.0)).collect()
    }

    #[test]
    fn dominance() {
        let h = series(1, 50);
        let rev: Vec<f64> = h.iter().map(|v| -v).collect();
        let o = bootstrap_compare(&h, &rev, &h, 200, 4).unwrap();
        assert_eq!(o.proportion, 1.0);
        assert_eq!(o.strict, 1.0);
    }

    #[test]
    fn identical_models_split_evenly() {
        let h = series(2, 40);
        let a = series(3, 40);
        let o = bootstrap_compare(&a, &a, &h, 1000, 8).unwrap();
        assert_eq!(o.proportion, 0.5);
        assert_eq!(o.ties, 1000);
    }

    #[test]
    fn swapped_arguments_complement() {
        let h = series(4, 30);
        let a: Vec<f64> = h.iter().zip(series(5, 30)).map(|(x, e)| x + e).collect();
        let b = series(6, 30);
        let ab = bootstrap_compare(&a, &b, &h, 500, 12).unwrap();
        let ba = bootstrap_compare(&b, &a, &h, 500, 12).unwrap();
        let tie_frac = ab.ties as f64 / 500.0;
        assert!((ab.strict + ba.strict - (1.0 - tie_frac)).abs() < 1e-12);
        assert!((ab.proportion + ba.proportion - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_human_is_degenerate() {
        let a = series(7, 10);
        assert!(bootstrap_compare(&a, &a, &[1.0; 10], 5, 0).is_err());
    }
}
