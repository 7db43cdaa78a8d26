//! Split-half reliability of rater panels.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rank::spearman;
use super::{Direction, StatKind, StatResult};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityOptions {
    pub n_splits: usize,
    pub seed: u64,
    /// Step the half-panel correlation up to full length with
    /// Spearman-Brown, 2r/(1+r).
    pub spearman_brown: bool,
}

impl Default for ReliabilityOptions {
    fn default() -> Self {
        ReliabilityOptions {
            n_splits: 100,
            seed: 0,
            spearman_brown: false,
        }
    }
}

fn cmp_column(a: &[Option<f64>], b: &[Option<f64>]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = match (x, y) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, Some(_)) => std::cmp::Ordering::Less,
            (Some(_), None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.total_cmp(y),
        };
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Mean Spearman correlation between the per-stimulus mean ratings of two
/// random rater halves, with its standard error over splits.
///
/// `ratings[s][r]` is rater `r`'s rating of stimulus `s`, or `None` when
/// they did not see it. Raters are put in a canonical order first so the
/// result does not depend on how they are numbered. With an odd panel the
/// extra rater joins a random half. A split in which some stimulus has no
/// rating in one half, or whose means have no variance, is skipped.
pub fn split_half_reliability(ratings: &[Vec<Option<f64>>], options: ReliabilityOptions) -> Result<StatResult> {
    let n_raters = ratings.first().map_or(0, Vec::len);
    if ratings.iter().any(|r| r.len() != n_raters) {
        return Err(Error::Validation("every stimulus row needs one entry per rater".into()));
    }
    let short: Vec<String> = ratings
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().flatten().count() < 2)
        .map(|(i, _)| i.to_string())
        .collect();
    if !short.is_empty() {
        return Err(Error::Validation(format!(
            "stimuli with fewer than 2 raters: {}",
            short.join(", ")
        )));
    }
    if options.n_splits == 0 {
        return Err(Error::Validation("at least one split is needed".into()));
    }

    let mut columns: Vec<Vec<Option<f64>>> = (0..n_raters)
        .map(|r| ratings.iter().map(|row| row[r]).collect())
        .collect();
    columns.sort_by(|a, b| cmp_column(a, b));

    let mut values = Vec::with_capacity(options.n_splits);
    for split in 0..options.n_splits {
        let mut rng = rng::indexed_stream(options.seed, split as u64);
        let mut order: Vec<usize> = (0..n_raters).collect();
        order.shuffle(&mut rng);
        let mut cut = n_raters / 2;
        if n_raters % 2 == 1 && rng.gen_bool(0.5) {
            cut += 1;
        }
        let (left, right) = order.split_at(cut);
        let half_means = |half: &[usize]| -> Option<Vec<f64>> {
            (0..ratings.len())
                .map(|s| {
                    let vals: Vec<f64> = half.iter().filter_map(|&r| columns[r][s]).collect();
                    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
                })
                .collect()
        };
        let (Some(a), Some(b)) = (half_means(left), half_means(right)) else {
            continue;
        };
        match spearman(&a, &b) {
            Ok(r) => values.push(if options.spearman_brown { 2.0 * r / (1.0 + r) } else { r }),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if values.is_empty() {
        return Err(Error::Degenerate("no split produced a defined correlation".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(StatResult {
        se: Some(se),
        seed: Some(options.seed),
        resamples: Some(values.len()),
        ..StatResult::new(StatKind::Reliability, mean, Direction::None, ratings.len())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn table(raters: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
        (0..raters[0].len())
            .map(|s| raters.iter().map(|r| Some(r[s])).collect())
            .collect()
    }

    #[test]
    fn identical_raters() {
        let v = vec![1.0, 5.0, 3.0, 2.0, 4.0];
        let r = split_half_reliability(&table(&[v.clone(), v.clone(), v.clone(), v]), Default::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.se, Some(0.0));
    }

    #[test]
    fn reversed_pair() {
        let r = split_half_reliability(
            &table(&[vec![1.0, 2.0, 3.0, 4.0], vec![4.0, 3.0, 2.0, 1.0]]),
            Default::default(),
        )
        .unwrap();
        assert_eq!(r.value, -1.0);
    }

    #[test]
    fn too_few_raters_named() {
        let t = vec![vec![Some(1.0), Some(2.0)], vec![Some(1.0), None], vec![None, None]];
        let e = split_half_reliability(&t, Default::default()).unwrap_err().to_string();
        assert!(e.contains("1, 2"), "{e}");
    }

    fn panel(n_raters: usize, seed: u64) -> Vec<Vec<Option<f64>>> {
        let mut rng = rng::indexed_stream(seed, 999);
        let signal: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let noise = Normal::new(0.0, 15.0).unwrap();
        let raters: Vec<Vec<f64>> = (0..n_raters)
            .map(|_| signal.iter().map(|s| s + noise.sample(&mut rng)).collect())
            .collect();
        table(&raters)
    }

    #[test]
    fn more_raters_more_reliable() {
        let opts = ReliabilityOptions {
            n_splits: 100,
            seed: 3,
            spearman_brown: false,
        };
        let r: Vec<f64> = [2, 4, 8]
            .iter()
            .map(|&n| {
                (0..20)
                    .map(|p| split_half_reliability(&panel(n, p), opts).unwrap().value)
                    .sum::<f64>()
                    / 20.0
            })
            .collect();
        assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
    }

    #[test]
    fn relabeling_raters_changes_nothing() {
        let t = panel(7, 5);
        let mut shuffled = t.clone();
        for row in &mut shuffled {
            row.reverse();
            row.swap(0, 3);
        }
        let o = ReliabilityOptions {
            n_splits: 50,
            seed: 9,
            spearman_brown: true,
        };
        assert_eq!(split_half_reliability(&t, o).unwrap(), split_half_reliability(&shuffled, o).unwrap());
    }
}
