//! The similarity-coverage model of argument strength.
//!
//! A specific argument `P -> c` scores
//!
//! ```text
//! alpha * max_{p in P} sim(p, c) + (1 - alpha) / |C| * sum_{c_i in C} max_{p in P} sim(p, c_i)
//! ```
//!
//! and a general argument `P -> all C` scores only the coverage term,
//! `1/|C| * sum_{c_i in C} max_{p in P} sim(p, c_i)`. `C` is the full domain
//! and `sim` is read from the domain's similarity matrix after mapping it onto
//! `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::argument::{Argument, ArgumentPair, Conclusion};
use crate::error::{Error, Result};
use crate::similarity::{Scale, SimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScmParams {
    pub alpha: f64,
}

impl ScmParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Validation(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(ScmParams { alpha })
    }
}

impl Default for ScmParams {
    fn default() -> Self {
        ScmParams { alpha: 0.5 }
    }
}

/// A similarity matrix on the unit scale bundled with model parameters.
#[derive(Debug, Clone)]
pub struct ScmModel {
    matrix: SimilarityMatrix,
    params: ScmParams,
}

impl ScmModel {
    pub fn new(matrix: &SimilarityMatrix, params: ScmParams) -> Result<Self> {
        ScmParams::new(params.alpha)?;
        let matrix = if matrix.scale() == Scale::UNIT {
            matrix.clone()
        } else {
            matrix.normalize()?
        };
        Ok(ScmModel { matrix, params })
    }

    pub fn matrix(&self) -> &SimilarityMatrix {
        &self.matrix
    }

    pub fn params(&self) -> ScmParams {
        self.params
    }

    fn indices<S: AsRef<str>>(&self, premises: &[S]) -> Result<Vec<usize>> {
        if premises.is_empty() {
            return Err(Error::Validation("argument has no premises".into()));
        }
        premises
            .iter()
            .map(|p| self.matrix.index_of(p.as_ref()))
            .collect()
    }

    /// `max_{p in P} sim(p, target)`.
    pub fn max_similarity(&self, premises: &[usize], target: usize) -> f64 {
        premises
            .iter()
            .map(|&p| self.matrix.at(p, target))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean over the domain of each category's best premise match.
    pub fn coverage(&self, premises: &[usize]) -> f64 {
        let n = self.matrix.len();
        let total: f64 = (0..n).map(|c| self.max_similarity(premises, c)).sum();
        total / n as f64
    }

    pub fn specific_by_index(&self, premises: &[usize], conclusion: usize) -> f64 {
        let a = self.params.alpha;
        a * self.max_similarity(premises, conclusion) + (1.0 - a) * self.coverage(premises)
    }

    pub fn specific<S: AsRef<str>>(&self, premises: &[S], conclusion: &str) -> Result<f64> {
        let ps = self.indices(premises)?;
        let c = self.matrix.index_of(conclusion)?;
        Ok(self.specific_by_index(&ps, c))
    }

    pub fn general<S: AsRef<str>>(&self, premises: &[S]) -> Result<f64> {
        Ok(self.coverage(&self.indices(premises)?))
    }

    /// Dispatches on the conclusion kind. Arguments that reach outside the
    /// matrix (supplementary premises, a broader superordinate) have no score.
    pub fn strength(&self, argument: &Argument) -> Result<f64> {
        let domain = self.matrix.domain();
        if argument.domain != domain.name {
            return Err(Error::NotComputable(format!(
                "argument belongs to {} but the matrix covers {}",
                argument.domain, domain.name
            )));
        }
        let outside: Vec<&str> = argument
            .premises
            .iter()
            .filter(|p| !domain.contains(p))
            .map(String::as_str)
            .collect();
        if !outside.is_empty() {
            return Err(Error::NotComputable(format!(
                "premises outside the {} matrix: {}",
                domain.name,
                outside.join(", ")
            )));
        }
        match &argument.conclusion {
            Conclusion::Specific(c) => {
                if !domain.contains(c) {
                    return Err(Error::NotComputable(format!("conclusion `{c}` outside the matrix")));
                }
                self.specific(&argument.premises, c)
            }
            Conclusion::General(label) => {
                if *label != domain.superordinate {
                    return Err(Error::NotComputable(format!(
                        "conclusion class `{label}` is not the domain `{}`",
                        domain.superordinate
                    )));
                }
                self.general(&argument.premises)
            }
        }
    }

    /// `strength(stronger) - strength(weaker)`; positive when the model
    /// agrees with the theoretical direction.
    pub fn disparity(&self, pair: &ArgumentPair) -> Result<f64> {
        Ok(self.strength(&pair.stronger)? - self.strength(&pair.weaker)?)
    }
}

pub fn scm_specific<S: AsRef<str>>(
    premises: &[S],
    conclusion: &str,
    matrix: &SimilarityMatrix,
    params: ScmParams,
) -> Result<f64> {
    ScmModel::new(matrix, params)?.specific(premises, conclusion)
}

pub fn scm_general<S: AsRef<str>>(premises: &[S], matrix: &SimilarityMatrix) -> Result<f64> {
    ScmModel::new(matrix, ScmParams::default())?.general(premises)
}

pub fn scm_strength(argument: &Argument, matrix: &SimilarityMatrix, params: ScmParams) -> Result<f64> {
    ScmModel::new(matrix, params)?.strength(argument)
}

pub fn scm_disparity(pair: &ArgumentPair, matrix: &SimilarityMatrix, params: ScmParams) -> Result<f64> {
    ScmModel::new(matrix, params)?.disparity(pair)
}

/// Ranks by descending value, 1 = largest; equal values share the smallest
/// rank of their group ("1, 2, 2, 4").
pub fn min_ranks_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0; values.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = if pos > 0 && values[order[pos - 1]] == values[idx] {
            ranks[order[pos - 1]]
        } else {
            pos + 1
        };
    }
    ranks
}

pub fn rank_arguments(arguments: &[Argument], matrix: &SimilarityMatrix, params: ScmParams) -> Result<Vec<usize>> {
    let model = ScmModel::new(matrix, params)?;
    let strengths = arguments
        .iter()
        .map(|a| model.strength(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(min_ranks_descending(&strengths))
}
