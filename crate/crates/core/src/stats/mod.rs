//! Sign tests, rank correlation, split-half reliability and bootstrap model
//! comparison.

pub mod bootstrap;
pub mod rank;
pub mod reliability;
pub mod sign;

use serde::{Deserialize, Serialize};

pub use bootstrap::{bootstrap_compare, BootstrapOutcome};
pub use rank::{average_ranks, pearson, spearman};
pub use reliability::{split_half_reliability, ReliabilityOptions};
pub use sign::{recode_pair, sign_test, Sign, SignSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    SignP,
    Rho,
    Reliability,
    BootstrapProportion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Predicted,
    Opposite,
    None,
}

impl Direction {
    /// Table marker for a significant result: `*` predicted, `∘` opposite.
    pub fn marker(self, p: f64, alpha: f64) -> &'static str {
        match self {
            _ if p >= alpha => "",
            Direction::Predicted => "*",
            Direction::Opposite => "∘",
            Direction::None => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub kind: StatKind,
    pub value: f64,
    pub direction: Direction,
    pub n: usize,
    /// Standard error, where the statistic has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resamples: Option<usize>,
}

impl StatResult {
    pub fn new(kind: StatKind, value: f64, direction: Direction, n: usize) -> Self {
        StatResult {
            kind,
            value,
            direction,
            n,
            se: None,
            seed: None,
            resamples: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markers() {
        assert_eq!(Direction::Predicted.marker(0.0001, 0.05), "*");
        assert_eq!(Direction::Opposite.marker(0.01, 0.05), "∘");
        assert_eq!(Direction::Predicted.marker(0.2, 0.05), "");
    }
}
