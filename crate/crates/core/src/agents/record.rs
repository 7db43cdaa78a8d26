//! One judgment from an agent or a person.

use serde::{Deserialize, Serialize};

use crate::prompts::{LabelOrder, ResponseKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgmentKind {
    /// A preference between the two arguments of a pair.
    Pair,
    /// A strength rating for a single argument.
    Rating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenProb {
    pub token: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub agent_id: String,
    pub stimulus_id: String,
    pub kind: JudgmentKind,
    pub prompt_spec: String,
    pub response_kind: ResponseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_order: Option<LabelOrder>,
    pub raw_text: String,
    /// Parsed from the reply text, on the scale of the response kind and in
    /// the label space of the prompt (A = 1).
    pub parsed_score: Option<f64>,
    /// Probability-weighted score where token probabilities are available,
    /// or a model-derived value.
    pub derived_score: Option<f64>,
    /// Likert weighting without normalization, kept for comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_score_raw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_details: Option<Vec<TokenProb>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub practice_responses: Vec<String>,
    /// Set on failed records: transport failures, unparseable replies or
    /// stimuli the agent cannot score.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl JudgmentRecord {
    pub fn new(
        agent_id: &str,
        stimulus_id: &str,
        kind: JudgmentKind,
        prompt_spec: &str,
        response_kind: ResponseKind,
        label_order: Option<LabelOrder>,
    ) -> Self {
        JudgmentRecord {
            agent_id: agent_id.into(),
            stimulus_id: stimulus_id.into(),
            kind,
            prompt_spec: prompt_spec.into(),
            response_kind,
            label_order,
            raw_text: String::new(),
            parsed_score: None,
            derived_score: None,
            derived_score_raw: None,
            timestamp: None,
            token_details: None,
            practice_responses: Vec::new(),
            error: None,
        }
    }

    pub fn failed(mut self, tag: &str, detail: impl std::fmt::Display) -> Self {
        self.error = Some(format!("{tag}: {detail}"));
        self
    }

    /// The score used downstream: the derived score when present.
    pub fn score(&self) -> Option<f64> {
        self.derived_score.or(self.parsed_score)
    }

    pub fn is_success(&self) -> bool {
        self.score().is_some()
    }

    /// Key for at-most-once recording.
    pub fn key(&self) -> String {
        let order = match self.label_order {
            Some(LabelOrder::StrongerFirst) => "sf",
            Some(LabelOrder::WeakerFirst) => "wf",
            None => "-",
        };
        format!("{}|{}|{}|{order}", self.agent_id, self.stimulus_id, self.prompt_spec)
    }

    /// Pair preference re-expressed so that positive values favour the
    /// theoretically stronger argument and 0 is the scale midpoint.
    pub fn centered_preference(&self) -> Option<f64> {
        let s = self.score()?;
        let order = self.label_order?;
        let (canonical, mid) = match self.response_kind {
            ResponseKind::Choice => (order.canonical(s), 3.5),
            ResponseKind::Number => match order {
                LabelOrder::WeakerFirst => (s, 50.0),
                LabelOrder::StrongerFirst => (100.0 - s, 50.0),
            },
        };
        Some(canonical - mid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(kind: ResponseKind, order: LabelOrder, score: f64) -> JudgmentRecord {
        let mut r = JudgmentRecord::new("a", "s", JudgmentKind::Pair, "S1-C1-A1-Q1-O1", kind, Some(order));
        r.parsed_score = Some(score);
        r
    }

    #[test]
    fn centered_preference_follows_label_order() {
        assert_eq!(rec(ResponseKind::Choice, LabelOrder::WeakerFirst, 6.0).centered_preference(), Some(2.5));
        assert_eq!(rec(ResponseKind::Choice, LabelOrder::StrongerFirst, 6.0).centered_preference(), Some(-2.5));
        assert_eq!(rec(ResponseKind::Choice, LabelOrder::StrongerFirst, 3.5).centered_preference(), Some(0.0));
        assert_eq!(rec(ResponseKind::Number, LabelOrder::StrongerFirst, 20.0).centered_preference(), Some(30.0));
    }

    #[test]
    fn json_round_trip() {
        let mut r = rec(ResponseKind::Choice, LabelOrder::WeakerFirst, 2.0);
        r.token_details = Some(vec![TokenProb {
            token: "B".into(),
            prob: 0.25,
        }]);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<JudgmentRecord>(&s).unwrap(), r);
    }
}
