//! Deterministic agents whose replies come from a fixed script.

use serde::{Deserialize, Serialize};

use super::record::{JudgmentKind, JudgmentRecord};
use super::Agent;
use crate::argument::{Argument, ArgumentPair};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::prompts::{parse_choice, parse_rating, parse_similarity, LabelOrder, PromptEnv, PromptSpec, ResponseKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Script {
    /// The same reply every time.
    Constant { reply: String },
    /// Cycles through `replies`, indexed by the number at the end of the
    /// stimulus ID (so the cycle does not depend on call order).
    Alternate {
        replies: Vec<String>,
        /// Pair replies are written as if the stronger argument were
        /// labelled A and mirrored (A↔F, x↔100−x) when it is not.
        #[serde(default)]
        oriented: bool,
    },
}

pub struct ScriptedAgent {
    id: String,
    script: Script,
}

impl ScriptedAgent {
    pub fn new(id: &str, script: Script) -> Result<Self> {
        if let Script::Alternate { replies, .. } = &script {
            if replies.is_empty() {
                return Err(Error::Validation(format!("scripted agent `{id}` has no replies")));
            }
        }
        Ok(ScriptedAgent { id: id.into(), script })
    }

    fn reply(&self, key: &str) -> &str {
        match &self.script {
            Script::Constant { reply } => reply,
            Script::Alternate { replies, .. } => {
                let digits: String = key
                    .chars()
                    .rev()
                    .take_while(char::is_ascii_digit)
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                    .collect();
                let n: usize = digits.parse().unwrap_or(0);
                &replies[n % replies.len()]
            }
        }
    }

    fn oriented(&self) -> bool {
        matches!(self.script, Script::Alternate { oriented: true, .. })
    }
}

fn parse(kind: ResponseKind, text: &str) -> Result<f64> {
    match kind {
        ResponseKind::Choice => parse_choice(text).map(f64::from),
        ResponseKind::Number => parse_rating(text),
    }
}

fn fill(mut rec: JudgmentRecord, text: &str, parsed: Result<f64>) -> JudgmentRecord {
    rec.raw_text = text.to_string();
    match parsed {
        Ok(v) => rec.parsed_score = Some(v),
        Err(e) => rec = rec.failed("unparseable", e),
    }
    rec
}

impl Agent for ScriptedAgent {
    fn id(&self) -> &str {
        &self.id
    }

    fn judge_pair(&self, pair: &ArgumentPair, spec: &PromptSpec, order: LabelOrder, _env: &PromptEnv) -> JudgmentRecord {
        let kind = spec.response_kind();
        let rec = JudgmentRecord::new(&self.id, &pair.pair_id, JudgmentKind::Pair, &spec.id(), kind, Some(order));
        let text = self.reply(&pair.pair_id);
        let mut parsed = parse(kind, text);
        if self.oriented() && order == LabelOrder::WeakerFirst {
            parsed = parsed.map(|v| match kind {
                ResponseKind::Choice => 7.0 - v,
                ResponseKind::Number => 100.0 - v,
            });
        }
        fill(rec, text, parsed)
    }

    fn rate_argument(
        &self,
        stimulus_id: &str,
        _argument: &Argument,
        spec: &PromptSpec,
        _env: &PromptEnv,
    ) -> JudgmentRecord {
        let kind = spec.response_kind();
        let rec = JudgmentRecord::new(&self.id, stimulus_id, JudgmentKind::Rating, &spec.id(), kind, None);
        let text = self.reply(stimulus_id);
        fill(rec, text, parse(kind, text))
    }

    fn elicit_similarity(&self, _domain: &Domain, a: &str, b: &str, _env: &PromptEnv) -> Result<f64> {
        parse_similarity(self.reply(&format!("{a}|{b}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argument::Phenomenon;
    use crate::store::packaged;

    fn pair(id: &str, store: &crate::NormStore) -> ArgumentPair {
        let m = store.domain("Mammals").unwrap();
        ArgumentPair {
            pair_id: id.into(),
            phenomenon: Phenomenon::Typicality,
            domain: "Mammals".into(),
            stronger: Argument::general(&["dog"], m).unwrap(),
            weaker: Argument::general(&["hedgehog"], m).unwrap(),
        }
    }

    #[test]
    fn constant_f_is_six() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let agent = ScriptedAgent::new("f", Script::Constant { reply: "F".into() }).unwrap();
        for order in [LabelOrder::StrongerFirst, LabelOrder::WeakerFirst] {
            let r = agent.judge_pair(&pair("x-01", &store), &PromptSpec::exp1_best(), order, &env);
            assert_eq!(r.parsed_score, Some(6.0));
        }
    }

    #[test]
    fn constant_fifty_rating() {
        let store = packaged::exp2().unwrap();
        let env = PromptEnv::packaged(&store);
        let agent = ScriptedAgent::new("c", Script::Constant { reply: "50".into() }).unwrap();
        let a = Argument::general(&["dog"], store.domain("Mammals").unwrap()).unwrap();
        assert_eq!(agent.rate_argument("s", &a, &PromptSpec::exp2_best(), &env).parsed_score, Some(50.0));
        let m = store.domain("Mammals").unwrap();
        let echo = ScriptedAgent::new("e", Script::Constant { reply: "20".into() }).unwrap();
        assert_eq!(echo.elicit_similarity(m, "dog", "dog", &env).unwrap(), 20.0);
    }

    #[test]
    fn alternate_is_balanced_in_canonical_space() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let agent = ScriptedAgent::new(
            "alt",
            Script::Alternate {
                replies: vec!["A".into(), "F".into()],
                oriented: true,
            },
        )
        .unwrap();
        let mut plus = 0;
        for i in 1..=24 {
            let order = if i % 3 == 0 { LabelOrder::WeakerFirst } else { LabelOrder::StrongerFirst };
            let r = agent.judge_pair(&pair(&format!("m-t-{i:02}"), &store), &PromptSpec::exp1_best(), order, &env);
            if r.centered_preference().unwrap() > 0.0 {
                plus += 1;
            }
        }
        assert_eq!(plus, 12);
    }

    #[test]
    fn unparseable_reply_has_null_scores() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let agent = ScriptedAgent::new("x", Script::Constant { reply: "no idea".into() }).unwrap();
        let r = agent.judge_pair(&pair("p", &store), &PromptSpec::exp1_best(), LabelOrder::StrongerFirst, &env);
        assert_eq!(r.score(), None);
        assert!(r.error.unwrap().starts_with("unparseable"));
    }
}
