//! A language model reached through a [`Transport`].

use serde::{Deserialize, Serialize};

use super::record::{JudgmentKind, JudgmentRecord, TokenProb};
use super::scoring::{likert_weighted_score, locate_answer, numeric_weighted_score_bounded, TokenDistribution, OPTION_TOKENS};
use super::transport::{GeneratedToken, Payload, Request, Response, Transport};
use super::{Agent, AgentConfig};
use crate::argument::{Argument, ArgumentPair};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::prompts::{
    compose_pair_prompt, compose_practice_prompt, compose_rating_prompt, parse_choice, parse_rating, parse_similarity,
    similarity_prompt, LabelOrder, PromptEnv, PromptSpec, RenderedPrompt, ResponseKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemoteStyle {
    /// Role-tagged messages; replies are parsed from text.
    Chat,
    /// One prompt string with token log probabilities; replies are scored by
    /// probability weighting.
    Completion,
}

/// Alternatives requested per generated token.
pub const LOGPROBS: u8 = 5;

pub struct RemoteAgent<T> {
    id: String,
    style: RemoteStyle,
    model: String,
    temperature: f64,
    pair_tokens: u32,
    rating_tokens: u32,
    transport: T,
}

impl<T: Transport> RemoteAgent<T> {
    pub fn new(config: &AgentConfig, style: RemoteStyle, transport: T) -> Result<Self> {
        config.validate()?;
        Ok(RemoteAgent {
            id: config.id.clone(),
            style,
            model: config.model.clone(),
            temperature: config.temperature,
            pair_tokens: config.max_response_tokens,
            rating_tokens: config.rating_tokens(),
            transport,
        })
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn request(&self, prompt: &RenderedPrompt, max_tokens: u32) -> Request {
        match self.style {
            RemoteStyle::Chat => Request::Chat {
                model: self.model.clone(),
                messages: prompt.chat_messages(),
                temperature: self.temperature,
                max_tokens,
            },
            RemoteStyle::Completion => Request::Completion {
                model: self.model.clone(),
                prompt: prompt.completion_text(),
                temperature: self.temperature,
                max_tokens,
                logprobs: LOGPROBS,
            },
        }
    }

    fn plain_request(&self, text: String, max_tokens: u32) -> Request {
        match self.style {
            RemoteStyle::Chat => Request::Chat {
                model: self.model.clone(),
                messages: vec![crate::prompts::ChatMessage::user(text)],
                temperature: self.temperature,
                max_tokens,
            },
            RemoteStyle::Completion => Request::Completion {
                model: self.model.clone(),
                prompt: text,
                temperature: self.temperature,
                max_tokens,
                logprobs: LOGPROBS,
            },
        }
    }

    /// Runs the two practice trials in sequence, feeding back each reply.
    fn practice(&self, argument: &Argument, spec: &PromptSpec, env: &PromptEnv) -> Result<Vec<String>> {
        let mut answers = Vec::new();
        for step in 0..2 {
            let prompt = compose_practice_prompt(argument, spec, step, &answers, env)?;
            let resp = self.transport.send(&self.request(&prompt, self.rating_tokens))?;
            let text = resp
                .reply_text()
                .ok_or_else(|| Error::Transport("practice reply has no text".into()))?;
            answers.push(text.trim().to_string());
        }
        Ok(answers)
    }
}

fn answer_distribution(tokens: &[GeneratedToken], numeric: bool) -> Result<TokenDistribution> {
    let texts: Vec<String> = tokens.iter().map(|t| t.token.clone()).collect();
    let pos = locate_answer(&texts, numeric)
        .ok_or_else(|| Error::Derivation("no answer token in the completion".into()))?;
    TokenDistribution::from_logprobs(pos, &tokens[pos].top_logprobs)
}

fn details(dist: &TokenDistribution) -> Vec<TokenProb> {
    dist.entries().to_vec()
}

/// Fills the record's text, parsed and derived scores from a reply.
fn score_reply(mut rec: JudgmentRecord, resp: &Response, kind: ResponseKind) -> JudgmentRecord {
    rec.timestamp = resp.timestamp.clone();
    let Some(text) = resp.reply_text() else {
        return rec.failed("transport", "reply has no text");
    };
    rec.raw_text = text.to_string();
    let parsed = match kind {
        ResponseKind::Choice => parse_choice(text).map(f64::from),
        ResponseKind::Number => parse_rating(text),
    };
    rec.parsed_score = parsed.as_ref().ok().copied();
    let mut derivation_error = None;
    if let Payload::Completion { tokens, .. } = &resp.payload {
        let derived = answer_distribution(tokens, kind == ResponseKind::Number).and_then(|dist| {
            rec.token_details = Some(details(&dist));
            match kind {
                ResponseKind::Choice => likert_weighted_score(&dist, &OPTION_TOKENS).map(|s| (s.normalized, Some(s.raw))),
                ResponseKind::Number => numeric_weighted_score_bounded(&dist, 100).map(|v| (v, None)),
            }
        });
        match derived {
            Ok((v, raw)) => {
                rec.derived_score = Some(v);
                rec.derived_score_raw = raw;
            }
            Err(e) => derivation_error = Some(e),
        }
    }
    if !rec.is_success() {
        let why = derivation_error.map_or_else(|| parsed.err().map(|e| e.to_string()).unwrap_or_default(), |e| e.to_string());
        rec = rec.failed("unparseable", why);
    }
    rec
}

impl<T: Transport> Agent for RemoteAgent<T> {
    fn id(&self) -> &str {
        &self.id
    }

    fn judge_pair(&self, pair: &ArgumentPair, spec: &PromptSpec, order: LabelOrder, env: &PromptEnv) -> JudgmentRecord {
        let kind = spec.response_kind();
        let rec = JudgmentRecord::new(&self.id, &pair.pair_id, JudgmentKind::Pair, &spec.id(), kind, Some(order));
        let prompt = match compose_pair_prompt(pair, spec, order, env) {
            Ok(p) => p,
            Err(e) => return rec.failed("prompt", e),
        };
        match self.transport.send(&self.request(&prompt, self.pair_tokens)) {
            Ok(resp) => score_reply(rec, &resp, kind),
            Err(e) => rec.failed("transport", e),
        }
    }

    fn rate_argument(&self, stimulus_id: &str, argument: &Argument, spec: &PromptSpec, env: &PromptEnv) -> JudgmentRecord {
        let kind = spec.response_kind();
        let mut rec = JudgmentRecord::new(&self.id, stimulus_id, JudgmentKind::Rating, &spec.id(), kind, None);
        let answers = if spec.uses_practice() {
            match self.practice(argument, spec, env) {
                Ok(a) => Some(a),
                Err(e) => return rec.failed("practice", e),
            }
        } else {
            None
        };
        let prompt = match compose_rating_prompt(argument, spec, answers.as_deref(), env) {
            Ok(p) => p,
            Err(e) => return rec.failed("prompt", e),
        };
        rec.practice_responses = answers.unwrap_or_default();
        match self.transport.send(&self.request(&prompt, self.rating_tokens)) {
            Ok(resp) => score_reply(rec, &resp, kind),
            Err(e) => rec.failed("transport", e),
        }
    }

    fn elicit_similarity(&self, domain: &Domain, a: &str, b: &str, env: &PromptEnv) -> Result<f64> {
        let text = similarity_prompt(&domain.superordinate, a, b, env)?;
        let resp = self.transport.send(&self.plain_request(text, self.rating_tokens))?;
        match &resp.payload {
            Payload::Completion { tokens, .. } => numeric_weighted_score_bounded(&answer_distribution(tokens, true)?, 20),
            Payload::Text { text } => parse_similarity(text),
            Payload::Embedding { .. } => Err(Error::Transport("embedding payload for a similarity prompt".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::transport::ScriptedTransport;
    use crate::agents::AgentKind;
    use crate::argument::Phenomenon;
    use crate::store::packaged;
    use std::sync::Arc;

    fn config(kind: AgentKind) -> AgentConfig {
        AgentConfig {
            model: "m".into(),
            ..AgentConfig::new("remote", kind)
        }
    }

    fn pair(store: &crate::NormStore) -> ArgumentPair {
        let m = store.domain("Mammals").unwrap();
        ArgumentPair {
            pair_id: "mammals-typicality-01".into(),
            phenomenon: Phenomenon::Typicality,
            domain: "Mammals".into(),
            stronger: Argument::general(&["dog"], m).unwrap(),
            weaker: Argument::general(&["hedgehog"], m).unwrap(),
        }
    }

    fn completion(tokens: &[(&str, &[(&str, f64)])]) -> Response {
        Response {
            payload: Payload::Completion {
                text: tokens.iter().map(|t| t.0).collect(),
                tokens: tokens
                    .iter()
                    .map(|(t, top)| GeneratedToken {
                        token: t.to_string(),
                        top_logprobs: top.iter().map(|(s, p)| (s.to_string(), p.ln())).collect(),
                    })
                    .collect(),
            },
            timestamp: Some("1.000".into()),
        }
    }

    #[test]
    fn chat_reply_is_parsed() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let t = ScriptedTransport::constant("Dogs are more typical, so the first argument wins.\n\nA");
        let agent = RemoteAgent::new(&config(AgentKind::RemoteChat), RemoteStyle::Chat, t).unwrap();
        let r = agent.judge_pair(&pair(&store), &PromptSpec::exp1_best(), LabelOrder::StrongerFirst, &env);
        assert_eq!(r.parsed_score, Some(1.0));
        assert_eq!(r.derived_score, None);
        assert_eq!(r.label_order, Some(LabelOrder::StrongerFirst));
    }

    #[test]
    fn completion_reply_is_weighted() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let t = ScriptedTransport::new(|r| {
            assert!(matches!(r, Request::Completion { logprobs: 5, .. }));
            Ok(completion(&[
                ("Answer", &[("Answer", 0.9)]),
                (":", &[(":", 1.0)]),
                (" A", &[(" A", 0.7), (" B", 0.2), (" F", 0.1)]),
            ]))
        });
        let agent = RemoteAgent::new(&config(AgentKind::RemoteCompletion), RemoteStyle::Completion, t).unwrap();
        let r = agent.judge_pair(&pair(&store), &PromptSpec::exp1_best(), LabelOrder::StrongerFirst, &env);
        assert!((r.derived_score.unwrap() - 1.7).abs() < 1e-9);
        assert_eq!(r.parsed_score, Some(1.0));
        assert_eq!(r.token_details.as_ref().unwrap().len(), 3);
        assert_eq!(r.timestamp.as_deref(), Some("1.000"));
    }

    #[test]
    fn completion_rating_uses_top_five_numbers() {
        let store = packaged::exp2().unwrap();
        let env = PromptEnv::packaged(&store);
        let t = ScriptedTransport::new(|_| {
            Ok(completion(&[(
                "80",
                &[("80", 0.5), ("70", 0.3), ("90", 0.1), ("60", 0.05), ("100", 0.05)],
            )]))
        });
        let agent = RemoteAgent::new(&config(AgentKind::RemoteCompletion), RemoteStyle::Completion, t).unwrap();
        let a = Argument::general(&["dog"], store.domain("Mammals").unwrap()).unwrap();
        let spec = PromptSpec::parse(crate::stimuli::Experiment::Exp2, "S3-C1-A1-Q1-O1-T2").unwrap();
        let r = agent.rate_argument("mammals-general-1p-001", &a, &spec, &env);
        assert!((r.derived_score.unwrap() - 78.0).abs() < 1e-9);
    }

    #[test]
    fn practice_replies_feed_the_final_prompt() {
        let store = packaged::exp2().unwrap();
        let env = PromptEnv::packaged(&store);
        let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
        let s = seen.clone();
        let t = ScriptedTransport::new(move |r| {
            let Request::Chat { messages, .. } = r else { unreachable!() };
            s.lock().unwrap().push(messages.len());
            Ok(Response::text(["70", "55", "82"][messages.len() / 2 - 1]))
        });
        let agent = RemoteAgent::new(&config(AgentKind::RemoteChat), RemoteStyle::Chat, t).unwrap();
        let a = Argument::general(&["dog"], store.domain("Mammals").unwrap()).unwrap();
        let r = agent.rate_argument("x", &a, &PromptSpec::exp2_best(), &env);
        // system + 1, system + 3, system + 5 messages.
        assert_eq!(*seen.lock().unwrap(), [2, 4, 6]);
        assert_eq!(r.practice_responses, ["70", "55"]);
        assert_eq!(r.parsed_score, Some(82.0));
    }

    #[test]
    fn transport_failure_is_a_failed_record() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let t = ScriptedTransport::new(|_| Err(Error::Transport("down".into())));
        let agent = RemoteAgent::new(&config(AgentKind::RemoteChat), RemoteStyle::Chat, t).unwrap();
        let r = agent.judge_pair(&pair(&store), &PromptSpec::exp1_best(), LabelOrder::WeakerFirst, &env);
        assert!(r.error.as_deref().unwrap().starts_with("transport"));
        assert_eq!(r.score(), None);
    }

    #[test]
    fn similarity_from_completion_and_chat() {
        let store = packaged::exp1().unwrap();
        let env = PromptEnv::packaged(&store);
        let m = store.domain("Mammals").unwrap();
        let t = ScriptedTransport::new(|_| Ok(completion(&[(" 15", &[(" 15", 0.5), (" 10", 0.5)])])));
        let agent = RemoteAgent::new(&config(AgentKind::RemoteCompletion), RemoteStyle::Completion, t).unwrap();
        assert!((agent.elicit_similarity(m, "dog", "wolf", &env).unwrap() - 12.5).abs() < 1e-9);

        let t = ScriptedTransport::new(|r| {
            let Request::Chat { messages, .. } = r else { unreachable!() };
            assert!(messages[0].content.contains("how similar are dogs and"));
            Ok(Response::text("14"))
        });
        let agent = RemoteAgent::new(&config(AgentKind::RemoteChat), RemoteStyle::Chat, t).unwrap();
        assert_eq!(agent.elicit_similarity(m, "dog", "wolf", &env).unwrap(), 14.0);
    }
}
