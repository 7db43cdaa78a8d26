//! Agents that judge argument pairs, rate arguments and rate similarity.

pub mod embedding;
pub mod http;
pub mod record;
pub mod remote;
pub mod scm_agent;
pub mod scoring;
pub mod scripted;
pub mod transport;

use serde::{Deserialize, Serialize};

use crate::argument::{Argument, ArgumentPair};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::prompts::{LabelOrder, PromptEnv, PromptSpec};
use crate::scm::ScmParams;
use crate::similarity::{LoadOptions, Scale, SimilarityMatrix};

pub use embedding::{embedding_matrix, embedding_similarity, EmbeddingSource, RemoteEmbedder, VectorTable};
pub use record::{JudgmentKind, JudgmentRecord, TokenProb};
pub use remote::{RemoteAgent, RemoteStyle};
pub use scm_agent::ScmAgent;
pub use scoring::{likert_weighted_score, numeric_weighted_score, LikertScore, TokenDistribution};
pub use scripted::{Script, ScriptedAgent};
pub use transport::{
    CachingTransport, RateLimited, RecordingTransport, ReplayTransport, Request, Response, RetryPolicy,
    ScriptedTransport, Transport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Scm,
    Scripted,
    RemoteChat,
    RemoteCompletion,
    RemoteEmbedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub id: String,
    pub kind: AgentKind,
    #[serde(default)]
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_response_tokens: u32,
    /// Overrides `max_response_tokens` for single-argument ratings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rating_tokens: Option<u32>,
    /// Requests per second.
    #[serde(default = "default_rate")]
    pub request_rate_limit: f64,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_true")]
    pub cache_enabled: bool,
    #[serde(default = "default_base_url")]
    pub base_url: String,
    /// Environment variable holding the API key.
    #[serde(default = "default_key_var")]
    pub api_key_var: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Script>,
}

fn default_max_tokens() -> u32 {
    400
}

fn default_rate() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_base_url() -> String {
    "https://api.openai.com/v1".into()
}

fn default_key_var() -> String {
    http::DEFAULT_KEY_VAR.into()
}

fn default_timeout() -> u64 {
    120
}

impl AgentConfig {
    pub fn new(id: &str, kind: AgentKind) -> Self {
        AgentConfig {
            id: id.into(),
            kind,
            model: String::new(),
            temperature: 0.0,
            max_response_tokens: default_max_tokens(),
            max_rating_tokens: (kind == AgentKind::RemoteCompletion).then_some(100),
            request_rate_limit: default_rate(),
            retry: RetryPolicy::default(),
            cache_enabled: true,
            base_url: default_base_url(),
            api_key_var: default_key_var(),
            timeout_secs: default_timeout(),
            alpha: None,
            script: None,
        }
    }

    pub fn scm(id: &str) -> Self {
        Self::new(id, AgentKind::Scm)
    }

    pub fn scripted(id: &str, script: Script) -> Self {
        AgentConfig {
            script: Some(script),
            ..Self::new(id, AgentKind::Scripted)
        }
    }

    pub fn is_remote(&self) -> bool {
        matches!(
            self.kind,
            AgentKind::RemoteChat | AgentKind::RemoteCompletion | AgentKind::RemoteEmbedding
        )
    }

    pub fn rating_tokens(&self) -> u32 {
        self.max_rating_tokens.unwrap_or(self.max_response_tokens)
    }

    pub fn scm_params(&self) -> Result<ScmParams> {
        self.alpha.map_or(Ok(ScmParams::default()), ScmParams::new)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(format!("agent `{}`: {msg}", self.id)));
        if self.id.trim().is_empty() {
            return Err(Error::Validation("agent id is empty".into()));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return bad(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if self.max_response_tokens == 0 || self.max_rating_tokens == Some(0) {
            return bad("max tokens must be positive".into());
        }
        if !(self.request_rate_limit > 0.0) || !self.request_rate_limit.is_finite() {
            return bad(format!("request rate must be positive, got {}", self.request_rate_limit));
        }
        if self.retry.max_attempts == 0 {
            return bad("retry policy needs at least one attempt".into());
        }
        if self.is_remote() && self.model.trim().is_empty() {
            return bad("remote agents need a model name".into());
        }
        if self.kind == AgentKind::Scripted && self.script.is_none() {
            return bad("scripted agents need a script".into());
        }
        self.scm_params()?;
        Ok(())
    }
}

/// Common interface over the oracle, scripted and remote agents. Failures
/// are reported inside the returned record rather than as errors so a run
/// can continue past them.
pub trait Agent: Send + Sync {
    fn id(&self) -> &str;

    fn judge_pair(&self, pair: &ArgumentPair, spec: &PromptSpec, order: LabelOrder, env: &PromptEnv) -> JudgmentRecord;

    fn rate_argument(&self, stimulus_id: &str, argument: &Argument, spec: &PromptSpec, env: &PromptEnv)
        -> JudgmentRecord;

    /// A 0–20 similarity rating for two categories of `domain`.
    fn elicit_similarity(&self, domain: &Domain, a: &str, b: &str, env: &PromptEnv) -> Result<f64>;
}

/// Elicits every unordered category pair of `domain` once and assembles the
/// ratings into a 0–20 matrix.
pub fn elicit_similarity_matrix(agent: &dyn Agent, domain: &Domain, env: &PromptEnv) -> Result<SimilarityMatrix> {
    let n = domain.len();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&domain.categories[i], &domain.categories[j]);
            let v = agent
                .elicit_similarity(domain, a, b, env)
                .map_err(|e| Error::Derivation(format!("similarity of {a} and {b}: {e}")))?;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SimilarityMatrix::from_rows(domain.clone(), rows, Scale::new(0.0, 20.0)?, LoadOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults() {
        let c: AgentConfig = toml::from_str("id = \"gpt\"\nkind = \"remote-chat\"\nmodel = \"gpt-4\"").unwrap();
        assert_eq!(c.temperature, 0.0);
        assert_eq!(c.max_response_tokens, 400);
        assert_eq!(c.request_rate_limit, 1.0);
        assert!(c.cache_enabled);
        c.validate().unwrap();
        assert_eq!(AgentConfig::new("c", AgentKind::RemoteCompletion).rating_tokens(), 100);
    }

    #[test]
    fn config_rejects_bad_values() {
        let mut c = AgentConfig::new("x", AgentKind::RemoteChat);
        assert!(c.validate().is_err());
        c.model = "m".into();
        c.validate().unwrap();
        c.temperature = -0.1;
        assert!(c.validate().is_err());
        c.temperature = 0.0;
        c.max_response_tokens = 0;
        assert!(c.validate().is_err());
        assert!(AgentConfig::new("s", AgentKind::Scripted).validate().is_err());
    }
}
