//! HTTP client for OpenAI-style endpoints.

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::transport::{GeneratedToken, Payload, Request, Response, Transport};
use crate::error::{Error, Result};

pub const DEFAULT_KEY_VAR: &str = "INDUCTION_API_KEY";

pub struct HttpTransport {
    base_url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpTransport {
    /// Reads the key from the environment variable `key_var`.
    pub fn from_env(base_url: &str, key_var: &str, timeout: Duration) -> Result<Self> {
        let key = std::env::var(key_var)
            .map_err(|_| Error::Validation(format!("environment variable {key_var} is not set")))?;
        Ok(Self::new(base_url, Some(key), timeout))
    }

    pub fn new(base_url: &str, api_key: Option<String>, timeout: Duration) -> Self {
        HttpTransport {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key,
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    fn post(&self, path: &str, body: Value) -> Result<Value> {
        let mut req = self
            .agent
            .post(&format!("{}{path}", self.base_url))
            .set("Content-Type", "application/json");
        if let Some(k) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {k}"));
        }
        match req.send_json(body) {
            Ok(resp) => resp
                .into_json::<Value>()
                .map_err(|e| Error::Transport(format!("reading response body: {e}"))),
            Err(ureq::Error::Status(status, resp)) => {
                let body = resp.into_string().unwrap_or_default();
                Err(match status {
                    429 => Error::Throttled(body),
                    500..=599 => Error::Transport(format!("server error {status}: {body}")),
                    _ => Error::Remote { status, body },
                })
            }
            Err(ureq::Error::Transport(t)) => Err(Error::Transport(t.to_string())),
        }
    }
}

fn malformed(what: &str) -> Error {
    Error::Transport(format!("malformed response: missing {what}"))
}

fn now_stamp() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", d.as_secs(), d.subsec_millis())
}

fn parse_completion(v: &Value) -> Result<Payload> {
    let choice = v.pointer("/choices/0").ok_or_else(|| malformed("choices"))?;
    let text = choice["text"].as_str().ok_or_else(|| malformed("text"))?.to_string();
    let mut tokens = Vec::new();
    if let Some(lp) = choice.get("logprobs").filter(|l| !l.is_null()) {
        let toks = lp["tokens"].as_array().ok_or_else(|| malformed("logprobs.tokens"))?;
        let tops = lp["top_logprobs"].as_array();
        for (i, t) in toks.iter().enumerate() {
            let token = t.as_str().ok_or_else(|| malformed("token text"))?.to_string();
            let mut top: Vec<(String, f64)> = tops
                .and_then(|a| a.get(i))
                .and_then(Value::as_object)
                .map(|m| m.iter().filter_map(|(k, p)| p.as_f64().map(|p| (k.clone(), p))).collect())
                .unwrap_or_default();
            top.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            tokens.push(GeneratedToken {
                token,
                top_logprobs: top,
            });
        }
    }
    Ok(Payload::Completion { text, tokens })
}

impl Transport for HttpTransport {
    fn send(&self, request: &Request) -> Result<Response> {
        let payload = match request {
            Request::Chat {
                model,
                messages,
                temperature,
                max_tokens,
            } => {
                let v = self.post(
                    "/chat/completions",
                    json!({"model": model, "messages": messages, "temperature": temperature, "max_tokens": max_tokens}),
                )?;
                let text = v
                    .pointer("/choices/0/message/content")
                    .and_then(Value::as_str)
                    .ok_or_else(|| malformed("choices[0].message.content"))?;
                Payload::Text { text: text.into() }
            }
            Request::Completion {
                model,
                prompt,
                temperature,
                max_tokens,
                logprobs,
            } => parse_completion(&self.post(
                "/completions",
                json!({"model": model, "prompt": prompt, "temperature": temperature,
                       "max_tokens": max_tokens, "logprobs": logprobs}),
            )?)?,
            Request::Embedding { model, input } => {
                let v = self.post("/embeddings", json!({"model": model, "input": input}))?;
                let vector = v
                    .pointer("/data/0/embedding")
                    .and_then(Value::as_array)
                    .ok_or_else(|| malformed("data[0].embedding"))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| malformed("numeric embedding")))
                    .collect::<Result<Vec<_>>>()?;
                Payload::Embedding { vector }
            }
        };
        Ok(Response {
            payload,
            timestamp: Some(now_stamp()),
        })
    }
}
