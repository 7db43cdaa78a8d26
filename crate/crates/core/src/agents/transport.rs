//! Request/response plumbing between agents and a model service.
//!
//! Layers compose: an [`HttpTransport`](super::http::HttpTransport) (or a
//! [`ScriptedTransport`] in tests) wrapped by [`RateLimited`], then
//! [`RecordingTransport`] or [`CachingTransport`]. A [`ReplayTransport`]
//! reads a recorded transcript back and never touches the network.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, RwLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prompts::ChatMessage;
use crate::stimuli::sha256_hex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "endpoint", rename_all = "snake_case")]
pub enum Request {
    Chat {
        model: String,
        messages: Vec<ChatMessage>,
        temperature: f64,
        max_tokens: u32,
    },
    Completion {
        model: String,
        prompt: String,
        temperature: f64,
        max_tokens: u32,
        /// Number of alternatives reported per generated token.
        logprobs: u8,
    },
    Embedding { model: String, input: String },
}

impl Request {
    /// Stable identity used by caches and transcripts.
    pub fn key(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("requests serialize").as_bytes())
    }
}

/// One generated token with its most probable alternatives as log
/// probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedToken {
    pub token: String,
    pub top_logprobs: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Text { text: String },
    Completion { text: String, tokens: Vec<GeneratedToken> },
    Embedding { vector: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Response {
    pub fn text(text: impl Into<String>) -> Self {
        Response {
            payload: Payload::Text { text: text.into() },
            timestamp: None,
        }
    }

    pub fn reply_text(&self) -> Option<&str> {
        match &self.payload {
            Payload::Text { text } | Payload::Completion { text, .. } => Some(text),
            Payload::Embedding { .. } => None,
        }
    }
}

pub trait Transport: Send + Sync {
    fn send(&self, request: &Request) -> Result<Response>;
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, request: &Request) -> Result<Response> {
        (**self).send(request)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, request: &Request) -> Result<Response> {
        (**self).send(request)
    }
}

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub key: String,
    pub request: Request,
    pub response: Response,
}

pub fn read_transcript(path: impl AsRef<Path>) -> Result<Vec<TranscriptEntry>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: TranscriptEntry = serde_json::from_str(&line)
            .map_err(|e| Error::Schema(format!("{}:{}: {e}", path.display(), n + 1)))?;
        out.push(entry);
    }
    Ok(out)
}

fn append_entry(file: &Mutex<File>, request: &Request, response: &Response) -> Result<()> {
    let entry = TranscriptEntry {
        key: request.key(),
        request: request.clone(),
        response: response.clone(),
    };
    let mut line = serde_json::to_string(&entry)?;
    line.push('\n');
    let mut f = file.lock().expect("transcript lock");
    f.write_all(line.as_bytes())?;
    f.flush()?;
    Ok(())
}

fn open_append(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(OpenOptions::new().create(true).append(true).open(path)?)
}

/// Passes requests through and appends every successful exchange to a
/// transcript.
pub struct RecordingTransport<T> {
    inner: T,
    file: Mutex<File>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, path: impl AsRef<Path>) -> Result<Self> {
        Ok(RecordingTransport {
            inner,
            file: Mutex::new(open_append(path.as_ref())?),
        })
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&self, request: &Request) -> Result<Response> {
        let response = self.inner.send(request)?;
        append_entry(&self.file, request, &response)?;
        Ok(response)
    }
}

/// Answers from a transcript only. An unknown request is a [`Error::ReplayMiss`].
pub struct ReplayTransport {
    entries: HashMap<String, Response>,
}

impl ReplayTransport {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_entries(read_transcript(path)?))
    }

    pub fn from_entries(entries: Vec<TranscriptEntry>) -> Self {
        ReplayTransport {
            entries: entries.into_iter().map(|e| (e.key, e.response)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Transport for ReplayTransport {
    fn send(&self, request: &Request) -> Result<Response> {
        let key = request.key();
        self.entries.get(&key).cloned().ok_or(Error::ReplayMiss(key))
    }
}

/// Serves repeated requests from memory, optionally persisting new
/// exchanges so a later process starts warm.
pub struct CachingTransport<T> {
    inner: T,
    cache: RwLock<HashMap<String, Response>>,
    file: Option<Mutex<File>>,
}

impl<T: Transport> CachingTransport<T> {
    pub fn in_memory(inner: T) -> Self {
        CachingTransport {
            inner,
            cache: RwLock::new(HashMap::new()),
            file: None,
        }
    }

    /// Loads any existing entries from `path` and appends new ones to it.
    pub fn persistent(inner: T, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let cache = if path.exists() {
            read_transcript(path)?.into_iter().map(|e| (e.key, e.response)).collect()
        } else {
            HashMap::new()
        };
        Ok(CachingTransport {
            inner,
            cache: RwLock::new(cache),
            file: Some(Mutex::new(open_append(path)?)),
        })
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T: Transport> Transport for CachingTransport<T> {
    fn send(&self, request: &Request) -> Result<Response> {
        let key = request.key();
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let response = self.inner.send(request)?;
        let mut cache = self.cache.write().expect("cache lock");
        if let Some(hit) = cache.get(&key) {
            // Another caller filled it while we were waiting.
            return Ok(hit.clone());
        }
        if let Some(file) = &self.file {
            append_entry(file, request, &response)?;
        }
        cache.insert(key, response.clone());
        Ok(response)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_backoff_ms: 1000,
            max_backoff_ms: 60_000,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (1-based): base·2^(attempt−1),
    /// capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u64.checked_shl(attempt.saturating_sub(1)).unwrap_or(u64::MAX);
        Duration::from_millis(self.base_backoff_ms.saturating_mul(factor).min(self.max_backoff_ms))
    }
}

/// Spaces requests to at most `rate` per second and retries transient
/// failures with exponential backoff.
pub struct RateLimited<T> {
    inner: T,
    interval: Duration,
    retry: RetryPolicy,
    next_slot: Mutex<Option<Instant>>,
}

impl<T: Transport> RateLimited<T> {
    pub fn new(inner: T, rate: f64, retry: RetryPolicy) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Validation(format!("request rate must be positive, got {rate}")));
        }
        if retry.max_attempts == 0 {
            return Err(Error::Validation("retry policy needs at least one attempt".into()));
        }
        Ok(RateLimited {
            inner,
            interval: Duration::from_secs_f64(1.0 / rate),
            retry,
            next_slot: Mutex::new(None),
        })
    }

    fn wait_turn(&self) {
        let wait = {
            let mut slot = self.next_slot.lock().expect("rate lock");
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + self.interval);
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

impl<T: Transport> Transport for RateLimited<T> {
    fn send(&self, request: &Request) -> Result<Response> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            self.wait_turn();
            match self.inner.send(request) {
                Err(e) if e.is_retryable() && attempt < self.retry.max_attempts => {
                    std::thread::sleep(self.retry.backoff(attempt));
                }
                Err(e) if e.is_retryable() => {
                    return Err(Error::Transport(format!("giving up after {attempt} attempts: {e}")));
                }
                other => return other,
            }
        }
    }
}

type Responder = dyn Fn(&Request) -> Result<Response> + Send + Sync;

/// A transport answered by a closure, counting calls. For tests and offline
/// fixtures.
pub struct ScriptedTransport {
    responder: Box<Responder>,
    calls: AtomicUsize,
}

impl ScriptedTransport {
    pub fn new(responder: impl Fn(&Request) -> Result<Response> + Send + Sync + 'static) -> Self {
        ScriptedTransport {
            responder: Box::new(responder),
            calls: AtomicUsize::new(0),
        }
    }

    /// Replies with the same text to every request.
    pub fn constant(text: &str) -> Self {
        let text = text.to_string();
        Self::new(move |_| Ok(Response::text(text.clone())))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, request: &Request) -> Result<Response> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.responder)(request)
    }
}

/// Where a transcript for `agent_id` lives under `dir`.
pub fn transcript_path(dir: impl AsRef<Path>, agent_id: &str) -> PathBuf {
    let safe: String = agent_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    dir.as_ref().join(format!("{safe}.transcript.jsonl"))
}
