use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("asymmetric pair ({row}, {col}): {forward} vs {backward}")]
    AsymmetricPair {
        row: String,
        col: String,
        forward: f64,
        backward: f64,
    },

    #[error("unknown category `{category}` in domain {domain}")]
    UnknownCategory { category: String, domain: String },

    #[error("SCM strength not computable: {0}")]
    NotComputable(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("constraints unsatisfiable at this threshold: {0}")]
    Unsatisfiable(String),

    #[error("insufficient candidates: needed {needed}, found {found} ({context})")]
    Shortfall {
        needed: usize,
        found: usize,
        context: String,
    },

    #[error("invalid prompt: {0}")]
    Prompt(String),

    #[error("unparseable response: {raw:?}")]
    Unparseable { raw: String },

    #[error("score derivation failed: {0}")]
    Derivation(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("remote service rejected the request ({status}): {body}")]
    Remote { status: u16, body: String },

    #[error("rate limited: {0}")]
    Throttled(String),

    #[error("replay miss: no recorded response for request {0}")]
    ReplayMiss(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TOML error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Whether a remote call failing with this error is worth retrying.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport(_) | Error::Throttled(_))
    }
}
