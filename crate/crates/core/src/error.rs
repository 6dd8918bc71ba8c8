//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration document failed to parse or validate. `path` is the
    /// offending field path (e.g. `classification.diseases[0].cuis`).
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Transport-level provider failure. Retriable, unlike a model reject.
    #[error("provider `{provider}` transport failure: {message}")]
    ProviderTransport { provider: String, message: String },

    /// Provider returned a reply the caller could not interpret. The raw
    /// payload is retained for inspection.
    #[error("provider `{provider}` returned malformed reply: {message}")]
    ProviderReply {
        provider: String,
        message: String,
        raw: String,
    },

    /// Privacy gate violation: a component is configured to route data to a
    /// non-local endpoint while strict mode is on.
    #[error("privacy gate: component `{component}` routes to non-local host `{host}`")]
    Privacy { component: String, host: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A pipeline stage aborted; partial artifacts are retained on disk.
    #[error("pipeline stage `{stage}` failed: {message}")]
    Stage { stage: String, message: String },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("yaml: {0}")]
    Yaml(#[from] serde_yaml::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures the caller may retry (transport-level only).
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::ProviderTransport { .. })
    }
}
