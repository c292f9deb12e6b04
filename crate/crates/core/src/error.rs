use std::path::PathBuf;

use thiserror::Error;

use crate::protocol::DecodeError;
use crate::widget::WidgetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing, malformed, or violates a constraint.
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// A caller passed a value the operation cannot accept (NaN, infinite, out of range).
    #[error("invalid input: {0}")]
    Input(String),

    /// The environment was driven outside its lifecycle (step before reset, step after done).
    #[error("protocol misuse: {0}")]
    Misuse(&'static str),

    #[error(transparent)]
    Widget(#[from] WidgetError),

    /// A stimulus generator was asked for something it cannot render.
    #[error("stimulus error: {0}")]
    Stimulus(String),

    #[error("fovea map error: {0}")]
    Fovea(String),

    /// A trial-log line failed to parse.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset error ({}): {message}", path.display())]
    Dataset { path: PathBuf, message: String },

    #[error("analysis error: {0}")]
    Analysis(String),

    /// A policy and environment are incompatible (e.g. oracle without the privileged channel).
    #[error("policy error: {0}")]
    Policy(String),

    #[error(transparent)]
    Decode(#[from] DecodeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
