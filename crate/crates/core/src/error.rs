use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {message}")]
    Malformed {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("{origin}:{line}: duplicate pair id `{id}`")]
    DuplicatePairId {
        origin: String,
        line: usize,
        id: String,
    },

    #[error("dependency tree for `{utterance}` contains a cycle through token {token}")]
    CyclicTree { utterance: String, token: usize },

    #[error("dependency tree for `{utterance}`: token {token} has head {head} outside 0..={len}")]
    HeadOutOfRange {
        utterance: String,
        token: usize,
        head: usize,
        len: usize,
    },

    #[error("dependency tree for `{utterance}`: {message}")]
    InvalidTree { utterance: String, message: String },

    #[error("bitext is empty")]
    EmptyBitext,

    #[error("iteration count must be at least 1")]
    ZeroIterations,

    #[error("training data contains a single class ({0})")]
    SingleClass(String),

    #[error("message has no question mark: `{0}`")]
    NoQuestionMark(String),

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 2 for internal invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            _ => 1,
        }
    }
}
