use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, matching, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested seed set cannot be produced.
    #[error("seed selection failed: requested {requested} seeds but only {eligible} pairs are eligible")]
    SeedSelection { requested: usize, eligible: usize },

    /// Two seeds share a vertex on one side.
    #[error("conflicting seeds: pairs ({a1},{b1}) and ({a2},{b2}) share a vertex")]
    ConflictingSeeds { a1: u32, b1: u32, a2: u32, b2: u32 },

    /// No seed falls in any slice of the plan.
    #[error("seed set unreachable: no seed falls inside any slice of the plan")]
    SeedSetUnreachable,

    /// Degree-exponent estimation is degenerate for the given sample.
    #[error("exponent estimation failed: {0}")]
    Estimation(String),

    /// No transition was detected in a sweep curve.
    #[error("no transition detected: largest jump is below the 2x threshold")]
    NoTransition,

    /// Filesystem error with the offending path attached.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A text input could not be parsed.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A binary or structured file is malformed.
    #[error("data format error: {0}")]
    DataFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed input data rather than bad usage.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Parse { .. } | Error::DataFormat(_)
        )
    }
}
