//! Error type shared across the crate.

use std::io;

/// Errors produced by parsing, fusion, and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed input line; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A parse or I/O failure attributed to a file on disk.
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    /// Invalid experiment configuration; the message names the offending keys.
    #[error("config: {0}")]
    Config(String),

    /// An operation contract was violated by the caller.
    #[error("{0}")]
    InvalidInput(String),

    /// The query has no judged-relevant documents; callers must exclude it.
    #[error("query {0} has no judged-relevant documents")]
    NoRelevantDocuments(String),

    /// No query in the run has judged-relevant documents.
    #[error("no evaluable query: every query lacks judged-relevant documents")]
    NoEvaluableQueries,
}

impl Error {
    /// Wraps the error with the path of the file it came from.
    pub fn in_file(self, path: impl Into<String>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
