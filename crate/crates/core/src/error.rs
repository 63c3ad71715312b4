//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: not valid UTF-8")]
    InvalidUtf8 { path: PathBuf },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate book id `{0}` in manifest")]
    DuplicateBookId(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{metric} is undefined: {reason}")]
    UndefinedMetric {
        metric: &'static str,
        reason: String,
    },

    #[error("{0} is undefined: no row with a positive occurrence total")]
    UndefinedScore(&'static str),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("book `{book_id}`: diversity profile has undefined {metric}")]
    UndefinedProfile { book_id: String, metric: &'static str },

    #[error("lemma annotations for book `{book_id}` sentence {sent_id} do not match the source: {detail}")]
    LemmaMismatch {
        book_id: String,
        sent_id: u64,
        detail: String,
    },

    #[error("no probability for book `{book_id}` sentence {sent_id} candidate {cand_idx}")]
    MissingScore {
        book_id: String,
        sent_id: u64,
        cand_idx: usize,
    },

    #[error("{what}: expected {expected}, got {actual}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("book sets differ: {detail}")]
    BookSetMismatch { detail: String },

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    TrainingDiverged { epoch: usize, loss: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
