use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: u64,
        field: String,
        message: String,
    },

    #[error("line {line}: field `{field}` out of range: {message}")]
    Range {
        line: u64,
        field: String,
        message: String,
    },

    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: duplicate record_id `{record_id}`")]
    DuplicateRecord { line: u64, record_id: String },

    #[error("duplicate sample for record `{record_id}` and scene `{scene_id}`")]
    DuplicateSample { record_id: String, scene_id: String },

    #[error("invalid patch for record `{record_id}` scene `{scene_id}`: {message}")]
    InvalidPatch {
        record_id: String,
        scene_id: String,
        message: String,
    },

    #[error("empty patch: no valid pixels for record `{record_id}` scene `{scene_id}`")]
    EmptyPatch { record_id: String, scene_id: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("expected {expected} features, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),

    #[error("invalid split fractions: {0}")]
    InvalidSplit(String),

    #[error("{split} split would be empty ({rows} rows available)")]
    EmptySplit { split: &'static str, rows: usize },

    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("corrupted model file: {0}")]
    Corrupt(String),

    #[error("failed to encode JSON: {0}")]
    Encode(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: u64, field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn range(line: u64, field: &str, message: impl Into<String>) -> Self {
        Error::Range {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by the caller's input (files, flags, schemas)
    /// rather than by degenerate data discovered while running.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::EmptyPatch { .. } | Error::Empty(_) | Error::EmptySplit { .. } | Error::Encode(_)
        )
    }
}
