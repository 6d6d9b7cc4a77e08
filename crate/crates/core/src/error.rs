use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dangling reference: {kind} '{id}' not found")]
    DanglingReference { kind: &'static str, id: String },
    #[error("duplicate {kind} '{id}'")]
    Duplicate { kind: &'static str, id: String },
    #[error("duplicate judgment: annotator '{annotator_id}', item '{item_id}', channel {channel}")]
    DuplicateJudgment {
        annotator_id: String,
        item_id: String,
        channel: String,
    },
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero variance input")]
    ZeroVariance,
    #[error("too few observations: need {needed}, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("weights sum to zero")]
    ZeroWeight,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("config does not match data: {0}")]
    ConfigMismatch(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("missing prediction for fold '{fold_id}', item '{item_id}'")]
    MissingPrediction { fold_id: String, item_id: String },
    #[error("id sets differ: '{0}' present in only one input")]
    IdMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
