use std::io;

use thiserror::Error;

use crate::model::{Algorithm, Component};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),

    #[error("{algorithm} requires the `{component}` score component")]
    MissingComponent {
        algorithm: Algorithm,
        component: Component,
    },

    #[error("sentence must contain at least one word")]
    EmptySentence,

    #[error("score table has {actual} words, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("n = {0} is outside the enumeration guard 1..=10")]
    EnumerationGuard(usize),

    #[error("invalid cost configuration: {0}")]
    InvalidCost(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("score file line {line}: {message}")]
    ScoreFile { line: usize, message: String },

    #[error("model file line {line}: {message}")]
    ModelFile { line: usize, message: String },

    #[error("documents are not aligned: {0}")]
    Misaligned(String),

    #[error("training corpus is empty")]
    EmptyCorpus,

    #[error("training corpus contains no projective sentences")]
    NoProjectiveSentences,

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
