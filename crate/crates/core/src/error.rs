use thiserror::Error;

/// Errors produced by the models, codecs and experiment machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol index {0} is outside the alphabet")]
    SymbolOutOfRange(usize),

    #[error("EOF symbol at position {0} is not word-final")]
    InteriorEof(usize),

    #[error("word must end with the EOF symbol")]
    MissingEof,

    #[error("empty word")]
    EmptyWord,

    #[error("invalid codec configuration: {0}")]
    Config(String),

    #[error("bit string violates the (1,inf) constraint at position {0}")]
    ConsecutiveOnes(usize),

    #[error("decode failed: {0}")]
    Decode(String),

    #[error("no feasible constrained codebook with codes of at most {0} bits")]
    Infeasible(usize),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn decode_err(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}
