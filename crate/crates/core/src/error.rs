use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("lex error at byte {offset}: {message}")]
    Lex { offset: usize, message: String },
    #[error("operation requires a {expected:?}-origin sequence")]
    WrongOrigin { expected: crate::token::Origin },
    #[error("n-gram order must be >= 1")]
    InvalidOrder,
    #[error("brevity penalty requires positive lengths")]
    InvalidLength,
    #[error("smoothing mode undefined for hypothesis length {hyp_len} (ln 1 = 0)")]
    SmoothingDomain { hyp_len: usize },
    #[error("empty candidate")]
    EmptyCandidate,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("negative precision value {0}")]
    InvalidPrecision(f64),
    #[error("negative score {0}")]
    InvalidScore(f64),
    #[error("record {id} is missing the {key} grouping key")]
    MissingKey { id: String, key: &'static str },
    #[error("cannot split {groups} group(s) into {partitions} non-degenerate partitions")]
    InfeasibleSplit { groups: usize, partitions: usize },
    #[error("need {needed} training records to reach the target ratio, have {available}")]
    InsufficientTrain { needed: usize, available: usize },
    #[error("statistical test needs at least 2 values per sample, got {0}")]
    TooFewSamples(usize),
    #[error("operator grid is missing combo {0}")]
    IncompleteGrid(String),
    #[error("invalid preprocess combo {0:?}; expected a 4-bit string like \"1101\"")]
    InvalidCombo(String),
    #[error("unknown variant preset {0:?}")]
    UnknownPreset(String),
    #[error("weights must sum to 1 and match max_n")]
    InvalidWeights,
}

pub type Result<T> = std::result::Result<T, Error>;
