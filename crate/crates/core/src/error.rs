use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid observation: {0}")]
    Observation(String),

    #[error("search space too large: {candidates} candidate subsets exceed the limit of {limit}")]
    SearchSpace { candidates: f64, limit: f64 },

    #[error("objective is infinite over the whole search interval")]
    Infeasible,

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("tree exceeds {cap} nodes at depth {depth}")]
    TreeTruncated { cap: usize, depth: usize },

    #[error("non-finite value in density evolution at step {step}: {what}")]
    Numeric { step: usize, what: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
