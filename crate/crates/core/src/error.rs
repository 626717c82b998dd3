use thiserror::Error;

/// Errors raised by the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable {row} has no observed values")]
    AllMissingRow { row: usize },

    #[error("variable {row} has fewer than two observed values")]
    TooFewObservations { row: usize },

    #[error("variable {row} is constant and cannot be standardized")]
    ZeroVarianceRow { row: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("symmetric eigensolver failed: {0}")]
    Solver(String),

    #[error("negative bootstrap weight {value} at position {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("vector is not unit norm (norm = {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("degenerate variance estimate {value} for index {index}")]
    DegenerateVariance { index: usize, value: f64 },

    #[error("no root in bracket [{lo}, {hi}] for {what}")]
    NoRoot { what: &'static str, lo: f64, hi: f64 },

    #[error("largest weight is tied with the second largest")]
    DegenerateTop,

    #[error("empty null distribution")]
    EmptyDistribution,

    #[error("insufficient eigenvalues: need {needed}, have {available}")]
    InsufficientEigenvalues { needed: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("index {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_replicate(self, replicate: usize) -> Self {
        Error::Replicate { replicate, source: Box::new(self) }
    }

    pub(crate) fn at_index(self, index: usize) -> Self {
        Error::AtIndex { index, source: Box::new(self) }
    }

    /// Strips replicate/index context to reach the underlying failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::Replicate { source, .. } | Error::AtIndex { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures caused by invalid shapes or solver breakdown, as
    /// opposed to malformed input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::Dimension(_)
                | Error::Solver(_)
                | Error::DegenerateVariance { .. }
                | Error::NoRoot { .. }
                | Error::DegenerateTop
                | Error::InsufficientEigenvalues { .. }
                | Error::EmptyDistribution
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
