use thiserror::Error;

/// Errors raised by the simulator, kernels, solver and data tooling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid qubit pair ({0}, {1}): indices must be distinct")]
    InvalidPair(usize, usize),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("encoding function {function} returned a non-finite value at x = ({x1}, {x2})")]
    NonFiniteEncoding {
        function: &'static str,
        x1: f64,
        x2: f64,
    },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel evaluation failed for pair ({i}, {j}): {source}")]
    PairFailed {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid kernel weights: {0}")]
    InvalidWeights(String),

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("n_points must be even")]
    OddPointCount,

    #[error("{n} points cannot be split into {folds} equal folds")]
    UnevenFolds { n: usize, folds: usize },

    #[error("fold {fold} lacks one of the two classes after re-shuffling")]
    FoldMissingClass { fold: usize },

    #[error("rejection sampling exceeded {0} draws")]
    SamplingExhausted(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
