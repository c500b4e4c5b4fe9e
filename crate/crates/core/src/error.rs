use thiserror::Error;

/// Errors raised across graph construction, simulation and post-processing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("unknown name `{0}`")]
    Lookup(String),

    #[error("wire length {0} is odd; quantum wires need an even number of atoms")]
    Parity(usize),

    #[error("vertices {0} and {1} are already adjacent")]
    Adjacency(usize, usize),

    #[error("invalid split plan: {0}")]
    Plan(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("readout matrix is singular (determinant {0:e})")]
    Inversion(f64),

    #[error("MIS extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
