use thiserror::Error;

/// Errors raised by the scenery toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid depth {0}: depth must be at least 1")]
    InvalidDepth(usize),

    #[error("depth {requested} exceeds the queryable depth {max}")]
    DepthExceeded { requested: usize, max: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("step measure is not sampleable (explicit tables carry no path law)")]
    NotSampleable,

    #[error("insufficient data: record of length {have} is shorter than depth {need}")]
    InsufficientData { have: usize, need: usize },

    /// The diagonal block for walk length `n` cannot be inverted.
    #[error("singular system at N = {n}: {reason}")]
    SingularSystem { n: usize, reason: String },

    #[error("step measure is neither strongly asymmetric nor symmetric and straightforward up to depth {depth}")]
    UnsupportedRegime { depth: usize },

    #[error("no record-measure divergence found up to depth {n_max} for a non-equivalent pair")]
    InconclusiveDepth { n_max: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
