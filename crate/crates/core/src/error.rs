use thiserror::Error;

/// Errors raised by group construction, transforms and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid generating sequence: m[{index}] = {modulus}, every modulus must be at least 2")]
    InvalidGeneratingSequence { index: usize, modulus: usize },

    #[error("capacity exceeded: {requested} points requested, limit is {limit}")]
    Capacity { requested: u128, limit: usize },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("construction infeasible at level {level}: condition {condition} failed up to alpha = {ceiling}")]
    ConstructionInfeasible {
        level: usize,
        condition: &'static str,
        ceiling: u32,
    },

    #[error("phi grows at least linearly ({0}); the weights alone make the series diverge, no atomic construction is needed")]
    DirectDivergence(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable kind, used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGeneratingSequence { .. } => "invalid-generating-sequence",
            Error::Capacity { .. } => "capacity",
            Error::Resolution(_) => "resolution",
            Error::Parameter(_) => "parameter",
            Error::Precondition(_) => "precondition",
            Error::UnsupportedGroup(_) => "unsupported-group",
            Error::ConstructionInfeasible { .. } => "construction-infeasible",
            Error::DirectDivergence(_) => "direct-divergence",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
