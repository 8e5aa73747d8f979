use thiserror::Error;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario, grid or argument violates a stated invariant.
    #[error("invalid {what}: {detail}")]
    Validation { what: &'static str, detail: String },

    /// The requested instrument level is not present in the data.
    #[error("unknown instrument level z = {z}; available levels: {available:?}")]
    UnknownLevel { z: f64, available: Vec<f64> },

    /// The baseline instrument level has no data.
    #[error("baseline level z = {0} is missing from the sample set")]
    MissingBaseline(f64),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// The design matrix carries no information about the effect.
    #[error("degenerate instrument: design matrix is zero but right-hand side is not")]
    NoInformation,

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed input data, with file/line context when available.
    #[error("{source_name}:{line}: {detail}")]
    Parse {
        source_name: String,
        line: usize,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(
        source_name: impl Into<String>,
        line: usize,
        detail: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
