use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input parameters or inconsistent shapes.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative solver ran out of budget. Carries the best estimate seen.
    #[error("{message} (best estimate {best_estimate:?})")]
    Numerical {
        message: String,
        best_estimate: Option<f64>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, best_estimate: Option<f64>) -> Self {
        Error::Numerical {
            message: msg.into(),
            best_estimate,
        }
    }
}
