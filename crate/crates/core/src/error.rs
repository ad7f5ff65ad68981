use thiserror::Error;

use crate::complex::CVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: wrong dimensions, non-finite entries, points outside
    /// a required region.
    #[error("invalid input: {0}")]
    Input(String),

    /// A map description failed to parse. `path` is a JSON pointer into the document.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    /// Evaluation hit a pole of a Möbius node.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine ran out of iterations; the best iterate is kept.
    #[error("no convergence after {iterations} iterations (best estimate {value})")]
    Numerical {
        iterations: usize,
        value: f64,
        direction: CVector,
    },

    /// The map sent a point of the unit ball outside the unit ball.
    #[error("map is not into the unit ball: |f(z)| = {0}")]
    Certification(f64),

    /// The hypothesis of an equality-case diagnostic does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
