use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("invalid array configuration: {0}")]
    ArrayConfig(String),

    #[error("invalid position: {0}")]
    Position(String),

    #[error("{what} index {index} out of range, must lie in {bound}")]
    Index {
        what: &'static str,
        index: i64,
        bound: String,
    },

    #[error("{k} desired positions with only {m} element-carrier pairs; need K < M")]
    OverDetermined { k: usize, m: usize },

    #[error("desired positions {first} and {second} coincide")]
    DuplicatePosition { first: usize, second: usize },

    #[error("desired positions are ill-conditioned: condition number {condition_number:.3e}")]
    IllConditioned { condition_number: f64 },

    #[error("orthogonal matrix has zero trace")]
    DegenerateProjector,

    #[error("{0}")]
    Shape(String),

    #[error("secrecy rate needs at least one eavesdropper")]
    MissingEavesdroppers,

    #[error("QPSK framing needs an even number of bits, got {0}")]
    Framing(usize),

    #[error("{0}")]
    Domain(String),

    #[error("scenario: {key}: {message}")]
    Scenario { key: String, message: String },

    #[error("could not place eavesdropper outside guard zones after {attempts} attempts")]
    InfeasibleRegion { attempts: usize },

    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for this error: 1 when the scenario is readable
    /// but the numerics reject it, 2 for malformed or out-of-domain input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Linalg(_) | Error::IllConditioned { .. } | Error::DegenerateProjector => 1,
            _ => 2,
        }
    }

    pub(crate) fn scenario(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            key: key.into(),
            message: message.into(),
        }
    }
}
