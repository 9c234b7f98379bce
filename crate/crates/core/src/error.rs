use thiserror::Error;

use crate::dynsys::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("declared equilibrium {point:?} is not an equilibrium: max |f| = {residual:e}")]
    NotEquilibrium { point: Vec<f64>, residual: f64 },

    #[error("field component f{component} at {point:?}: {source}")]
    FieldDomain {
        component: usize,
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },

    #[error("grid has no points left after excluding the equilibrium")]
    EmptyGrid,

    #[error("unknown builtin system `{0}`")]
    UnknownSystem(String),

    #[error("config `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
