use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {abs_tol:e} within {max_subdivisions} subdivisions")]
    QuadratureNonConvergence { abs_tol: f64, max_subdivisions: u32 },

    #[error("series operands differ: {0}")]
    SeriesMismatch(String),

    #[error("series reciprocal needs a nonzero constant term")]
    ZeroConstantTerm,

    #[error("derivative order {k} exceeds series order {order}")]
    OrderOutOfRange { k: usize, order: usize },

    #[error("{elements} reflecting elements exceeds the supported maximum of {max}")]
    ElementCapExceeded { elements: u32, max: u32 },

    #[error("association candidate list is empty")]
    EmptyCandidates,

    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "window radius {radius} m holds only {expected_interior:.1} interior BSs on average (need >= {required})"
    )]
    InsufficientWindow { radius: f64, expected_interior: f64, required: f64 },

    #[error("{what} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },

    #[error("optimization interval is empty")]
    DegenerateInterval,

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field, reason: reason.into() }
    }
}
