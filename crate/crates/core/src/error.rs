use thiserror::Error;

use crate::su2::Unitary2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("scale factor must be positive, got {0}")]
    InvalidScale(f64),

    #[error("pulse config parse error: {0}")]
    Parse(String),

    #[error(
        "pulse `{name}` is not a pi rotation about +y at zero offset: \
         achieved a = {a:.3e}, b = ({bx:.3e}, {by:.3e}, {bz:.3e})",
        a = achieved.a, bx = achieved.b[0], by = achieved.b[1], bz = achieved.b[2]
    )]
    InvariantViolation { name: String, achieved: Unitary2 },

    #[error("pulse `{0}` has zero total duration")]
    EmptyPulse(String),

    #[error("sequence must contain at least one token")]
    EmptySequence,

    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),

    #[error("combine precondition failed: {0}")]
    Precondition(String),

    #[error("no complement found for `{0}` within the search budget")]
    ComplementNotFound(String),

    #[error("power-law fit failed for {component}: log10 residual {residual:.3e} exceeds {threshold:.0e}")]
    FitFailure {
        component: &'static str,
        residual: f64,
        threshold: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fidelity threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
}
