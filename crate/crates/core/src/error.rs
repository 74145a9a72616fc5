use thiserror::Error;

/// Errors raised by the time-scale toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("{0} is not a point of the time scale")]
    NotInTimeScale(String),

    #[error("invalid window [{a}, {b}]")]
    InvalidWindow { a: String, b: String },

    #[error("invalid interval: left endpoint {a} exceeds right endpoint {b}")]
    InvalidInterval { a: String, b: String },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("window measure vanishes at t = {0}")]
    ZeroDenominator(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("root isolation failed on [{lo}, {hi}]: {reason}")]
    ResolutionFailure { lo: f64, hi: f64, reason: String },

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("restriction set is bounded; a limit along it is undefined")]
    BoundedRestriction,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("BAP witness failure: {0}")]
    WitnessFailure(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
