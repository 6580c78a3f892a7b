use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its documented range.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state diverged at t = {t} (|state| > {limit})")]
    Divergence { t: f64, limit: f64 },

    #[error("no equilibrium found at lambda = {lambda}: {reason}")]
    NoEquilibrium { lambda: f64, reason: String },

    #[error("regressor matrix is rank deficient")]
    RankDeficient,

    #[error("non-finite value in input data")]
    NonFinite,

    #[error("series has zero variance after detrending")]
    ZeroVariance,

    #[error("monte carlo discarded {discarded} of {total} draws (limit {limit})")]
    TooManyDiscards {
        discarded: usize,
        total: usize,
        limit: f64,
    },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
