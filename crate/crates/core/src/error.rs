use thiserror::Error;

/// Errors surfaced by the solvers, generators and I/O helpers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: field `{field}`: {reason}")]
    InvalidInstance { field: String, reason: String },

    #[error("tails on subcarrier {subcarrier} increase at position {position} ({lower} < {upper})")]
    NonMonotoneTails {
        subcarrier: usize,
        position: usize,
        lower: f64,
        upper: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid channel config: {0}")]
    InvalidConfig(String),

    #[error("search space too large: {required} candidates exceeds the cap of {cap}")]
    SearchTooLarge { required: u128, cap: u128 },

    #[error("fairness index undefined: user {user} has zero mean rate")]
    UndefinedFairness { user: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInstance {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
