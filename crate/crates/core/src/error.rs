use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// A formula was evaluated outside the region where it is finite or valid.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dynamical matrix has an eigenvalue with nonnegative real part.
    #[error("unstable configuration: eigenvalue {re:.6e}{im:+.6e}i has nonnegative real part")]
    Unstable { re: f64, im: f64 },

    #[error("fit of `{parameter}` did not converge after {iterations} iterations")]
    FitNonConvergence { parameter: String, iterations: usize },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
