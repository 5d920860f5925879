use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula (e.g. `log10` of a non-positive distance).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular direct channel ({context}): condition number {condition:.3e}")]
    Singular { context: String, condition: f64 },

    #[error("degenerate channel: {0}")]
    Degenerate(String),

    #[error("capability not configured: {0}")]
    Missing(String),

    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
