use thiserror::Error;

/// Errors raised across the workbench.
///
/// The variants map onto the exit-code classes used by the CLI: domain and
/// configuration problems are usage errors, accuracy and resource failures
/// are numerical errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LcftError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("degenerate Gram matrix at level {level}: {detail}")]
    Degenerate { level: usize, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl LcftError {
    pub fn domain(msg: impl Into<String>) -> Self {
        LcftError::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        LcftError::Config(msg.into())
    }

    /// True for errors that stem from numerics rather than user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            LcftError::Accuracy(_) | LcftError::Resource(_) | LcftError::Degenerate { .. }
        )
    }
}

impl From<std::io::Error> for LcftError {
    fn from(e: std::io::Error) -> Self {
        LcftError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LcftError>;
