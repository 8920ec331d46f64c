use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TadError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error in {field}: {message}")]
    Format { field: String, message: String },

    #[error("integrity error: expected {expected} records, found {found}")]
    Integrity { expected: u64, found: u64 },

    #[error("non-finite gradient in tensor `{tensor}` at step {step}")]
    NonFiniteGradient { tensor: String, step: usize },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl TadError {
    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        TadError::Format { field: field.into(), message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        TadError::InvalidArgument(message.into())
    }
}

pub type Result<T> = std::result::Result<T, TadError>;
