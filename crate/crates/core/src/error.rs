use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the water footprint models and their loaders.
///
/// Variants are grouped by how a caller is expected to react; [`Error::category`]
/// exposes that grouping so front ends can map it onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a documented range or structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A device spec or series is internally inconsistent.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A parameter lookup (process node, energy source, region, site) failed.
    #[error("parameter resolution failed: {0}")]
    ParamResolution(String),

    /// Input outside the domain of an empirical formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Time series could not be aligned onto a common grid.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// A requested time window is not covered by the available data.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A ratio with a zero denominator was requested.
    #[error("singular input: {0}")]
    Singularity(String),

    /// Malformed input text.
    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    InputValidation,
    ParameterResolution,
    Io,
    Alignment,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Validation(_)
            | Error::InvalidSpec(_)
            | Error::Domain(_)
            | Error::Singularity(_)
            | Error::Parse { .. } => ErrorCategory::InputValidation,
            Error::ParamResolution(_) => ErrorCategory::ParameterResolution,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Alignment(_) | Error::Coverage(_) => ErrorCategory::Alignment,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
