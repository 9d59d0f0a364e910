use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("empty GLCM: no valid pixel pairs inside the region")]
    EmptyGlcm,

    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported model format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("image format error: {0}")]
    Format(String),

    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A pipeline step failed; `stage` names the step.
    #[error("{stage} failed: {source}")]
    Extraction {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Extraction {
            stage,
            source: Box::new(e),
        }
    }

    /// Coarse class used for process exit codes and C error codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::DegenerateTraining(_) | Error::Numeric(_) => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}
