use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains no bibliographic records")]
    EmptyFile,

    #[error("corpus has no dated records to analyze")]
    EmptyCorpus,

    #[error("cited reference could not be parsed: {0:?}")]
    UnparseableRef(String),

    #[error("invalid year range {start}..={end}")]
    InvalidYearRange { start: i32, end: i32 },

    #[error("invalid selection threshold: {0}")]
    InvalidThreshold(String),

    #[error("invalid burst parameters: {0}")]
    InvalidBurstParams(String),

    #[error("invalid citation stream: {0}")]
    InvalidStream(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("malformed normalized corpus at line {line}: {source}")]
    CorpusFormat {
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("output validation failed for {path}: {reason}")]
    OutputValidation { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyFile => "EmptyFile",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::UnparseableRef(_) => "UnparseableRef",
            Error::InvalidYearRange { .. } => "InvalidYearRange",
            Error::InvalidThreshold(_) => "InvalidThreshold",
            Error::InvalidBurstParams(_) => "InvalidBurstParams",
            Error::InvalidStream(_) => "InvalidStream",
            Error::ConfigInvalid(_) => "ConfigInvalid",
            Error::CorpusFormat { .. } => "CorpusFormat",
            Error::OutputValidation { .. } => "OutputValidation",
            Error::Io { .. } => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
