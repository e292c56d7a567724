use std::fmt;
use std::path::{Path, PathBuf};

use mtwfit_core::gof::Criterion;

/// Pipeline stage in which an error occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Sample,
    Ingest,
    Normalize,
    Statistics,
    Fit(Criterion),
    Gof,
    Performance,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Config => f.write_str("config"),
            Stage::Sample => f.write_str("sample"),
            Stage::Ingest => f.write_str("ingest"),
            Stage::Normalize => f.write_str("normalize"),
            Stage::Statistics => f.write_str("statistics"),
            Stage::Fit(c) => write!(f, "fit:{c}"),
            Stage::Gof => f.write_str("gof"),
            Stage::Performance => f.write_str("performance"),
            Stage::Export => f.write_str("export"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ErrorKind {
    #[error(transparent)]
    Core(#[from] mtwfit_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Error carrying the stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {kind}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub kind: ErrorKind,
}

impl PipelineError {
    pub fn new(stage: Stage, kind: ErrorKind) -> Self {
        Self { stage, kind }
    }

    pub fn core(stage: Stage, e: mtwfit_core::Error) -> Self {
        Self::new(stage, ErrorKind::Core(e))
    }

    pub fn io(stage: Stage, path: &Path, source: std::io::Error) -> Self {
        Self::new(
            stage,
            ErrorKind::Io {
                path: path.to_path_buf(),
                source,
            },
        )
    }

    pub fn config(what: impl Into<String>) -> Self {
        Self::new(Stage::Config, ErrorKind::Invalid(what.into()))
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
