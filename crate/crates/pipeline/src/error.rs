use std::path::PathBuf;

use mattekit_core::MatteError;
use thiserror::Error;

use crate::manifest::Status;

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("prompt template: {0}")]
    Template(String),
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("manifest {path} is locked by process {pid}")]
    Locked { path: PathBuf, pid: u32 },
    #[error("unknown sample {0:?}")]
    UnknownSample(String),
    #[error("sample {id}: cannot move from {from} to {to}")]
    Transition { id: String, from: Status, to: Status },
    #[error("sample {id}: leaving flagged requires a human decision")]
    HumanRequired { id: String },
    #[error("no background images in {0}")]
    NoBackgrounds(PathBuf),
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: MatteError,
    },
    #[error(transparent)]
    Matte(#[from] MatteError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: MatteError) -> Self {
        PipelineError::Image {
            path: path.into(),
            source,
        }
    }
}
