use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A position or parameter lies outside the physically valid region.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested reverberation cannot be realized by passive walls.
    #[error("infeasible room: {0}")]
    InfeasibleRoom(String),

    #[error("config error: {0}")]
    Config(String),

    /// Malformed or non-finite signal data.
    #[error("data error: {0}")]
    Data(String),

    #[error("undefined measure: {0}")]
    UndefinedMeasure(String),

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("geometry iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration {
            iteration,
            source: Box::new(self),
        }
    }

    /// True for errors caused by the experiment configuration rather than by
    /// runtime data.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::InfeasibleRoom(_) => true,
            Error::Iteration { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
