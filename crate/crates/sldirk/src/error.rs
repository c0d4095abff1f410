use std::io;

use sldirk_core::sl::SlError;
use sldirk_core::stability::StabilityError;
use sldirk_core::TableauError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Solver(#[from] SlError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error is a blow-up of the computation itself rather
    /// than a problem with its inputs.
    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            Error::Solver(SlError::NonFinite { .. } | SlError::Model { .. })
        )
    }

    /// 2 for invalid input, 3 for divergence, 1 for anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Tableau(_) | Error::Stability(_) => 2,
            Error::Solver(_) if self.is_divergence() => 3,
            Error::Solver(_) => 2,
            Error::Io { .. } | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
