use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("CRS mismatch: source `{source_crs}` vs target `{target_crs}`")]
    CrsMismatch {
        source_crs: String,
        target_crs: String,
    },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("no evaluable dates: {0}")]
    NoEvaluableDates(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
