use std::path::PathBuf;

use crate::geometry::BBox;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid box {0:?}: corners must be finite with x2 >= x1 and y2 >= y1")]
    InvalidBox(BBox),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("level {level} is not below the relay level {relay}")]
    LevelOutOfRange { level: usize, relay: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "inverse transform left an imaginary residue of {residue:e} (tolerance {tolerance:e})"
    )]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("tensor format: {0}")]
    Format(String),

    #[error("{path}: malformed JSON at byte {offset}: {message}")]
    Json {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    #[error("annotations reference missing images: ids {annotation_ids:?}")]
    DanglingAnnotations { annotation_ids: Vec<u64> },

    #[error("invalid annotation {annotation_id}: {message}")]
    Annotation { annotation_id: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
