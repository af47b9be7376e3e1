use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the steganalysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("wrong magic number: expected {expected}, found {found:?}")]
    BadMagic { expected: &'static str, found: String },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("image too small: {0}")]
    ImageTooSmall(String),
    #[error("offset out of range: ({dx}, {dy}) for {width}x{height} image")]
    OffsetOutOfRange {
        dx: usize,
        dy: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("predictor for band {band} is degenerate: {rows} qualifying rows, need at least 7")]
    DegeneratePredictor { band: String, rows: usize },
    #[error("linear system is rank deficient beyond ridge repair")]
    RankDeficient,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("single-class training data")]
    SingleClass,
    #[error("class {class} has {count} samples, fewer than {k} folds")]
    ClassTooSmall { class: u8, count: usize, k: usize },

    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("extraction failed for {path}: {source}")]
    Extraction {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
