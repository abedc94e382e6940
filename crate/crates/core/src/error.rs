use std::path::PathBuf;

use thiserror::Error;

use crate::acoustic::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },

    #[error("{path}: unreadable wav: {message}")]
    Wav { path: PathBuf, message: String },

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("zero-length audio")]
    ZeroLengthAudio,

    #[error("audio too short: {samples} samples, analysis window needs {window}")]
    AudioTooShort { samples: usize, window: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad magic: expected \"ISPF\", found {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported ISPF version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("non-uniform hop at row {row}: spacing {spacing:.6} s vs {hop:.6} s")]
    NonUniformHop { row: usize, spacing: f64, hop: f64 },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("{frames} frames cannot be tiled by allowed segment lengths")]
    Untileable { frames: usize },

    #[error("brute-force segmentation limited to {limit} frames, got {frames}")]
    TooManyFrames { frames: usize, limit: usize },

    #[error("not enough frames for k-means: {frames} frames for k = {k}")]
    TooFewFrames { frames: usize, k: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("codebook has no phone labels")]
    MissingPhoneLabels,

    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),

    #[error("no phones recovered from alignments")]
    NoPhones,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("training split has a single class")]
    SingleClass,

    #[error("empty {0} split")]
    EmptySplit(&'static str),

    #[error("total duration is zero")]
    ZeroDuration,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, cause: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause,
        }
    }
}
