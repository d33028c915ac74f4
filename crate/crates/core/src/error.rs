use std::path::PathBuf;

/// Errors produced anywhere in the fusion pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic in tensor file (expected FVT1, found {0:?})")]
    BadMagic([u8; 4]),
    #[error("tensor file truncated: {0}")]
    Truncated(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("unknown emotion label {0:?}")]
    UnknownLabel(String),
    #[error("unknown channel {0:?}")]
    UnknownChannel(String),
    #[error("duplicate clip id {0:?}")]
    DuplicateClipId(String),
    #[error("malformed manifest row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("missing file referenced by manifest: {0}")]
    MissingFile(PathBuf),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid volume: {0}")]
    InvalidVolume(String),
    #[error("block grid {rows}x{cols} larger than frame {height}x{width}")]
    GridLargerThanFrame {
        rows: usize,
        cols: usize,
        height: usize,
        width: usize,
    },
    #[error("center {0} has zero norm; cosine undefined")]
    ZeroNormCenter(usize),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("true class {0} never observed and smoothing is zero")]
    EmptyClassRow(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("posterior has zero mass for every class")]
    AllZeroPosterior,
    #[error("no channel observations")]
    NoObservations,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
