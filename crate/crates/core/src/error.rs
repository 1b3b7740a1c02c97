use thiserror::Error;

/// Errors produced by the imaging operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("every pixel is masked; nothing to interpolate from")]
    FullyMasked,

    #[error("operation requires a single-channel raster, got {0} channels")]
    NotGrayscale(usize),

    #[error("kernel too large: {levels} levels need min(width, height) > {required}, got {actual}")]
    KernelTooLarge {
        levels: usize,
        required: usize,
        actual: usize,
    },

    #[error("filter spec: {0}")]
    Spec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate landmarks: {0}")]
    DegenerateLandmarks(String),

    #[error("missing landmark measurement: {0}")]
    MissingMeasurement(String),

    #[error("landmark file line {line}: {message}")]
    LandmarkSyntax { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
