use thiserror::Error;

pub type Result<T, E = MatteError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MatteError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    Dimension {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("buffer of length {len} does not hold {width}x{height} pixels")]
    BufferLength { width: usize, height: usize, len: usize },
    #[error("invalid value {value} at index {index}: {reason}")]
    InvalidValue {
        index: usize,
        value: u8,
        reason: &'static str,
    },
    #[error("matte has no foreground pixels")]
    EmptyForeground,
    #[error("seed ({row}, {col}) does not lie on a semi-transparent pixel")]
    InvalidSeed { row: usize, col: usize },
    #[error("evaluation mask selects no pixels")]
    EmptyMask,
    #[error("connectivity error undefined: the mattes share no fully opaque region")]
    ConnUndefined,
    #[error("sequence lengths differ: {pred} predicted frames vs {gt} ground-truth frames")]
    SequenceLength { pred: usize, gt: usize },
    #[error("temporal metrics need at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("unsupported image format: {0}")]
    Format(String),
    #[error("png decode: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("png encode: {0}")]
    Encode(#[from] png::EncodingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
