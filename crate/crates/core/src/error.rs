use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("depth map has no valid pixels")]
    EmptyMask,
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },
    #[error("approximation is invalid at valid pixel ({x}, {y})")]
    MaskCoverage { x: usize, y: usize },
    #[error("invalid depth map: {0}")]
    InvalidDepthMap(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("transform is singular")]
    SingularTransform,
    #[error("scale component is zero")]
    ZeroScale,
    #[error("depth range must be positive, got {0}")]
    NonPositiveRange(f64),
    #[error("number of periods must be positive, got {0}")]
    NonPositivePeriods(f64),
    #[error("all valid pixels share one depth value; nothing to encode")]
    ZeroRange,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image encode failed: {0}")]
    Encode(String),
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error("container part missing: {0}")]
    MissingPart(String),
    #[error("unsupported container version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("no jointly valid pixels within the outlier threshold")]
    EmptyIntersection,
    #[error("no sweep row reaches target rms {0} mm")]
    TargetUnreachable(f64),
    #[error("precision must be positive, got {0}")]
    NonPositivePrecision(f64),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(offset: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn dims(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_w: left.0,
            left_h: left.1,
            right_w: right.0,
            right_h: right.1,
        }
    }
}
