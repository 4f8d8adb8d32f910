//! Error types shared across the grading pipeline.

use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Raster dimensions that do not fit an operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension error: {0}")]
pub struct DimensionError(pub String);

impl DimensionError {
    pub(crate) fn new(msg: impl Into<String>) -> Self {
        DimensionError(msg.into())
    }
}

/// Failures while locating the sheet in a borderline mask.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionError {
    #[error("empty borderline mask")]
    EmptyMask,
    #[error("found {found} corner candidates, need at least 4")]
    InsufficientCorners { found: usize },
    #[error("selected corners do not form a convex quadrilateral")]
    DegenerateQuad,
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("quadrilateral is degenerate or not ordered TL, TR, BR, BL")]
    DegenerateQuad,
    #[error("homography system is singular")]
    SingularHomography,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemplateError {
    #[error("area {index} expands outside the canonical sheet")]
    AreaOutOfBounds { index: usize },
    #[error("invalid template: {0}")]
    Invalid(String),
}

/// Malformed text or JSON input. `line` is 1-based when known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{source_name}{}: {field}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
pub struct ParseError {
    pub source_name: String,
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(
        source_name: impl Into<String>,
        line: Option<usize>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        ParseError {
            source_name: source_name.into(),
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("label is empty; accuracy is undefined")]
    EmptyLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("invalid sheet spec: {0}")]
    InvalidSpec(String),
    #[error("layout does not fit the canonical sheet: {0}")]
    LayoutOverflow(String),
    #[error("invalid distortion spec: {0}")]
    InvalidDistortion(String),
}

/// Top-level error for IO-bearing operations (corpus, reports, CLI).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
