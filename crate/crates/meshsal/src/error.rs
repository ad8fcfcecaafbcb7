//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("degenerate faces (area <= {epsilon}): {faces:?}")]
    DegenerateFaces { faces: Vec<usize>, epsilon: f64 },

    #[error("mesh has no per-corner UV coordinates but a texture operation was requested")]
    MissingUv,

    #[error("degenerate UV triangle on face {face} (area <= {epsilon})")]
    DegenerateUv { face: usize, epsilon: f64 },

    #[error("face index {face} out of range (mesh has {count} faces)")]
    FaceIndexOutOfRange { face: usize, count: usize },

    #[error("unsupported texture format for {path}: {message}")]
    UnsupportedTexture { path: PathBuf, message: String },

    #[error("truncated texture file {path}: expected {expected} bytes of pixel data, found {found}")]
    TruncatedTexture {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("gaze log is empty")]
    EmptyLog,

    #[error("saliency map total is zero: no fixation contributed")]
    ZeroSaliencyTotal,

    #[error("saliency map length {got} does not match expected face count {expected}")]
    MapLengthMismatch { expected: usize, got: usize },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
