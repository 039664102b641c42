use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },

    #[error("k = {k} nearest neighbours requested but the cloud has only {n} points")]
    TooFewPoints { k: usize, n: usize },

    #[error("vertex {vertex} has zero degree, self-tuning weights with alpha = {alpha} are undefined")]
    ZeroDegree { vertex: usize, alpha: f64 },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid labels: {0}")]
    Labels(String),

    #[error("vertex {vertex} is not connected to any labeled vertex")]
    Disconnected { vertex: usize },

    #[error("no unlabeled vertices to solve for")]
    NoUnlabeled,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("problems are posed on different graphs")]
    GraphMismatch,

    #[error("gradient vanishes at the evaluation point (|grad| = {norm:e})")]
    VanishingGradient { norm: f64 },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("class {class} has no labeled vertices")]
    EmptyClass { class: usize },

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
