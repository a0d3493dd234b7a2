use std::path::PathBuf;

use thiserror::Error;

use crate::matrix::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ManifestSyntax: {0}")]
    ManifestSyntax(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("SizeMismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid matrix for space '{space}': {}", join(.violations))]
    InvalidMatrix {
        space: String,
        violations: Vec<Violation>,
    },

    #[error("IncompatibleMeasure: {0}")]
    IncompatibleMeasure(String),

    #[error("InvalidPayload: {0}")]
    InvalidPayload(String),

    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),

    #[error("UnitMismatch: '{0}' vs '{1}'")]
    UnitMismatch(String, String),

    #[error("GridMismatch: {0}")]
    GridMismatch(String),

    #[error("measure failed for cases ({i}, {j}) in space '{space}': {source}")]
    PairFailed {
        space: String,
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("DuplicateCaseId: '{0}'")]
    DuplicateCaseId(String),

    #[error("TooFewCases: need at least 2, got {0}")]
    TooFewCases(usize),

    #[error("UnknownSpace: '{0}'")]
    UnknownSpace(String),

    #[error("NormalizationMismatch: {0} vs {1}")]
    NormalizationMismatch(String, String),

    #[error("NotNormalized: clustering needs a rank or min-max matrix, got raw for '{0}'")]
    NotNormalized(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    /// Violations carried by this error, looking through pair wrappers.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::InvalidMatrix { violations, .. } => violations,
            _ => &[],
        }
    }
}
