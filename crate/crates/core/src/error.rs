use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while loading tables, building landscapes, or computing
/// landscape metrics and statistics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Structural problems in an input table (bad header, ragged rows, ...).
    #[error("format error at line {line}: {message}")]
    Format { line: u64, message: String },

    /// A performance cell that does not parse as a finite number.
    #[error("performance value {value:?} at line {line} is not a finite number")]
    ParsePerformance { line: u64, value: String },

    /// A complete landscape was requested but plans are missing.
    #[error(
        "landscape {environment:?} is incomplete: {measured} of {expected} plans measured \
         ({missing} missing, e.g. {examples})"
    )]
    Incomplete {
        environment: String,
        measured: usize,
        expected: usize,
        missing: usize,
        examples: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// A metric that is undefined on this landscape (zero variance, ...).
    #[error("degenerate landscape: {0}")]
    DegenerateLandscape(String),

    /// Every repeat of a random-walk study was degenerate.
    #[error("degenerate study: all {0} walk repeats were degenerate")]
    DegenerateStudy(usize),

    /// Wraps a failure with the pipeline stage and environment it occurred in.
    #[error("stage {stage} failed for environment {environment:?}: {source}")]
    Stage {
        stage: String,
        environment: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps this error with the stage and environment it occurred in.
    pub fn in_stage(self, stage: &str, environment: &str) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            environment: environment.to_string(),
            source: Box::new(self),
        }
    }
}
