//! Error type shared by every module in the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by curve evaluation, generation, detection, metrics, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A derivative order beyond what the function family supports.
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    /// A vector or matrix had the wrong length/shape for the operation.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// A configuration value is out of its documented domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Optimization or evaluation produced a non-finite value.
    #[error("numeric failure: {context}{}", fmt_execution(.execution))]
    NumericFailure {
        context: &'static str,
        execution: Option<usize>,
    },

    /// Ground truth is unusable for segment metrics (no drift, or all drift).
    #[error("degenerate ground truth: {0}")]
    DegenerateGroundTruth(&'static str),

    /// Score series and ground truth disagree on the number of executions.
    #[error("score series has length {got}, ground truth expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// Correlation over fewer than three points or with zero variance.
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    /// A benchmark produced no usable rows to report.
    #[error("empty benchmark result: {0}")]
    EmptyBenchResult(String),

    /// One (dataset, seed, detector) evaluation failed; the triple names it.
    #[error("bench triple {triple} failed: {source}")]
    BenchTriple {
        triple: String,
        #[source]
        source: Box<Error>,
    },

    /// Unknown preset name requested.
    #[error("unknown preset '{0}' (expected dataset-1, dataset-2, or dataset-3)")]
    UnknownPreset(String),

    /// Underlying filesystem error.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file contents (CSV, JSON, or packed binary).
    #[error("malformed input in {path}: {detail}")]
    MalformedInput { path: String, detail: String },
}

fn fmt_execution(execution: &Option<usize>) -> String {
    match execution {
        Some(t) => format!(" (execution {t})"),
        None => String::new(),
    }
}

impl Error {
    /// Shorthand for configuration errors built from a formatted message.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// Attach an execution index to a numeric failure, leaving other errors untouched.
    pub fn at_execution(self, t: usize) -> Self {
        match self {
            Error::NumericFailure { context, .. } => Error::NumericFailure {
                context,
                execution: Some(t),
            },
            other => other,
        }
    }

    /// Wrap an I/O error with the path it occurred on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for malformed-input errors.
    pub fn malformed(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::MalformedInput {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
