use num_complex::Complex64;

use crate::fit::FitReport;
use crate::format_point;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Evaluation failure of a barycentric model at a single point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    /// The denominator evaluated to exactly zero while the numerator did not.
    #[error("pole at {}", format_point(point))]
    Pole { point: Vec<Complex64> },
    /// Numerator and denominator both evaluated to exactly zero.
    #[error("indeterminate value (0/0) at {}", format_point(point))]
    Indeterminate { point: Vec<Complex64> },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// Linear-algebra failure (e.g. SVD did not converge).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A data generator exhausted its rejection-sampling budget.
    #[error("generation failed: {0}")]
    Generation(String),

    /// The greedy fit selected the same point twice without progress.
    /// The partially fitted model and its report are preserved so callers
    /// can still inspect or persist them.
    #[error("fit stagnated: {reason}")]
    Stagnation {
        reason: String,
        model: Box<crate::barycentric::BarycentricModel>,
        report: Box<FitReport>,
    },

    /// File format violation (schema, version, malformed field).
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
