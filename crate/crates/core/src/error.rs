use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Errors raised by the numeric routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A design or data matrix has fewer than two subjects or conditions.
    Dimension { subjects: usize, conditions: usize },
    /// The value buffer does not match the declared shape.
    Shape { expected: usize, found: usize },
    /// A data cell is NaN or infinite.
    NonFinite { row: usize, col: usize },
    /// Residual sum of squares is zero while the treatment effect is not,
    /// so F is undefined.
    DegenerateResidual,
    /// An argument is outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Design parameters could not be recovered from reported dfs.
    Inference(InferenceError),
    /// A simulation cell failed; carries the cell label.
    Cell { label: String, source: Box<Error> },
}

/// Why a repeated-measures design could not be inferred from a pair of dfs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InferenceError {
    /// At least one df is fractional, typically a sphericity-corrected value.
    NonIntegerDf { df1: f64, df2: f64 },
    /// A df is below one.
    NonPositiveDf { df1: f64, df2: f64 },
    /// df2 is not a multiple of df1, so no (n, k) satisfies the df formulas.
    NotDivisible { df1: u64, df2: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                subjects,
                conditions,
            } => write!(
                f,
                "need at least 2 subjects and 2 conditions, got {subjects} x {conditions}"
            ),
            Error::Shape { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            Error::NonFinite { row, col } => {
                write!(f, "non-finite value at row {row}, column {col}")
            }
            Error::DegenerateResidual => {
                f.write_str("residual sum of squares is zero; F is undefined")
            }
            Error::Domain { what, value } => write!(f, "{what} (got {value})"),
            Error::Inference(e) => e.fmt(f),
            Error::Cell { label, source } => write!(f, "cell {label}: {source}"),
        }
    }
}

impl fmt::Display for InferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InferenceError::NonIntegerDf { df1, df2 } => write!(
                f,
                "fractional dfs ({df1}, {df2}) look sphericity-corrected; supply n and k explicitly"
            ),
            InferenceError::NonPositiveDf { df1, df2 } => {
                write!(f, "dfs ({df1}, {df2}) must both be at least 1")
            }
            InferenceError::NotDivisible { df1, df2 } => write!(
                f,
                "df2 = {df2} is not a multiple of df1 = {df1}; not a one-factor repeated-measures design"
            ),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Inference(e) => Some(e),
            Error::Cell { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

impl core::error::Error for InferenceError {}

impl From<InferenceError> for Error {
    fn from(e: InferenceError) -> Self {
        Error::Inference(e)
    }
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
