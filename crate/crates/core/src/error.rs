use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Exact integer arithmetic left the representable range.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("move {index} is not in the kernel of the configuration")]
    NotInKernel { index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The sufficient statistic lies on the boundary of the model's cone, so
    /// the maximum likelihood estimate does not exist.
    #[error("sufficient statistic is on the boundary (zero rows: {rows:?})")]
    Boundary { rows: Vec<usize> },

    #[error("fit did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A chain state left its fiber, or a state was found outside an enumerated fiber.
    #[error("fiber consistency breach: {0}")]
    FiberBreach(String),

    #[error("fiber enumeration exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("autocorrelation is undefined for a constant series")]
    ConstantSeries,

    #[error("statistic evaluation failed at step {step}: {source}")]
    Statistic {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow(_) | Error::Boundary { .. } | Error::NonConvergence { .. } => 3,
            Error::FiberBreach(_) => 4,
            Error::Statistic { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
