use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("budget exceeded: {what} needs {required} points, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: usize,
        budget: usize,
    },

    #[error("dimension {0} is not supported here")]
    DimensionUnsupported(usize),

    #[error("the origin is not in the closure of the set")]
    OriginNotInSet,

    #[error("no exact evaluation path for this law and set; supply a Monte Carlo spec")]
    NeedMonteCarlo,

    #[error("subadditivity violated: u({m}+{n}) exceeds u({m}) + u({n}) by {gap}")]
    SubadditivityViolated { m: usize, n: usize, gap: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
