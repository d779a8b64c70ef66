use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter violates a named precondition. `rule` is a short stable
    /// identifier; `message` quotes the violated inequality.
    #[error("{rule}: {message}")]
    InvalidParameter { rule: &'static str, message: String },

    #[error("enumeration budget exceeded: estimated {estimated:.3e} points, limit {limit:.3e}")]
    BudgetExceeded { estimated: f64, limit: f64 },

    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    pub fn invalid(rule: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            rule,
            message: message.into(),
        }
    }

    /// Stable rule identifier, used by the CLI and the HTTP service.
    pub fn rule(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidParameter { rule, .. } => rule,
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::Oracle(_) => "oracle-failure",
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub(crate) fn check_budget(estimated: f64, limit: f64) -> Result<()> {
    if !(estimated <= limit) {
        return Err(Error::BudgetExceeded { estimated, limit });
    }
    Ok(())
}
