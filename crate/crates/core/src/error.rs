use thiserror::Error;

pub type Result<T, E = HardyError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty vector")]
    Empty,

    #[error("entry {index} must be strictly positive and finite, got {value}")]
    NonPositive { index: usize, value: String },

    #[error("parameter outside the family's domain: {0}")]
    Parameter(String),

    #[error("generator evaluation failed: {0}")]
    Generator(String),

    #[error("malformed descriptor `{descriptor}`: {reason}")]
    Descriptor { descriptor: String, reason: String },

    #[error("interval [{a}, {b}) is outside the support [0, {end})")]
    OutsideSupport { a: String, b: String, end: String },

    #[error("block {0} has size zero")]
    EmptyBlock(usize),

    #[error("exact rational weights are required")]
    ExactRequired,

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("expansion of size {size} exceeds the budget {budget}")]
    BudgetExceeded { size: String, budget: u64 },

    #[error("step function is not nonincreasing at piece {0}")]
    NotNonincreasing(usize),

    #[error("partition order not certified: {0}")]
    NotPreceding(String),
}

impl HardyError {
    pub fn descriptor(descriptor: &str, reason: impl Into<String>) -> Self {
        HardyError::Descriptor {
            descriptor: descriptor.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by violated preconditions or theorem hypotheses,
    /// as opposed to malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            HardyError::Hypothesis(_)
                | HardyError::Inconclusive(_)
                | HardyError::ExactRequired
                | HardyError::BudgetExceeded { .. }
                | HardyError::NotNonincreasing(_)
                | HardyError::NotPreceding(_)
                | HardyError::OutsideSupport { .. }
        )
    }
}
