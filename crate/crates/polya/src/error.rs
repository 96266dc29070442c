use thiserror::Error;

/// Errors shared by all toolkit modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation requires a nonempty word")]
    EmptyWord,

    #[error("pattern length {pattern} invalid for word length {word}")]
    PatternLength { pattern: usize, word: usize },

    #[error("{argument} = {value} outside valid domain {domain}")]
    Domain {
        argument: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("noise (0, 0) has no noisy-channel limit; use the noiseless, seed-dependent form")]
    DegenerateNoise,

    #[error("operation applies to the {expected:?} rule, got {got:?}")]
    RuleMismatch {
        expected: crate::models::Rule,
        got: crate::models::Rule,
    },

    #[error("projected work {projected} exceeds budget {budget}")]
    BudgetExceeded { projected: u128, budget: u128 },

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("unsupported model for this operation: {0}")]
    UnsupportedSpec(String),

    #[error("noise must be exact rationals for enumeration; got a non-rational parameter")]
    NonRationalNoise,

    #[error("support 2^{horizon} too large for plug-in estimation (guideline max {max}); pass the override to proceed")]
    SupportTooLarge { horizon: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
