use thiserror::Error;

/// Errors raised by instance construction, oracle evaluation and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A constructor precondition failed. `condition` names the violated
    /// constraint in readable form.
    #[error("parameter domain violated: {condition} ({detail})")]
    ParameterDomain {
        condition: &'static str,
        detail: String,
    },

    /// The requested accuracy lies outside the regime of the chosen family;
    /// the caller should switch to `directive`.
    #[error("outside the main regime: {detail}; use the {directive} family instead")]
    Regime {
        detail: String,
        directive: &'static str,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation not supported for family {family}: {reason}")]
    Unsupported { family: String, reason: &'static str },

    #[error("prox step gamma = {gamma:e} outside the validity range (must be < {bound:e})")]
    GammaOutOfRange { gamma: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
