use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at quadrature node {node} (x = {x})")]
    NonFiniteAtNode { node: usize, x: f64 },

    #[error("non-finite value during {stage}")]
    NonFinite { stage: &'static str },

    #[error("step size underflow at t = {t}: h = {h} below {h_min}")]
    StepSizeUnderflow { t: f64, h: f64, h_min: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("value {value} at index {index} must be strictly positive")]
    NonPositive { index: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
