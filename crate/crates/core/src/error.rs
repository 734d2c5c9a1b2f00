use thiserror::Error;

/// State of an integration at the last accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastGoodState {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("value {value} outside the domain [-1, 1] of the prescribed function")]
    Domain { value: f64 },

    #[error("case {case} is inconsistent with lambda = {lambda}, v_last = {v_last}")]
    InvalidCase { case: &'static str, lambda: f64, v_last: f64 },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("integration failed at s = {} (step size underflow)", .0.s)]
    StepFailure(LastGoodState),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
