use alloc::string::String;

/// Errors raised by the semantic layer, the bound solvers and the PHY.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("point does not match space: {0}")]
    PointMismatch(String),
    #[error("value {value} outside range [{lo}, {hi}] ({what})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid concept set: {0}")]
    InvalidConcepts(String),
    #[error("unknown concept index {0}")]
    UnknownConcept(usize),
    #[error("rejection sampling acceptance rate {rate:e} is below 1e-6")]
    DegenerateSampling { rate: f64 },
    #[error("invalid distortion model: {0}")]
    InvalidModel(String),
    #[error("rates must differ (got {0} for both)")]
    EqualRates(f64),
    #[error("target {target} is not above the feasibility floor {floor}")]
    Infeasible { target: f64, floor: f64 },
    #[error("target {0} is not below 1; any rate satisfies it")]
    TrivialTarget(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
