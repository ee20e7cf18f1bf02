use thiserror::Error;

/// Errors produced by the sampling, estimation and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("inclusion probability of unit {unit} is {pi}, weights require pi > 0")]
    ZeroInclusionProbability { unit: usize, pi: f64 },

    #[error("empty sample: the estimated population size is zero")]
    EmptySample,

    #[error("quantile undefined: alpha = {alpha} exceeds total mass {total_mass}")]
    QuantileUndefined { alpha: f64, total_mass: f64 },

    #[error("derivative undefined: density at the quantile is {density}")]
    DerivativeUndefined { density: f64 },

    #[error("degenerate bandwidth: interquartile range is {iqr}")]
    DegenerateBandwidth { iqr: f64 },

    #[error("calibration did not converge after {iterations} iterations (residual {residual:e})")]
    Calibration { iterations: usize, residual: f64 },

    #[error("capacity exceeded: {what} = {value} is above the limit {limit}")]
    Capacity { what: &'static str, value: f64, limit: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("scenario failed: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
