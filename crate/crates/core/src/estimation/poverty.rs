use super::ecdf::{QuantileRule, WeightedStepFunction};
use crate::error::{invalid, Error, Result};

/// Plug-in poverty rate `F(beta * F^-1(alpha))`.
pub fn poverty_rate(f: &WeightedStepFunction, alpha: f64, beta: f64) -> Result<f64> {
    poverty_rate_with(f, alpha, beta, QuantileRule::Inverse)
}

/// Poverty rate with the quantile read off by `rule`.
pub fn poverty_rate_with(f: &WeightedStepFunction, alpha: f64, beta: f64, rule: QuantileRule) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    let q = f.quantile_with(alpha, rule)?;
    Ok(f.eval(beta * q))
}

/// Hadamard derivative of the poverty rate at `F` in direction `h`:
/// `-beta f(beta q) / f(q) * h(q) + h(beta q)` with `q = F^-1(alpha)`.
pub fn hadamard_direction_value(
    density_at_quantile: f64,
    density_at_scaled_quantile: f64,
    h_at_quantile: f64,
    h_at_scaled_quantile: f64,
    beta: f64,
) -> Result<f64> {
    if !(density_at_quantile > 0.0) {
        return Err(Error::DerivativeUndefined { density: density_at_quantile });
    }
    let ratio = density_at_scaled_quantile / density_at_quantile;
    Ok(-beta * ratio * h_at_quantile + h_at_scaled_quantile)
}
