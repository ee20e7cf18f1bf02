//! Horvitz-Thompson and Hájek weighted empirical CDFs, their quantiles,
//! the poverty-rate functional, design-weighted kernel density estimates and
//! the associated empirical processes.

mod ecdf;
mod kde;
mod poverty;
mod process;

pub use ecdf::{
    hajek_ecdf, ht_ecdf, population_ecdf, weighted_ecdf, weighted_quantile, weighted_quantile_with, EstimatorKind,
    QuantileRule, WeightedSample, WeightedStepFunction,
};
pub use kde::{kde_density, rule_bandwidth, Bandwidth, KernelDensity, BANDWIDTH_FACTOR};
pub use poverty::{hadamard_direction_value, poverty_rate, poverty_rate_with};
pub use process::{process_path, ProcessEvaluator, ProcessKind, ProcessPath};
