//! Horvitz-Thompson and Hájek estimation of finite-population distribution
//! functions and poverty rates under unequal-probability sampling designs,
//! with exact small-population oracles, limit-variance formulas, plug-in
//! variance estimators and a reproducible Monte Carlo driver.
//!
//! ```
//! use survey_ecdf::designs::Design;
//! use survey_ecdf::estimation::{hajek_ecdf, poverty_rate, WeightedSample};
//! use survey_ecdf::population::{generate_population, SuperPopulationLaw};
//! use survey_ecdf::rng::sample_stream;
//!
//! let law = SuperPopulationLaw::exponential(1.0)?;
//! let population = generate_population(&law, 10_000, 7)?;
//! let design = Design::srswor(10_000, 500)?;
//! let draw = design.draw(&mut sample_stream(7, 0, 0));
//! let sample = WeightedSample::from_draw(&population, &draw)?;
//! let phi = poverty_rate(&hajek_ecdf(&sample)?, 0.5, 0.6)?;
//! assert!((phi - law.poverty_rate(0.5, 0.6)).abs() < 0.1);
//! # Ok::<(), survey_ecdf::Error>(())
//! ```

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod designs;
pub mod error;
pub mod estimation;
pub mod montecarlo;
pub mod oracle;
pub mod population;
pub mod rng;

pub use error::{Error, Result};
