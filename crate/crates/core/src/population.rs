//! Finite populations drawn from a super-population law, and the exact
//! super-population quantities (F, f, F^-1, poverty rate) of that law.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng;

/// Law of the responses `Y_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuperPopulationLaw {
    Exponential {
        rate: f64,
    },
    Uniform01,
    /// Finite support; `points` strictly increasing, `masses` summing to one.
    Discrete {
        points: Vec<f64>,
        masses: Vec<f64>,
    },
}

impl SuperPopulationLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        let law = Self::Exponential { rate };
        law.validate()?;
        Ok(law)
    }

    pub fn discrete(points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        let law = Self::Discrete { points, masses };
        law.validate()?;
        Ok(law)
    }

    pub fn point_mass(at: f64) -> Self {
        Self::Discrete { points: vec![at], masses: vec![1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(invalid(format!("exponential rate must be positive, got {rate}")));
                }
            }
            Self::Uniform01 => {}
            Self::Discrete { points, masses } => {
                if points.is_empty() || points.len() != masses.len() {
                    return Err(invalid("discrete law needs equally many points and masses (at least one)"));
                }
                if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("discrete points must be finite and strictly increasing"));
                }
                if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                    return Err(invalid("discrete masses must be nonnegative"));
                }
                let total: f64 = masses.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("discrete masses sum to {total}, expected 1")));
                }
            }
        }
        Ok(())
    }

    /// All mass on a single point.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Self::Discrete { masses, .. } => masses.iter().filter(|m| **m > 0.0).count() == 1,
            _ => false,
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Self::Discrete { .. })
    }

    /// F(t), right-continuous.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
            Self::Uniform01 => t.clamp(0.0, 1.0),
            Self::Discrete { points, masses } => {
                let k = points.partition_point(|&p| p <= t);
                masses[..k].iter().sum::<f64>().min(1.0)
            }
        }
    }

    /// Density of a continuous law; `None` for discrete laws.
    pub fn density(&self, t: f64) -> Option<f64> {
        match self {
            Self::Exponential { rate } => Some(if t < 0.0 { 0.0 } else { rate * (-rate * t).exp() }),
            Self::Uniform01 => Some(if (0.0..=1.0).contains(&t) { 1.0 } else { 0.0 }),
            Self::Discrete { .. } => None,
        }
    }

    /// Generalized inverse `inf{t : F(t) >= alpha}`.
    pub fn quantile(&self, alpha: f64) -> f64 {
        match self {
            Self::Exponential { rate } => -(-alpha).ln_1p() / rate,
            Self::Uniform01 => alpha.clamp(0.0, 1.0),
            Self::Discrete { points, masses } => {
                let mut acc = 0.0;
                for (p, m) in points.iter().zip(masses) {
                    acc += m;
                    if acc >= alpha {
                        return *p;
                    }
                }
                *points.last().expect("validated law has points")
            }
        }
    }

    /// `F(beta * F^-1(alpha))`.
    pub fn poverty_rate(&self, alpha: f64, beta: f64) -> f64 {
        match self {
            Self::Exponential { .. } => -(beta * (-alpha).ln_1p()).exp_m1(),
            _ => self.cdf(beta * self.quantile(alpha)),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Uniform01 => 0.5,
            Self::Discrete { points, masses } => points.iter().zip(masses).map(|(p, m)| p * m).sum(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 2.0 / (rate * rate),
            Self::Uniform01 => 1.0 / 3.0,
            Self::Discrete { points, masses } => points.iter().zip(masses).map(|(p, m)| p * p * m).sum(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            Self::Uniform01 => rng.random::<f64>(),
            Self::Discrete { points, masses } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (p, m) in points.iter().zip(masses) {
                    acc += m;
                    if u < acc {
                        return *p;
                    }
                }
                *points.last().expect("validated law has points")
            }
        }
    }
}

/// A finite population of responses `y` and positive design variables `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    y: Vec<f64>,
    z: Vec<f64>,
}

impl Population {
    pub fn new(y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(invalid("population must contain at least one unit"));
        }
        if y.len() != z.len() {
            return Err(invalid(format!("y has {} units but z has {}", y.len(), z.len())));
        }
        if z.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("design variables must be positive"));
        }
        Ok(Self { y, z })
    }

    /// Population with unit design variables.
    pub fn from_responses(y: Vec<f64>) -> Result<Self> {
        let z = vec![1.0; y.len()];
        Self::new(y, z)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn size(&self) -> usize {
        self.y.len()
    }
}

/// Draws `size` i.i.d. responses from `law` using `rng`.
pub fn generate_population_with<R: Rng + ?Sized>(
    law: &SuperPopulationLaw,
    size: usize,
    rng: &mut R,
) -> Result<Population> {
    law.validate()?;
    if size == 0 {
        return Err(invalid("population size must be at least 1"));
    }
    let y = (0..size).map(|_| law.sample(rng)).collect();
    Population::from_responses(y)
}

/// Draws a population from the stream keyed by `seed`.
pub fn generate_population(law: &SuperPopulationLaw, size: usize, seed: u64) -> Result<Population> {
    generate_population_with(law, size, &mut rng::population_stream(seed, 0))
}

pub fn true_cdf(law: &SuperPopulationLaw, t: f64) -> f64 {
    law.cdf(t)
}

pub fn true_quantile(law: &SuperPopulationLaw, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(law.quantile(alpha))
}

pub fn true_poverty_rate(law: &SuperPopulationLaw, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    Ok(law.poverty_rate(alpha, beta))
}
