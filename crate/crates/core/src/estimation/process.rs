use serde::{Deserialize, Serialize};

use super::ecdf::{hajek_ecdf, ht_ecdf, population_ecdf, WeightedSample, WeightedStepFunction};
use crate::designs::SampleDraw;
use crate::error::{invalid, Result};
use crate::population::{Population, SuperPopulationLaw};

/// Which empirical process to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    /// `sqrt(n) (F^HT - F_N)`
    HtVsFinite,
    /// `sqrt(n) (F^HT - F)`
    HtVsModel,
    /// `sqrt(n) (F^HJ - F_N)`
    HjVsFinite,
    /// `sqrt(n) (F^HJ - F)`
    HjVsModel,
    /// `G_N^pi(t) = sqrt(n)/N sum_i xi_i / pi_i (1{Y_i <= t} - F(t))`
    GPi,
    /// `Y_N(t) = sqrt(n)/N sum_i (xi_i / pi_i - 1) (1{Y_i <= t} - F(t))`
    YN,
}

impl ProcessKind {
    pub fn needs_law(self) -> bool {
        !matches!(self, Self::HtVsFinite | Self::HjVsFinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Evaluates process paths of draws from one population.
///
/// `expected_size` is the design-expected sample size used in `sqrt(n)`.
#[derive(Debug, Clone)]
pub struct ProcessEvaluator<'a> {
    population: &'a Population,
    finite_cdf: WeightedStepFunction,
    expected_size: f64,
    law: Option<&'a SuperPopulationLaw>,
}

impl<'a> ProcessEvaluator<'a> {
    pub fn new(population: &'a Population, expected_size: f64, law: Option<&'a SuperPopulationLaw>) -> Result<Self> {
        if !(expected_size > 0.0) {
            return Err(invalid(format!("expected sample size must be positive, got {expected_size}")));
        }
        Ok(Self { population, finite_cdf: population_ecdf(population), expected_size, law })
    }

    pub fn finite_cdf(&self) -> &WeightedStepFunction {
        &self.finite_cdf
    }

    pub fn path(&self, draw: &SampleDraw, grid: &[f64], kind: ProcessKind) -> Result<ProcessPath> {
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("grid must be sorted"));
        }
        let law = match (kind.needs_law(), self.law) {
            (true, None) => return Err(invalid(format!("{kind:?} needs a super-population law"))),
            (_, law) => law,
        };
        let model_cdf = |t: f64| law.map_or(f64::NAN, |l| l.cdf(t));
        let root_n = self.expected_size.sqrt();
        let size = self.population.size() as f64;
        let sample = WeightedSample::from_draw(self.population, draw)?;

        let values: Vec<f64> = match kind {
            ProcessKind::HtVsFinite | ProcessKind::HtVsModel => {
                let f = ht_ecdf(&sample)?;
                grid.iter()
                    .map(|&t| {
                        let center =
                            if kind == ProcessKind::HtVsFinite { self.finite_cdf.eval(t) } else { model_cdf(t) };
                        root_n * (f.eval(t) - center)
                    })
                    .collect()
            }
            ProcessKind::HjVsFinite | ProcessKind::HjVsModel => {
                let f = hajek_ecdf(&sample)?;
                grid.iter()
                    .map(|&t| {
                        let center =
                            if kind == ProcessKind::HjVsFinite { self.finite_cdf.eval(t) } else { model_cdf(t) };
                        root_n * (f.eval(t) - center)
                    })
                    .collect()
            }
            ProcessKind::GPi => grid
                .iter()
                .map(|&t| {
                    let ft = model_cdf(t);
                    let s: f64 =
                        sample.y().iter().zip(sample.pi()).map(|(&y, p)| (f64::from(u8::from(y <= t)) - ft) / p).sum();
                    root_n / size * s
                })
                .collect(),
            ProcessKind::YN => {
                let y = self.population.y();
                grid.iter()
                    .map(|&t| {
                        let ft = model_cdf(t);
                        let mut s = 0.0;
                        let mut k = 0;
                        for (i, &yi) in y.iter().enumerate() {
                            let weight = if draw.indicators[i] {
                                let w = 1.0 / draw.pi_of_included[k] - 1.0;
                                k += 1;
                                w
                            } else {
                                -1.0
                            };
                            s += weight * (f64::from(u8::from(yi <= t)) - ft);
                        }
                        root_n / size * s
                    })
                    .collect()
            }
        };
        Ok(ProcessPath { grid: grid.to_vec(), values })
    }
}

pub fn process_path(
    population: &Population,
    draw: &SampleDraw,
    expected_size: f64,
    grid: &[f64],
    kind: ProcessKind,
    law: Option<&SuperPopulationLaw>,
) -> Result<ProcessPath> {
    ProcessEvaluator::new(population, expected_size, law)?.path(draw, grid, kind)
}
