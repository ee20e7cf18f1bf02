use crate::designs::SampleDraw;
use crate::error::{invalid, Error, Result};
use crate::population::Population;

/// HT or Hájek weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "HT")]
    HorvitzThompson,
    #[serde(rename = "HJ")]
    Hajek,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::HorvitzThompson => "HT",
            Self::Hajek => "HJ",
        }
    }
}

/// Responses and inclusion probabilities of the sampled units.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    y: Vec<f64>,
    pi: Vec<f64>,
    population_size: usize,
}

impl WeightedSample {
    pub fn new(y: Vec<f64>, pi: Vec<f64>, population_size: usize) -> Result<Self> {
        if y.len() != pi.len() {
            return Err(invalid("responses and inclusion probabilities differ in length"));
        }
        if population_size == 0 || y.len() > population_size {
            return Err(invalid(format!("sample of {} units from population of {population_size}", y.len())));
        }
        if let Some((unit, &pi)) = pi.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
            return Err(Error::ZeroInclusionProbability { unit, pi });
        }
        Ok(Self { y, pi, population_size })
    }

    pub fn from_draw(population: &Population, draw: &SampleDraw) -> Result<Self> {
        if draw.population_size() != population.size() {
            return Err(invalid("draw and population sizes differ"));
        }
        let y = draw.included.iter().map(|&i| population.y()[i]).collect();
        Self::new(y, draw.pi_of_included.clone(), population.size())
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn population_size(&self) -> usize {
        self.population_size
    }

    /// Realized sample size `n_s`.
    pub fn size(&self) -> usize {
        self.y.len()
    }

    pub fn estimated_population_size(&self) -> f64 {
        self.pi.iter().map(|p| 1.0 / p).sum()
    }
}

/// How a quantile is read off a weighted step function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileRule {
    /// Generalized inverse `inf{t : F(t) >= alpha}`.
    #[default]
    Inverse,
    /// Weighted linear interpolation between neighbouring order statistics.
    /// With cumulative weights `W_k` and divisor `D`, the position
    /// `r = 1 + (D - 1) alpha` is split into `floor(r)` and `floor(r) + 1`
    /// (capped at `D`); each is mapped to the first jump whose cumulative
    /// weight reaches it and the two values are interpolated with weight
    /// `r - floor(r)`. With unit weights this is the usual sample quantile
    /// interpolating order statistics (`type = 7` in R); with general
    /// weights it matches `Hmisc::wtd.quantile(type = "quantile")`.
    Interpolated,
}

/// Right-continuous nondecreasing step function with jumps at distinct sorted locations.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedStepFunction {
    jumps: Vec<f64>,
    cumulative: Vec<f64>,
    total_mass: f64,
    divisor: f64,
}

impl WeightedStepFunction {
    /// Jump of `weights[i] / divisor` at each `values[i]`; tied values merge
    /// into a single jump. When `divisor` is `None` the weights are
    /// self-normalized and the total mass is exactly one.
    pub fn from_weighted(values: &[f64], weights: &[f64], divisor: Option<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(invalid("values and weights differ in length"));
        }
        if values.iter().any(|v| v.is_nan()) || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("values must not be NaN and weights must be finite and nonnegative"));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

        let mut jumps: Vec<f64> = Vec::with_capacity(values.len());
        let mut raw: Vec<f64> = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for i in order {
            acc += weights[i];
            if jumps.last() == Some(&values[i]) {
                *raw.last_mut().expect("paired with jumps") = acc;
            } else {
                jumps.push(values[i]);
                raw.push(acc);
            }
        }
        let divisor = match divisor {
            Some(d) => d,
            None if acc > 0.0 => acc,
            None => return Err(Error::EmptySample),
        };
        if !(divisor > 0.0 && divisor.is_finite()) {
            return Err(invalid(format!("divisor must be positive, got {divisor}")));
        }
        let cumulative: Vec<f64> = raw.iter().map(|c| c / divisor).collect();
        let total_mass = cumulative.last().copied().unwrap_or(0.0);
        Ok(Self { jumps, cumulative, total_mass, divisor })
    }

    /// Scale the raw weights were divided by (`N`, `N_hat` or the total weight).
    pub fn divisor(&self) -> f64 {
        self.divisor
    }

    pub fn jump_locations(&self) -> &[f64] {
        &self.jumps
    }

    pub fn cumulative_mass(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Mass of all jumps at locations `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.jumps.partition_point(|&x| x <= t) {
            0 => 0.0,
            k => self.cumulative[k - 1],
        }
    }

    /// `inf{t : F(t) >= alpha}` over the jump locations.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if self.total_mass < alpha {
            return Err(Error::QuantileUndefined { alpha, total_mass: self.total_mass });
        }
        let k = self.cumulative.partition_point(|&c| c < alpha);
        Ok(self.jumps[k])
    }

    pub fn quantile_with(&self, alpha: f64, rule: QuantileRule) -> Result<f64> {
        match rule {
            QuantileRule::Inverse => self.quantile(alpha),
            QuantileRule::Interpolated => self.interpolated_quantile(alpha),
        }
    }

    fn interpolated_quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if self.jumps.is_empty() {
            return Err(Error::EmptySample);
        }
        let d = self.divisor;
        let position = 1.0 + (d - 1.0) * alpha;
        let low = position.floor().max(1.0);
        let high = (low + 1.0).min(d);
        let frac = position - position.floor();
        let last = self.jumps.len() - 1;
        // first jump whose cumulative weight reaches `w`, clamped to the last
        let at = |w: f64| self.jumps[self.cumulative.partition_point(|&c| c * d < w).min(last)];
        let (a, b) = (at(low), at(high));
        Ok(a + frac * (b - a))
    }
}

/// `F^HT(t) = (1/N) sum_s 1{Y_i <= t} / pi_i`.
pub fn ht_ecdf(sample: &WeightedSample) -> Result<WeightedStepFunction> {
    let w: Vec<f64> = sample.pi.iter().map(|p| 1.0 / p).collect();
    WeightedStepFunction::from_weighted(&sample.y, &w, Some(sample.population_size as f64))
}

/// `F^HJ(t) = (1/N_hat) sum_s 1{Y_i <= t} / pi_i`.
pub fn hajek_ecdf(sample: &WeightedSample) -> Result<WeightedStepFunction> {
    if sample.y.is_empty() {
        return Err(Error::EmptySample);
    }
    let w: Vec<f64> = sample.pi.iter().map(|p| 1.0 / p).collect();
    WeightedStepFunction::from_weighted(&sample.y, &w, None)
}

pub fn weighted_ecdf(sample: &WeightedSample, kind: EstimatorKind) -> Result<WeightedStepFunction> {
    match kind {
        EstimatorKind::HorvitzThompson => ht_ecdf(sample),
        EstimatorKind::Hajek => hajek_ecdf(sample),
    }
}

/// Unweighted empirical CDF `F_N` of the whole population.
pub fn population_ecdf(population: &Population) -> WeightedStepFunction {
    let w = vec![1.0; population.size()];
    WeightedStepFunction::from_weighted(population.y(), &w, Some(population.size() as f64))
        .expect("population responses are finite")
}

pub fn weighted_quantile(f: &WeightedStepFunction, alpha: f64) -> Result<f64> {
    f.quantile(alpha)
}

pub fn weighted_quantile_with(f: &WeightedStepFunction, alpha: f64, rule: QuantileRule) -> Result<f64> {
    f.quantile_with(alpha, rule)
}
