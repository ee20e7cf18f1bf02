//! Replicated-population, replicated-sample experiments for the poverty-rate
//! estimators: relative biases, relative bias of the plug-in variance,
//! coverage of Wald intervals, empirical-process covariances and normality
//! diagnostics.
//!
//! Population `i` is generated from the stream `(seed, i)` and sample `j` of
//! it is drawn from `(seed, i, j)`. Populations are processed in parallel but
//! every population is handled sequentially and the per-population results
//! are combined in population order, so reports do not depend on the number
//! of worker threads.

mod stats;

use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use stats::{clustered, sample_sd, Tally};
pub use stats::{ks_distance_to_normal, skewness_kurtosis, Estimate};

use crate::asymptotics::{
    ht_mean_variance, limit_covariance_matrix, plugin_poverty_estimate_with, poverty_variance, wald_interval,
    DesignConstants, LimitCovarianceForm,
};
use crate::designs::{two_level_pi_ordered, Design};
use crate::error::{invalid, Error, Result};
use crate::estimation::{
    population_ecdf, poverty_rate_with, weighted_ecdf, EstimatorKind, ProcessEvaluator, ProcessKind, QuantileRule,
    WeightedSample,
};
use crate::population::{generate_population_with, Population, SuperPopulationLaw};
use crate::rng::{population_stream, sample_stream};

/// Largest share of failed replications tolerated before a scenario fails.
pub const MAX_FAILURE_RATE: f64 = 0.01;

/// Sampling design of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DesignKind {
    /// Simple random sampling without replacement of size `n`.
    #[serde(rename = "SI")]
    Si,
    /// Bernoulli sampling with `p = n/N`.
    #[serde(rename = "BE")]
    Be,
    /// Poisson sampling with `0.4 n/N` on a random half of the population
    /// and `1.6 n/N` on the other half.
    #[serde(rename = "PO")]
    Po,
    /// Rejective sampling of size `n` with the two-level working
    /// probabilities of `PO`.
    #[serde(rename = "REJ")]
    Rej,
}

impl DesignKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Si => "SI",
            Self::Be => "BE",
            Self::Po => "PO",
            Self::Rej => "REJ",
        }
    }
}

fn default_law() -> SuperPopulationLaw {
    SuperPopulationLaw::Exponential { rate: 1.0 }
}
fn default_alpha() -> f64 {
    0.5
}
fn default_beta() -> f64 {
    0.6
}
fn default_replications() -> usize {
    200
}

/// One cell of a simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(rename = "N")]
    pub population_size: usize,
    #[serde(rename = "n")]
    pub sample_size: usize,
    pub design: DesignKind,
    #[serde(default = "default_law")]
    pub law: SuperPopulationLaw,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Number of generated populations.
    #[serde(default = "default_replications")]
    pub populations: usize,
    /// Number of samples drawn from each population.
    #[serde(default = "default_replications")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Quantile convention used for every poverty rate, including the
    /// finite-population target.
    #[serde(default)]
    pub quantile_rule: QuantileRule,
}

impl Scenario {
    /// Exp(1) responses, `alpha = 0.5`, `beta = 0.6`, 200 x 200 replications.
    pub fn new(population_size: usize, sample_size: usize, design: DesignKind) -> Self {
        Self {
            population_size,
            sample_size,
            design,
            law: default_law(),
            alpha: default_alpha(),
            beta: default_beta(),
            populations: default_replications(),
            samples: default_replications(),
            seed: 0,
            quantile_rule: QuantileRule::Inverse,
        }
    }

    pub fn with_replications(mut self, populations: usize, samples: usize) -> Self {
        self.populations = populations;
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_quantile_rule(mut self, rule: QuantileRule) -> Self {
        self.quantile_rule = rule;
        self
    }

    pub fn with_law(mut self, law: SuperPopulationLaw) -> Self {
        self.law = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 || self.sample_size > self.population_size {
            return Err(invalid(format!(
                "need 1 <= n <= N, got n = {}, N = {}",
                self.sample_size, self.population_size
            )));
        }
        if self.populations == 0 || self.samples == 0 {
            return Err(invalid("replication counts must be at least 1"));
        }
        if self.samples >= 1 << 31 {
            return Err(invalid("too many samples per population"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        self.law.validate()
    }

    fn replications(&self) -> usize {
        self.populations * self.samples
    }
}

/// Design of a scenario: either shared by all populations or, for `PO`,
/// re-assigned to a random half of every population.
struct PreparedDesign {
    shared: Option<Design>,
    constants: DesignConstants,
}

impl PreparedDesign {
    fn new(sc: &Scenario) -> Result<Self> {
        let (big, n) = (sc.population_size, sc.sample_size);
        let shared = match sc.design {
            DesignKind::Si => Design::srswor(big, n)?,
            DesignKind::Be => Design::bernoulli(big, n as f64 / big as f64)?,
            // the ordered assignment only fixes the constants; draws use a
            // fresh assignment per population
            DesignKind::Po => Design::poisson(two_level_pi_ordered(big, n)?)?,
            // responses are i.i.d., so a fixed assignment of the working
            // probabilities is as good as a random one
            DesignKind::Rej => Design::rejective(two_level_pi_ordered(big, n)?, n)?,
        };
        let constants = shared.constants();
        let shared = (sc.design != DesignKind::Po).then_some(shared);
        Ok(Self { shared, constants })
    }

    /// Population `i` and the design to sample it with.
    fn population(&self, sc: &Scenario, i: usize) -> Result<(Population, Option<Design>)> {
        let mut rng = population_stream(sc.seed, i as u64);
        let population = generate_population_with(&sc.law, sc.population_size, &mut rng)?;
        let own = match self.shared {
            Some(_) => None,
            None => Some(Design::two_level_poisson(sc.population_size, sc.sample_size, &mut rng)?),
        };
        Ok((population, own))
    }
}

/// Centering of a relative bias or a coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Center {
    /// The finite-population poverty rate of each generated population.
    #[serde(rename = "F_N")]
    FiniteN,
    /// The super-population poverty rate.
    #[serde(rename = "F")]
    Model,
}

impl Center {
    pub fn label(self) -> &'static str {
        match self {
            Self::FiniteN => "phi(F_N)",
            Self::Model => "phi(F)",
        }
    }
}

/// Results for one estimator. Percentages throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimator: EstimatorKind,
    /// Reference asymptotic variance from the law's exact quantities.
    pub asymptotic_variance: f64,
    pub rb_phi_finite: Estimate,
    pub rb_phi_model: Estimate,
    pub rb_av: Estimate,
    pub coverage_finite: Estimate,
    pub coverage_model: Estimate,
    pub replications: usize,
    pub failures: usize,
}

impl EstimatorReport {
    pub fn rb_phi(&self, center: Center) -> Estimate {
        match center {
            Center::FiniteN => self.rb_phi_finite,
            Center::Model => self.rb_phi_model,
        }
    }

    pub fn coverage(&self, center: Center) -> Estimate {
        match center {
            Center::FiniteN => self.coverage_finite,
            Center::Model => self.coverage_model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub scenario: Scenario,
    pub constants: DesignConstants,
    pub phi_model: f64,
    /// HT first, then Hájek.
    pub estimators: Vec<EstimatorReport>,
    /// Replications of an `SI` scenario where the HT and Hájek estimates were
    /// not bitwise identical; always zero for other designs.
    pub si_mismatches: usize,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub elapsed_seconds: f64,
}

impl MonteCarloReport {
    pub fn estimator(&self, kind: EstimatorKind) -> &EstimatorReport {
        self.estimators.iter().find(|e| e.estimator == kind).expect("both estimators are always reported")
    }
}

const KINDS: [EstimatorKind; 2] = [EstimatorKind::HorvitzThompson, EstimatorKind::Hajek];

#[derive(Default)]
struct KindTallies {
    rb_finite: Tally,
    rb_model: Tally,
    rb_av: Tally,
    cover_finite: Tally,
    cover_model: Tally,
    failures: usize,
}

#[derive(Default)]
struct PopulationOutcome {
    kinds: [KindTallies; 2],
    si_mismatches: usize,
}

/// Relative deviation in percent; a zero target is only matched exactly.
fn relative(estimate: f64, target: f64) -> Result<f64> {
    if target != 0.0 {
        Ok(100.0 * (estimate - target) / target)
    } else if estimate == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Scenario(format!("relative deviation from a zero target (estimate {estimate})")))
    }
}

fn covers(estimate: f64, variance: f64, n: f64, target: f64) -> f64 {
    let (lo, hi) = wald_interval(estimate, variance, n);
    if lo <= target && target <= hi {
        100.0
    } else {
        0.0
    }
}

/// Point estimate and plug-in variance of one estimator. Samples from a
/// point-mass law carry no density information; their variance estimate is
/// zero, giving a zero-width interval.
fn estimate(
    sample: &WeightedSample,
    constants: &DesignConstants,
    sc: &Scenario,
    kind: EstimatorKind,
) -> Result<(f64, f64)> {
    if sc.law.is_degenerate() {
        let f = weighted_ecdf(sample, kind)?;
        return Ok((poverty_rate_with(&f, sc.alpha, sc.beta, sc.quantile_rule)?, 0.0));
    }
    plugin_poverty_estimate_with(sample, constants, sc.alpha, sc.beta, kind, sc.quantile_rule)
        .map(|e| (e.phi, e.variance))
}

fn reference_variance(sc: &Scenario, constants: &DesignConstants, kind: EstimatorKind) -> Result<f64> {
    if sc.law.is_degenerate() {
        return Ok(0.0);
    }
    poverty_variance(kind, constants, &sc.law, sc.alpha, sc.beta)
}

fn check_failures(what: &str, failures: usize, total: usize) -> Result<()> {
    if failures as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(Error::Scenario(format!(
            "{what}: {failures} of {total} replications failed, above the {}% limit",
            100.0 * MAX_FAILURE_RATE
        )));
    }
    Ok(())
}

/// Runs a scenario on the current rayon pool.
pub fn run_scenario(sc: &Scenario) -> Result<MonteCarloReport> {
    let start = Instant::now();
    sc.validate()?;
    let prepared = PreparedDesign::new(sc)?;
    let constants = prepared.constants;
    let phi_model = sc.law.poverty_rate(sc.alpha, sc.beta);
    let av = [reference_variance(sc, &constants, KINDS[0])?, reference_variance(sc, &constants, KINDS[1])?];
    let n = sc.sample_size as f64;

    let outcomes: Vec<PopulationOutcome> = (0..sc.populations)
        .into_par_iter()
        .map(|i| -> Result<PopulationOutcome> {
            let (population, own) = prepared.population(sc, i)?;
            let design = own.as_ref().or(prepared.shared.as_ref()).expect("a design is always available");
            let phi_finite = poverty_rate_with(&population_ecdf(&population), sc.alpha, sc.beta, sc.quantile_rule)?;
            let mut out = PopulationOutcome::default();
            for j in 0..sc.samples {
                let draw = design.draw(&mut sample_stream(sc.seed, i as u64, j as u64));
                let sample = WeightedSample::from_draw(&population, &draw)?;
                let mut phis = [None; 2];
                for (k, kind) in KINDS.into_iter().enumerate() {
                    let tally = &mut out.kinds[k];
                    let Ok((phi, var)) = estimate(&sample, &constants, sc, kind) else {
                        tally.failures += 1;
                        continue;
                    };
                    phis[k] = Some(phi);
                    tally.rb_finite.push(relative(phi, phi_finite)?);
                    tally.rb_model.push(relative(phi, phi_model)?);
                    tally.rb_av.push(relative(var, av[k])?);
                    tally.cover_finite.push(covers(phi, var, n, phi_finite));
                    tally.cover_model.push(covers(phi, var, n, phi_model));
                }
                if sc.design == DesignKind::Si && phis[0].map(f64::to_bits) != phis[1].map(f64::to_bits) {
                    out.si_mismatches += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let total = sc.replications();
    let mut estimators = Vec::with_capacity(2);
    for (k, kind) in KINDS.into_iter().enumerate() {
        let pick =
            |f: fn(&KindTallies) -> Tally| clustered(&outcomes.iter().map(|o| f(&o.kinds[k])).collect::<Vec<_>>());
        let failures: usize = outcomes.iter().map(|o| o.kinds[k].failures).sum();
        check_failures(kind.label(), failures, total)?;
        estimators.push(EstimatorReport {
            estimator: kind,
            asymptotic_variance: av[k],
            rb_phi_finite: pick(|t| t.rb_finite),
            rb_phi_model: pick(|t| t.rb_model),
            rb_av: pick(|t| t.rb_av),
            coverage_finite: pick(|t| t.cover_finite),
            coverage_model: pick(|t| t.cover_model),
            replications: total - failures,
            failures,
        });
    }

    let mut warnings = Vec::new();
    if matches!(sc.law, SuperPopulationLaw::Exponential { .. }) {
        for e in &estimators {
            for center in [Center::FiniteN, Center::Model] {
                let rb = e.rb_phi(center).value;
                if rb >= 0.0 {
                    warnings.push(format!(
                        "{} relative bias against {} is nonnegative ({rb:.4}%); exponential responses usually give underestimates",
                        e.estimator.label(),
                        center.label()
                    ));
                }
            }
        }
    }

    Ok(MonteCarloReport {
        scenario: sc.clone(),
        constants,
        phi_model,
        estimators,
        si_mismatches: outcomes.iter().map(|o| o.si_mismatches).sum(),
        warnings,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Empirical covariance of a scaled ECDF process against its limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessCovarianceCheck {
    pub form: LimitCovarianceForm,
    pub grid: Vec<f64>,
    pub empirical: Array2<f64>,
    pub limit: Array2<f64>,
    /// Monte Carlo standard error of each empirical entry, clustered by
    /// population.
    pub standard_error: Array2<f64>,
    pub max_abs_error: f64,
    /// `max |empirical - limit| / standard_error`; zero when both vanish.
    pub max_standardized_error: f64,
}

struct Cluster {
    count: usize,
    sum: Vec<f64>,
    cross: Array2<f64>,
}

impl Cluster {
    fn new(k: usize) -> Self {
        Self { count: 0, sum: vec![0.0; k], cross: Array2::zeros((k, k)) }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1;
        for (a, xa) in x.iter().enumerate() {
            self.sum[a] += xa;
            for (b, xb) in x.iter().enumerate() {
                self.cross[[a, b]] += xa * xb;
            }
        }
    }
}

fn process_kind(form: LimitCovarianceForm) -> ProcessKind {
    match form {
        LimitCovarianceForm::HtVsFinite => ProcessKind::HtVsFinite,
        LimitCovarianceForm::HtVsModel => ProcessKind::HtVsModel,
        LimitCovarianceForm::HjVsFinite => ProcessKind::HjVsFinite,
        LimitCovarianceForm::HjVsModel => ProcessKind::HjVsModel,
    }
}

/// Compares the covariance of the chosen process over all replications of
/// `sc` with the closed-form limit built from the design constants.
pub fn process_covariance_check(
    sc: &Scenario,
    grid: &[f64],
    form: LimitCovarianceForm,
) -> Result<ProcessCovarianceCheck> {
    sc.validate()?;
    if grid.is_empty() || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("grid must be nonempty and sorted"));
    }
    let prepared = PreparedDesign::new(sc)?;
    let kind = process_kind(form);
    let k = grid.len();
    // with a single population every sample is its own cluster
    let per_sample = sc.populations == 1;

    let clusters: Vec<Vec<Cluster>> = (0..sc.populations)
        .into_par_iter()
        .map(|i| -> Result<Vec<Cluster>> {
            let (population, own) = prepared.population(sc, i)?;
            let design = own.as_ref().or(prepared.shared.as_ref()).expect("a design is always available");
            let evaluator = ProcessEvaluator::new(&population, sc.sample_size as f64, Some(&sc.law))?;
            let mut out = vec![Cluster::new(k)];
            for j in 0..sc.samples {
                let draw = design.draw(&mut sample_stream(sc.seed, i as u64, j as u64));
                let path = evaluator.path(&draw, grid, kind)?;
                if per_sample && j > 0 {
                    out.push(Cluster::new(k));
                }
                out.last_mut().expect("nonempty").push(&path.values);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let clusters: Vec<Cluster> = clusters.into_iter().flatten().collect();

    let total = clusters.iter().map(|c| c.count).sum::<usize>() as f64;
    let mean: Vec<f64> = (0..k).map(|a| clusters.iter().map(|c| c.sum[a]).sum::<f64>() / total).collect();
    let mut empirical = Array2::zeros((k, k));
    let mut standard_error = Array2::zeros((k, k));
    for a in 0..k {
        for b in 0..k {
            let cross: f64 = clusters.iter().map(|c| c.cross[[a, b]]).sum();
            empirical[[a, b]] = cross / total - mean[a] * mean[b];
            let centered: Vec<f64> = clusters
                .iter()
                .map(|c| {
                    let m = c.count as f64;
                    c.cross[[a, b]] / m - mean[a] * c.sum[b] / m - c.sum[a] / m * mean[b] + mean[a] * mean[b]
                })
                .collect();
            standard_error[[a, b]] = sample_sd(&centered) / (centered.len() as f64).sqrt();
        }
    }
    let limit = limit_covariance_matrix(&prepared.constants, &sc.law, form, grid);
    let mut max_abs_error = 0.0f64;
    let mut max_standardized_error = 0.0f64;
    for ((e, l), se) in empirical.iter().zip(&limit).zip(&standard_error) {
        let err = (e - l).abs();
        max_abs_error = max_abs_error.max(err);
        let z = if err == 0.0 { 0.0 } else { err / se };
        max_standardized_error = max_standardized_error.max(z);
    }
    Ok(ProcessCovarianceCheck {
        form,
        grid: grid.to_vec(),
        empirical,
        limit,
        standard_error,
        max_abs_error,
        max_standardized_error,
    })
}

/// Replicated statistic examined by [`normality_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    PhiHt,
    PhiHj,
    /// HT estimator of the mean, `(1/N) sum_s y_i / pi_i`.
    HtMean,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityDiagnostic {
    pub statistic: Statistic,
    pub replications: usize,
    pub failures: usize,
    /// Mean and variance of the standardized statistic (ideally 0 and 1).
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_distance: f64,
    /// Kolmogorov distance after centering and scaling by the empirical mean
    /// and variance: the shape part of `ks_distance`, free of finite-sample
    /// bias in the location.
    pub ks_distance_standardized: f64,
}

/// Minimum number of replications for [`normality_diagnostic`].
pub const MIN_NORMALITY_REPLICATIONS: usize = 1000;

/// Standardizes `sqrt(n) (T - target)` by the asymptotic variance of the
/// model-centered statistic and measures its distance to the standard normal.
pub fn normality_diagnostic(sc: &Scenario, statistic: Statistic) -> Result<NormalityDiagnostic> {
    sc.validate()?;
    if sc.law.is_degenerate() {
        return Err(Error::ZeroVariance("point-mass law".into()));
    }
    if sc.replications() < MIN_NORMALITY_REPLICATIONS {
        return Err(invalid(format!(
            "normality diagnostics need at least {MIN_NORMALITY_REPLICATIONS} replications, got {}",
            sc.replications()
        )));
    }
    let prepared = PreparedDesign::new(sc)?;
    let constants = prepared.constants;
    let (target, variance) = match statistic {
        Statistic::PhiHt | Statistic::PhiHj => {
            let kind =
                if statistic == Statistic::PhiHt { EstimatorKind::HorvitzThompson } else { EstimatorKind::Hajek };
            (sc.law.poverty_rate(sc.alpha, sc.beta), poverty_variance(kind, &constants, &sc.law, sc.alpha, sc.beta)?)
        }
        Statistic::HtMean => (sc.law.mean(), ht_mean_variance(&constants, &sc.law)),
    };
    if !(variance > 0.0) {
        return Err(Error::ZeroVariance(format!("asymptotic variance {variance}")));
    }
    let n = sc.sample_size as f64;
    let scale = (n / variance).sqrt();

    let per_population: Vec<(Vec<f64>, usize)> = (0..sc.populations)
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, usize)> {
            let (population, own) = prepared.population(sc, i)?;
            let design = own.as_ref().or(prepared.shared.as_ref()).expect("a design is always available");
            let mut z = Vec::with_capacity(sc.samples);
            let mut failures = 0;
            for j in 0..sc.samples {
                let draw = design.draw(&mut sample_stream(sc.seed, i as u64, j as u64));
                let sample = WeightedSample::from_draw(&population, &draw)?;
                let value =
                    match statistic {
                        Statistic::PhiHt => weighted_ecdf(&sample, EstimatorKind::HorvitzThompson)
                            .and_then(|f| poverty_rate_with(&f, sc.alpha, sc.beta, sc.quantile_rule)),
                        Statistic::PhiHj => weighted_ecdf(&sample, EstimatorKind::Hajek)
                            .and_then(|f| poverty_rate_with(&f, sc.alpha, sc.beta, sc.quantile_rule)),
                        Statistic::HtMean => Ok(sample.y().iter().zip(sample.pi()).map(|(y, p)| y / p).sum::<f64>()
                            / sc.population_size as f64),
                    };
                match value {
                    Ok(v) => z.push(scale * (v - target)),
                    Err(_) => failures += 1,
                }
            }
            Ok((z, failures))
        })
        .collect::<Result<_>>()?;

    let failures: usize = per_population.iter().map(|p| p.1).sum();
    check_failures("normality diagnostic", failures, sc.replications())?;
    let z: Vec<f64> = per_population.into_iter().flat_map(|p| p.0).collect();
    let count = z.len() as f64;
    let mean = z.iter().sum::<f64>() / count;
    let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance("replicated statistic is constant".into()));
    }
    let (skewness, excess_kurtosis) = skewness_kurtosis(&z);
    Ok(NormalityDiagnostic {
        statistic,
        replications: z.len(),
        failures,
        mean,
        variance: var,
        skewness,
        excess_kurtosis,
        ks_distance: ks_distance_to_normal(&z),
        ks_distance_standardized: {
            let sd = var.sqrt();
            ks_distance_to_normal(&z.iter().map(|v| (v - mean) / sd).collect::<Vec<_>>())
        },
    })
}
