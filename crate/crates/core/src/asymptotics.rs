//! Limit covariances of the HT and Hájek empirical processes for designs
//! with deterministic inclusion probabilities, the asymptotic variances of
//! the HT and Hájek poverty-rate estimators, and their plug-in estimates.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimation::{
    poverty_rate_with, weighted_ecdf, Bandwidth, EstimatorKind, KernelDensity, QuantileRule, WeightedSample,
};
use crate::population::SuperPopulationLaw;

/// Two-sided 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959964;

/// Design constants entering the limit covariances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConstants {
    /// `n / N`
    pub lambda: f64,
    /// `(n/N^2) sum_i (1/pi_i - 1)`
    pub mu_pi1: f64,
    /// `(n/N^2) sum_{i != j} (pi_ij - pi_i pi_j) / (pi_i pi_j)` or its
    /// rejective-design expansion
    pub mu_pi2: f64,
    pub gamma_pi1: f64,
    pub gamma_pi2: f64,
    /// `sum_i pi_i (1 - pi_i)`
    pub d_n: f64,
}

impl DesignConstants {
    pub fn new(lambda: f64, mu_pi1: f64, mu_pi2: f64, d_n: f64) -> Self {
        Self { lambda, mu_pi1, mu_pi2, gamma_pi1: mu_pi1 + lambda, gamma_pi2: mu_pi2 - lambda, d_n }
    }
}

/// The four limit covariance forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitCovarianceForm {
    /// `mu1 F(s^t) + mu2 F(s) F(t)`
    HtVsFinite,
    /// `(mu1 + lambda) F(s^t) + (mu2 - lambda) F(s) F(t)`
    HtVsModel,
    /// `mu1 (F(s^t) - F(s) F(t))`
    HjVsFinite,
    /// `(mu1 + lambda) (F(s^t) - F(s) F(t))`
    HjVsModel,
}

pub fn limit_covariance(
    constants: &DesignConstants,
    law: &SuperPopulationLaw,
    form: LimitCovarianceForm,
    s: f64,
    t: f64,
) -> f64 {
    let (fs, ft, fmin) = (law.cdf(s), law.cdf(t), law.cdf(s.min(t)));
    let c = constants;
    match form {
        LimitCovarianceForm::HtVsFinite => c.mu_pi1 * fmin + c.mu_pi2 * fs * ft,
        LimitCovarianceForm::HtVsModel => c.gamma_pi1 * fmin + c.gamma_pi2 * fs * ft,
        LimitCovarianceForm::HjVsFinite => c.mu_pi1 * (fmin - fs * ft),
        LimitCovarianceForm::HjVsModel => c.gamma_pi1 * (fmin - fs * ft),
    }
}

pub fn limit_covariance_matrix(
    constants: &DesignConstants,
    law: &SuperPopulationLaw,
    form: LimitCovarianceForm,
    grid: &[f64],
) -> Array2<f64> {
    Array2::from_shape_fn((grid.len(), grid.len()), |(a, b)| limit_covariance(constants, law, form, grid[a], grid[b]))
}

/// Quantities of `F` entering the poverty-rate variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovertyQuantities {
    pub alpha: f64,
    pub beta: f64,
    /// `phi(F)`
    pub phi: f64,
    /// `f(F^-1(alpha))`
    pub density_at_quantile: f64,
    /// `f(beta F^-1(alpha))`
    pub density_at_scaled_quantile: f64,
}

impl PovertyQuantities {
    pub fn from_law(law: &SuperPopulationLaw, alpha: f64, beta: f64) -> Result<Self> {
        check_levels(alpha, beta)?;
        let q = law.quantile(alpha);
        let density = |t| law.density(t).ok_or_else(|| invalid("law has no density"));
        Ok(Self {
            alpha,
            beta,
            phi: law.poverty_rate(alpha, beta),
            density_at_quantile: density(q)?,
            density_at_scaled_quantile: density(beta * q)?,
        })
    }

    /// `beta f(beta q) / f(q)`
    fn slope(&self) -> Result<f64> {
        if !(self.density_at_quantile > 0.0) {
            return Err(Error::DerivativeUndefined { density: self.density_at_quantile });
        }
        Ok(self.beta * self.density_at_scaled_quantile / self.density_at_quantile)
    }
}

fn check_levels(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

/// Asymptotic variance of the HT poverty-rate estimator.
pub fn sigma2_ht(q: &PovertyQuantities, gamma_pi1: f64, gamma_pi2: f64) -> Result<f64> {
    let r = q.slope()?;
    let (a, phi) = (q.alpha, q.phi);
    Ok(r * r * (gamma_pi1 * a + gamma_pi2 * a * a) + gamma_pi1 * phi + gamma_pi2 * phi * phi
        - 2.0 * r * phi * (gamma_pi1 + gamma_pi2 * a))
}

/// Asymptotic variance of the Hájek poverty-rate estimator.
pub fn sigma2_hj(q: &PovertyQuantities, gamma_pi1: f64) -> Result<f64> {
    let r = q.slope()?;
    let (a, phi) = (q.alpha, q.phi);
    Ok(r * r * gamma_pi1 * a * (1.0 - a) + gamma_pi1 * phi * (1.0 - phi) - 2.0 * r * phi * gamma_pi1 * (1.0 - a))
}

pub fn poverty_variance_ht(
    constants: &DesignConstants,
    law: &SuperPopulationLaw,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    sigma2_ht(&PovertyQuantities::from_law(law, alpha, beta)?, constants.gamma_pi1, constants.gamma_pi2)
}

pub fn poverty_variance_hj(
    constants: &DesignConstants,
    law: &SuperPopulationLaw,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    sigma2_hj(&PovertyQuantities::from_law(law, alpha, beta)?, constants.gamma_pi1)
}

pub fn poverty_variance(
    kind: EstimatorKind,
    constants: &DesignConstants,
    law: &SuperPopulationLaw,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    match kind {
        EstimatorKind::HorvitzThompson => poverty_variance_ht(constants, law, alpha, beta),
        EstimatorKind::Hajek => poverty_variance_hj(constants, law, alpha, beta),
    }
}

/// Plug-in estimate of a poverty-rate estimator together with its variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginEstimate {
    pub phi: f64,
    pub variance: f64,
    pub quantities: PovertyQuantities,
}

/// Estimates the poverty rate and its asymptotic variance from one sample:
/// `F` is replaced by the matching weighted ECDF and `f` by the matching
/// design-weighted kernel density estimate.
pub fn plugin_poverty_estimate(
    sample: &WeightedSample,
    constants: &DesignConstants,
    alpha: f64,
    beta: f64,
    kind: EstimatorKind,
) -> Result<PluginEstimate> {
    plugin_poverty_estimate_with(sample, constants, alpha, beta, kind, QuantileRule::Inverse)
}

/// As [`plugin_poverty_estimate`], reading the quantile off by `rule`.
pub fn plugin_poverty_estimate_with(
    sample: &WeightedSample,
    constants: &DesignConstants,
    alpha: f64,
    beta: f64,
    kind: EstimatorKind,
    rule: QuantileRule,
) -> Result<PluginEstimate> {
    check_levels(alpha, beta)?;
    let f = weighted_ecdf(sample, kind)?;
    let q = f.quantile_with(alpha, rule)?;
    let phi = poverty_rate_with(&f, alpha, beta, rule)?;
    let kde = KernelDensity::new(sample, kind, Bandwidth::Rule)?;
    let quantities = PovertyQuantities {
        alpha,
        beta,
        phi,
        density_at_quantile: kde.eval(q),
        density_at_scaled_quantile: kde.eval(beta * q),
    };
    let variance = match kind {
        EstimatorKind::HorvitzThompson => sigma2_ht(&quantities, constants.gamma_pi1, constants.gamma_pi2)?,
        EstimatorKind::Hajek => sigma2_hj(&quantities, constants.gamma_pi1)?,
    };
    Ok(PluginEstimate { phi, variance, quantities })
}

pub fn plugin_poverty_variance(
    sample: &WeightedSample,
    constants: &DesignConstants,
    alpha: f64,
    beta: f64,
    kind: EstimatorKind,
) -> Result<f64> {
    plugin_poverty_estimate(sample, constants, alpha, beta, kind).map(|e| e.variance)
}

/// Asymptotic variance of `sqrt(n) (HT mean - E Y)`:
/// `gamma1 E[Y^2] + gamma2 (E Y)^2`.
pub fn ht_mean_variance(constants: &DesignConstants, law: &SuperPopulationLaw) -> f64 {
    constants.gamma_pi1 * law.second_moment() + constants.gamma_pi2 * law.mean().powi(2)
}

/// Wald interval `estimate -/+ 1.959964 sqrt(variance / n)`.
pub fn wald_interval(estimate: f64, variance: f64, expected_size: f64) -> (f64, f64) {
    let half = Z_975 * (variance.max(0.0) / expected_size).sqrt();
    (estimate - half, estimate + half)
}
