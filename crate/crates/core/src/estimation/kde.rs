use std::f64::consts::PI;

use super::ecdf::{hajek_ecdf, EstimatorKind, WeightedSample};
use crate::error::{Error, Result};

/// Bandwidth rule constant in `b = 0.79 R n_s^{-1/5}`.
pub const BANDWIDTH_FACTOR: f64 = 0.79;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `0.79 R n_s^{-1/5}` with `R` the design-weighted interquartile range.
    Rule,
    Fixed(f64),
}

fn gaussian(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

/// Design-weighted Gaussian kernel density estimate
/// `f(t) = 1 / (D b) * sum_s K((t - Y_i) / b) / pi_i`, where `D` is `N_hat`
/// for the Hájek form and `N` for the HT form.
#[derive(Debug, Clone)]
pub struct KernelDensity<'a> {
    sample: &'a WeightedSample,
    bandwidth: f64,
    divisor: f64,
}

impl<'a> KernelDensity<'a> {
    pub fn new(sample: &'a WeightedSample, kind: EstimatorKind, bandwidth: Bandwidth) -> Result<Self> {
        let bandwidth = match bandwidth {
            Bandwidth::Fixed(b) if b > 0.0 && b.is_finite() => b,
            Bandwidth::Fixed(b) => return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {b}"))),
            Bandwidth::Rule => rule_bandwidth(sample)?,
        };
        let divisor = match kind {
            EstimatorKind::HorvitzThompson => sample.population_size() as f64,
            EstimatorKind::Hajek => sample.estimated_population_size(),
        };
        if !(divisor > 0.0) {
            return Err(Error::EmptySample);
        }
        Ok(Self { sample, bandwidth, divisor })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn eval(&self, t: f64) -> f64 {
        let b = self.bandwidth;
        let s: f64 = self.sample.y().iter().zip(self.sample.pi()).map(|(y, p)| gaussian((t - y) / b) / p).sum();
        s / (self.divisor * b)
    }
}

/// `0.79 R n_s^{-1/5}`.
///
/// `R` is always read from the self-normalized (Hájek) ECDF, also for the
/// HT density: the HT ECDF may have total mass below 3/4, and the IQR is a
/// scale statistic that does not depend on how the weights are normalized.
pub fn rule_bandwidth(sample: &WeightedSample) -> Result<f64> {
    if sample.size() < 2 {
        return Err(Error::InvalidParameter(format!(
            "bandwidth rule needs at least 2 sampled units, got {}",
            sample.size()
        )));
    }
    let f = hajek_ecdf(sample)?;
    let iqr = f.quantile(0.75)? - f.quantile(0.25)?;
    if !(iqr > 0.0) {
        return Err(Error::DegenerateBandwidth { iqr });
    }
    Ok(BANDWIDTH_FACTOR * iqr * (sample.size() as f64).powf(-0.2))
}

pub fn kde_density(sample: &WeightedSample, t: f64, kind: EstimatorKind, bandwidth: Bandwidth) -> Result<f64> {
    Ok(KernelDensity::new(sample, kind, bandwidth)?.eval(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_point_fixed_bandwidth() {
        let s = WeightedSample::new(vec![0.0], vec![1.0], 1).unwrap();
        let v = kde_density(&s, 0.0, EstimatorKind::Hajek, Bandwidth::Fixed(1.0)).unwrap();
        assert_abs_diff_eq!(v, 0.398942, epsilon = 1e-6);
    }

    #[test]
    fn symmetric_data_gives_symmetric_density() {
        let s = WeightedSample::new(vec![-2.0, -0.5, 0.5, 2.0, 0.0], vec![0.2, 0.7, 0.7, 0.2, 0.4], 40).unwrap();
        let k = KernelDensity::new(&s, EstimatorKind::Hajek, Bandwidth::Rule).unwrap();
        for t in [0.1, 0.8, 1.7, 3.0] {
            assert_abs_diff_eq!(k.eval(t), k.eval(-t), epsilon = 1e-15);
        }
    }

    #[test]
    fn hajek_density_integrates_to_one() {
        let s =
            WeightedSample::new(vec![0.3, 1.1, 0.7, 2.5, 0.05, 1.6], vec![0.1, 0.3, 0.2, 0.5, 0.1, 0.25], 50).unwrap();
        let k = KernelDensity::new(&s, EstimatorKind::Hajek, Bandwidth::Rule).unwrap();
        let (lo, hi, m) = (-10.0, 13.0, 20_000);
        let h = (hi - lo) / f64::from(m);
        let mut integral = 0.5 * (k.eval(lo) + k.eval(hi));
        for i in 1..m {
            integral += k.eval(lo + h * f64::from(i));
        }
        integral *= h;
        assert!((integral - 1.0).abs() < 1e-3, "integral {integral}");
    }

    #[test]
    fn ht_uses_population_size() {
        let s = WeightedSample::new(vec![1.0, 2.0], vec![0.5, 0.5], 8).unwrap();
        let hj = kde_density(&s, 1.5, EstimatorKind::Hajek, Bandwidth::Fixed(0.5)).unwrap();
        let ht = kde_density(&s, 1.5, EstimatorKind::HorvitzThompson, Bandwidth::Fixed(0.5)).unwrap();
        // N_hat = 4, N = 8
        assert_abs_diff_eq!(ht, hj * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rule_bandwidth_value() {
        let s = WeightedSample::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.5; 4], 8).unwrap();
        // quartiles 1 and 3
        let b = rule_bandwidth(&s).unwrap();
        assert_abs_diff_eq!(b, 0.79 * 2.0 * 4f64.powf(-0.2), epsilon = 1e-15);
    }

    #[test]
    fn ht_density_with_low_total_mass() {
        // HT total mass 0.5: the HT quartile at 3/4 does not exist
        let s = WeightedSample::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.5; 4], 16).unwrap();
        let k = KernelDensity::new(&s, EstimatorKind::HorvitzThompson, Bandwidth::Rule).unwrap();
        assert!(k.eval(2.5) > 0.0);
    }

    #[test]
    fn degenerate_bandwidth() {
        let s = WeightedSample::new(vec![2.0, 2.0, 2.0], vec![0.5; 3], 8).unwrap();
        assert!(matches!(rule_bandwidth(&s), Err(Error::DegenerateBandwidth { .. })));
        let one = WeightedSample::new(vec![2.0], vec![0.5], 8).unwrap();
        assert!(rule_bandwidth(&one).is_err());
    }
}
