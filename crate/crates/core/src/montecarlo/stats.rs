//! Small summary-statistics helpers for replicated experiments.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

/// Running sums kept per population, then combined across populations in a
/// fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Tally {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Tally {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

/// Grand mean over all replications, with a standard error clustered by
/// population (the spread of the per-population means). With a single
/// population the within-population spread is used instead.
pub(crate) fn clustered(tallies: &[Tally]) -> Estimate {
    let count: usize = tallies.iter().map(|t| t.count).sum();
    if count == 0 {
        return Estimate { value: f64::NAN, standard_error: f64::NAN };
    }
    let value = tallies.iter().map(|t| t.sum).sum::<f64>() / count as f64;
    let means: Vec<f64> = tallies.iter().filter_map(Tally::mean).collect();
    let standard_error = if means.len() >= 2 {
        sample_sd(&means) / (means.len() as f64).sqrt()
    } else {
        let sq: f64 = tallies.iter().map(|t| t.sum_sq).sum::<f64>() / count as f64;
        let var = (sq - value * value).max(0.0) * count as f64 / (count.max(2) - 1) as f64;
        (var / count as f64).sqrt()
    };
    Estimate { value, standard_error }
}

pub(crate) fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Sample skewness and excess kurtosis (moment estimators).
pub fn skewness_kurtosis(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// Kolmogorov distance between the sample and the standard normal law,
/// evaluated at the observed values with the mid-point ECDF
/// `(#{x < v} + #{x = v} / 2) / n`. The mid-point convention keeps the
/// distance meaningful for lattice-valued statistics, whose ECDF jumps
/// would otherwise dominate the supremum.
pub fn ks_distance_to_normal(x: &[f64]) -> f64 {
    let normal = Normal::standard();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let mid = (i as f64 + (j - i) as f64 / 2.0) / n;
        worst = worst.max((mid - normal.cdf(sorted[i])).abs());
        i = j;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn clustered_mean_and_se() {
        let t = [Tally { count: 2, sum: 2.0, sum_sq: 2.0 }, Tally { count: 2, sum: 6.0, sum_sq: 18.0 }];
        let e = clustered(&t);
        assert_eq!(e.value, 2.0);
        // means 1 and 3: sd sqrt(2), se 1
        assert_abs_diff_eq!(e.standard_error, 1.0, epsilon = 1e-15);

        let mut one = Tally::default();
        for x in [0.0, 0.0, 2.0, 2.0] {
            one.push(x);
        }
        let single = clustered(&[one]);
        // unbiased variance 4/3, se sqrt(1/3)
        assert_abs_diff_eq!(single.standard_error, (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn normal_sample_diagnostics() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..20_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (s, k) = skewness_kurtosis(&x);
        assert!(s.abs() < 0.06 && k.abs() < 0.12, "{s} {k}");
        assert!(ks_distance_to_normal(&x) < 0.015);
    }

    #[test]
    fn ks_of_shifted_sample_is_large() {
        let x: Vec<f64> = (0..1000).map(|i| 3.0 + f64::from(i) * 1e-3).collect();
        assert!(ks_distance_to_normal(&x) > 0.99);
        // all mass at zero: mid ECDF 0.5 equals Phi(0)
        assert_abs_diff_eq!(ks_distance_to_normal(&[0.0; 10]), 0.0, epsilon = 1e-15);
    }
}
