use super::Rejective;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 1000 }
    }
}

/// Working probabilities of a rejective design together with the achieved fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Working probabilities, normalized so that they sum to `n`.
    pub p: Vec<f64>,
    /// Max-norm distance between achieved and target inclusion probabilities.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds working probabilities `p` whose rejective design of size `n` has
/// first-order inclusion probabilities `target_pi`.
///
/// Iterates `odds_i <- odds_i * [t_i (1 - pi_i)] / [pi_i (1 - t_i)]`, halving
/// the step (as an exponent) whenever the residual grows, and rescales the
/// odds after every step so that the working probabilities sum to `n`.
pub fn calibrate_rejective_p(target_pi: &[f64], n: usize, options: CalibrationOptions) -> Result<Calibration> {
    let size = target_pi.len();
    if n == 0 || n + 1 > size {
        return Err(invalid(format!("calibration needs 1 <= n <= N - 1, got n = {n}, N = {size}")));
    }
    if let Some((i, v)) = target_pi.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
        return Err(invalid(format!("target inclusion probability of unit {i} is {v}, expected (0, 1)")));
    }
    let total: f64 = target_pi.iter().sum();
    if (total - n as f64).abs() > 1e-9 {
        return Err(invalid(format!("target inclusion probabilities sum to {total}, expected n = {n}")));
    }
    if !(options.tol > 0.0) || options.max_iter == 0 {
        return Err(invalid("calibration needs tol > 0 and max_iter >= 1"));
    }

    if target_pi.iter().all(|&v| v == target_pi[0]) {
        return Ok(Calibration { p: vec![n as f64 / size as f64; size], residual: 0.0, iterations: 0 });
    }

    let target_logit: Vec<f64> = target_pi.iter().map(|t| (t / (1.0 - t)).ln()).collect();
    let mut log_odds = target_logit.clone();
    let mut step = 1.0;
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;

    for iteration in 1..=options.max_iter {
        let p = normalize(&log_odds, n);
        let pi = Rejective::new(p.clone(), n)?.pi().to_vec();
        let residual = pi.iter().zip(target_pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual <= options.tol {
            return Ok(Calibration { p, residual, iterations: iteration });
        }
        let improved = best.as_ref().map_or(true, |(_, _, r)| residual < *r);
        if improved {
            best = Some((log_odds.clone(), pi, residual));
        } else {
            step *= 0.5;
            if step < 1.0 / 1024.0 {
                break;
            }
        }
        let (base, base_pi, _) = best.as_ref().expect("set on first iteration");
        log_odds = base
            .iter()
            .zip(base_pi)
            .zip(&target_logit)
            .map(|((lo, pi), tl)| lo + step * (tl - (pi / (1.0 - pi)).ln()))
            .collect();
    }
    let residual = best.map_or(f64::INFINITY, |(_, _, r)| r);
    Err(Error::Calibration { iterations: options.max_iter, residual })
}

/// Working probabilities `c e^l / (1 + c e^l)` with the common scale `c`
/// chosen so that they sum to `n`.
fn normalize(log_odds: &[f64], n: usize) -> Vec<f64> {
    let target = n as f64;
    let probs = |shift: f64| -> Vec<f64> { log_odds.iter().map(|l| 1.0 / (1.0 + (-(l + shift)).exp())).collect() };
    let sum_at = |shift: f64| probs(shift).iter().sum::<f64>();
    let (mut lo, mut hi) = (-1.0, 1.0);
    while sum_at(lo) > target {
        lo *= 2.0;
    }
    while sum_at(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sum_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    probs(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::Design;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equal_targets_give_equal_p() {
        let c = calibrate_rejective_p(&[0.4; 5], 2, CalibrationOptions::default()).unwrap();
        assert_eq!(c.p, vec![0.4; 5]);
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn round_trip_from_known_p() {
        let p = vec![0.1, 0.3, 0.5, 0.7, 0.9];
        let target = Design::rejective(p, 2).unwrap().first_order_pi();
        let c = calibrate_rejective_p(&target, 2, CalibrationOptions::default()).unwrap();
        let achieved = Design::rejective(c.p.clone(), 2).unwrap().first_order_pi();
        for (a, t) in achieved.iter().zip(&target) {
            assert_abs_diff_eq!(a, t, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(c.p.iter().sum::<f64>(), 2.0, epsilon = 1e-9);
        assert!(c.residual <= 1e-10);
    }

    #[test]
    fn rejects_bad_targets() {
        let opts = CalibrationOptions::default();
        assert!(matches!(calibrate_rejective_p(&[0.5, 0.5, 0.5], 2, opts), Err(Error::InvalidParameter(_))));
        assert!(calibrate_rejective_p(&[0.5, 1.0, 0.5], 2, opts).is_err());
        assert!(calibrate_rejective_p(&[0.5, 0.5], 2, opts).is_err());
    }

    #[test]
    fn reports_residual_on_non_convergence() {
        let err = calibrate_rejective_p(&[0.05, 0.95, 0.5, 0.5], 2, CalibrationOptions { tol: 1e-300, max_iter: 2 })
            .unwrap_err();
        match err {
            Error::Calibration { iterations, residual } => {
                assert_eq!(iterations, 2);
                assert!(residual.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalization_hits_n() {
        let p = normalize(&[-2.0, 0.0, 1.0, 3.0, 0.5], 3);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 3.0, epsilon = 1e-12);
    }
}
