//! Exact design-measure computations for small populations by listing the
//! full support of a design.
//!
//! Everything here is brute force on purpose: the enumeration is the
//! reference against which the closed-form and dynamic-programming routines
//! in [`crate::designs`] are checked.

use std::collections::HashMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::designs::Design;
use crate::error::{invalid, Error, Result};
use crate::population::{Population, SuperPopulationLaw};

/// Largest support of a fixed-size design that will be enumerated.
pub const MAX_FIXED_SIZE_SUPPORT: f64 = 2e6;
/// Largest population of a random-size design that will be enumerated.
pub const MAX_RANDOM_SIZE_POPULATION: usize = 20;
/// Samples are stored as 64-bit masks.
pub const MAX_POPULATION: usize = 64;
/// Upper bound on `support * C(N, 4)` for the fourth-order condition checks.
pub const MAX_MOMENT_WORK: f64 = 2e9;

/// A design given by its full support.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedDesign {
    population: usize,
    support: Vec<(u64, f64)>,
    pi: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All `k`-subsets of `0..n` as bit masks, in increasing order.
fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let limit: u128 = 1u128 << n;
    let mut out = Vec::new();
    let mut mask: u64 = (1u64 << k) - 1;
    while u128::from(mask) < limit {
        out.push(mask);
        // Gosper's hack
        let c = mask & mask.wrapping_neg();
        let r = mask.wrapping_add(c);
        if r == 0 {
            break;
        }
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    out
}

fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

impl EnumeratedDesign {
    /// Builds a design from an explicit support; probabilities must be
    /// nonnegative and sum to one within 1e-12.
    pub fn from_support(population: usize, support: Vec<(u64, f64)>) -> Result<Self> {
        if population == 0 || population > MAX_POPULATION {
            return Err(invalid(format!("population size must lie in 1..={MAX_POPULATION}")));
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if support.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("support probabilities must be nonnegative and sum to 1, got {total}")));
        }
        if population < 64 && support.iter().any(|(m, _)| m >> population != 0) {
            return Err(invalid("support contains units outside the population"));
        }
        let mut pi = vec![0.0; population];
        for (mask, p) in &support {
            for i in members(*mask) {
                pi[i] += p;
            }
        }
        Ok(Self { population, support, pi })
    }

    pub fn population_size(&self) -> usize {
        self.population
    }

    pub fn support(&self) -> &[(u64, f64)] {
        &self.support
    }

    pub fn first_order(&self) -> &[f64] {
        &self.pi
    }

    pub fn expected_size(&self) -> f64 {
        self.pi.iter().sum()
    }

    /// `P(all of indices in s)`.
    pub fn inclusion(&self, indices: &[usize]) -> f64 {
        let want = indices.iter().fold(0u64, |m, &i| m | 1 << i);
        self.support.iter().filter(|(s, _)| s & want == want).map(|(_, p)| p).sum()
    }

    pub fn second_order(&self) -> Array2<f64> {
        let n = self.population;
        let mut m = Array2::zeros((n, n));
        for (mask, p) in &self.support {
            let units: Vec<usize> = members(*mask).collect();
            for &i in &units {
                for &j in &units {
                    m[[i, j]] += p;
                }
            }
        }
        m
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if !(2..=4).contains(&indices.len()) {
            return Err(Error::Index(format!("expected 2 to 4 indices, got {}", indices.len())));
        }
        for (k, &i) in indices.iter().enumerate() {
            if i >= self.population {
                return Err(Error::Index(format!("unit {i} outside population of size {}", self.population)));
            }
            if indices[..k].contains(&i) {
                return Err(Error::Index(format!("unit {i} repeated")));
            }
        }
        Ok(())
    }

    /// `E_d prod_k (xi_{i_k} - pi_{i_k})` over 2 to 4 distinct units.
    pub fn exact_moment(&self, indices: &[usize]) -> Result<f64> {
        self.check_indices(indices)?;
        Ok(self.centered_moment(indices))
    }

    fn centered_moment(&self, indices: &[usize]) -> f64 {
        self.support
            .iter()
            .map(|(mask, p)| {
                p * indices.iter().map(|&i| f64::from(u8::from(mask >> i & 1 == 1)) - self.pi[i]).product::<f64>()
            })
            .sum()
    }

    /// Exact design variance of `(1/N) sum_i xi_i v_i / pi_i`.
    pub fn variance_of_ht_mean(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.population {
            return Err(invalid("value vector length differs from population size"));
        }
        if let Some((unit, &pi)) = self.pi.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
            return Err(Error::ZeroInclusionProbability { unit, pi });
        }
        let size = self.population as f64;
        let mean = v.iter().sum::<f64>() / size;
        Ok(self
            .support
            .iter()
            .map(|(mask, p)| {
                let t = members(*mask).map(|i| v[i] / self.pi[i]).sum::<f64>() / size;
                p * (t - mean) * (t - mean)
            })
            .sum())
    }
}

/// Lists the full support of `design`.
pub fn enumerate_design(design: &Design) -> Result<EnumeratedDesign> {
    let size = design.population_size();
    if size > MAX_POPULATION {
        return Err(Error::Capacity { what: "population size", value: size as f64, limit: MAX_POPULATION as f64 });
    }
    let support: Vec<(u64, f64)> = match design {
        Design::Srswor { n, .. } => {
            let count = binomial(size, *n);
            check_fixed(count)?;
            let p = 1.0 / count;
            subsets_of_size(size, *n).into_iter().map(|m| (m, p)).collect()
        }
        Design::Rejective(r) => {
            let n = r.sample_size();
            check_fixed(binomial(size, n))?;
            let masks = subsets_of_size(size, n);
            let weights: Vec<f64> = masks.iter().map(|&m| r.odds_product(&members(m).collect::<Vec<_>>())).collect();
            let total: f64 = weights.iter().sum();
            masks.into_iter().zip(weights).map(|(m, w)| (m, w / total)).collect()
        }
        Design::Bernoulli { .. } | Design::Poisson { .. } => {
            if size > MAX_RANDOM_SIZE_POPULATION {
                return Err(Error::Capacity {
                    what: "random-size population",
                    value: size as f64,
                    limit: MAX_RANDOM_SIZE_POPULATION as f64,
                });
            }
            let pi = design.first_order_pi();
            (0u64..1 << size)
                .map(|m| {
                    let p = (0..size).map(|i| if m >> i & 1 == 1 { pi[i] } else { 1.0 - pi[i] }).product();
                    (m, p)
                })
                .filter(|(_, p)| *p > 0.0)
                .collect()
        }
    };
    EnumeratedDesign::from_support(size, support)
}

fn check_fixed(count: f64) -> Result<()> {
    if count > MAX_FIXED_SIZE_SUPPORT {
        return Err(Error::Capacity { what: "fixed-size support", value: count, limit: MAX_FIXED_SIZE_SUPPORT });
    }
    Ok(())
}

pub fn exact_moment(enumerated: &EnumeratedDesign, indices: &[usize]) -> Result<f64> {
    enumerated.exact_moment(indices)
}

/// One line of a condition report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub condition: &'static str,
    pub statistic: &'static str,
    pub observed: f64,
    pub bound: &'static str,
    pub implied_constant: f64,
}

/// Exact finite-N statistics behind the correlation and entropy conditions.
/// Asymptotic conditions are reported as numbers, never as verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub population: usize,
    pub n: f64,
    pub rows: Vec<ConditionRow>,
}

impl ConditionReport {
    pub fn get(&self, condition: &str) -> Option<&ConditionRow> {
        self.rows.iter().find(|r| r.condition == condition)
    }
}

/// Evaluates the finite-N statistics of the correlation conditions (C1)-(C4),
/// their averaged fixed-size versions, the limits (i)-(ii) for
/// deterministic designs, and the d_N rates of the
/// high-entropy families, using expected sample size `n`.
pub fn check_conditions(enumerated: &EnumeratedDesign, n: f64) -> Result<ConditionReport> {
    if !(n > 0.0) {
        return Err(invalid(format!("n must be positive, got {n}")));
    }
    let size = enumerated.population;
    let big = size as f64;
    let pi = &enumerated.pi;
    if let Some((unit, &p)) = pi.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
        return Err(Error::ZeroInclusionProbability { unit, pi: p });
    }
    let work = enumerated.support.len() as f64 * binomial(size, 4.min(size));
    if work > MAX_MOMENT_WORK {
        return Err(Error::Capacity { what: "moment work (support x C(N,4))", value: work, limit: MAX_MOMENT_WORK });
    }

    let ratio: Vec<f64> = pi.iter().map(|p| big * p / n).collect();
    let mut rows = vec![
        row(
            "C1 lower",
            "min N pi_i / n",
            ratio.iter().copied().fold(f64::INFINITY, f64::min),
            "K1 <= N pi_i / n",
            None,
        ),
        row("C1 upper", "max N pi_i / n", ratio.iter().copied().fold(0.0, f64::max), "N pi_i / n <= K2", None),
    ];

    let pairs = combinations(size, 2);
    let triples = combinations(size, 3);
    let quads = combinations(size, 4);
    let pair_m: Vec<f64> = pairs.par_iter().map(|c| enumerated.centered_moment(c)).collect();
    let triple_m: Vec<f64> = triples.par_iter().map(|c| enumerated.centered_moment(c)).collect();
    let quad_m: Vec<f64> = quads.par_iter().map(|c| enumerated.centered_moment(c)).collect();
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let m2 = max_abs(&pair_m);
    let m3 = max_abs(&triple_m);
    let m4 = max_abs(&quad_m);
    rows.push(row("C2", "max |E(xi_i - pi_i)(xi_j - pi_j)|", m2, "< K3 n / N^2", Some(m2 * big * big / n)));
    rows.push(row("C3", "max |E prod_3 (xi - pi)|", m3, "< K3 n^2 / N^3", Some(m3 * big.powi(3) / (n * n))));
    rows.push(row("C4", "max |E prod_4 (xi - pi)|", m4, "< K3 n^2 / N^4", Some(m4 * big.powi(4) / (n * n))));

    // (C2*): per unit j, (n/N) sum_{i != j} |Delta_ij / (pi_i pi_j)|
    let mut per_unit = vec![0.0; size];
    let mut signed_pair_sum = 0.0;
    for (c, m) in pairs.iter().zip(&pair_m) {
        let scaled = m / (pi[c[0]] * pi[c[1]]);
        per_unit[c[0]] += scaled.abs();
        per_unit[c[1]] += scaled.abs();
        signed_pair_sum += 2.0 * scaled;
    }
    let c2_star = n / big * per_unit.iter().copied().fold(0.0, f64::max);
    rows.push(row("C2*", "max_j (n/N) sum_{i!=j} |Delta_ij / (pi_i pi_j)|", c2_star, "<= K", Some(c2_star)));

    let c3_star = n / big.powi(3)
        * 6.0
        * triples
            .par_iter()
            .map(|c| {
                let prod = pi[c[0]] * pi[c[1]] * pi[c[2]];
                ((enumerated.inclusion(c) - prod) / prod).abs()
            })
            .sum::<f64>();
    rows.push(row(
        "C3*",
        "(n/N^3) sum_D3 |(pi_ijk - pi_i pi_j pi_k) / (pi_i pi_j pi_k)|",
        c3_star,
        "<= K",
        Some(c3_star),
    ));

    let scaled4: Vec<f64> =
        quads.iter().zip(&quad_m).map(|(c, m)| m / c.iter().map(|&i| pi[i]).product::<f64>()).collect();
    let c4_signed = n * n / big.powi(4) * (24.0 * scaled4.iter().sum::<f64>()).abs();
    let c4_abs = n * n / big.powi(4) * 24.0 * scaled4.iter().map(|v| v.abs()).sum::<f64>();
    rows.push(row("C4* signed", "(n^2/N^4) |sum_D4 E prod_4 (xi - pi) / prod pi|", c4_signed, "<= K", Some(c4_signed)));
    rows.push(row("C4* absolute", "(n^2/N^4) sum_D4 |E prod_4 (xi - pi) / prod pi|", c4_abs, "<= K", Some(c4_abs)));

    let mu1 = n / (big * big) * pi.iter().map(|p| 1.0 / p - 1.0).sum::<f64>();
    let mu2 = n / (big * big) * signed_pair_sum;
    rows.push(row("(i)", "(n/N^2) sum_i (1/pi_i - 1)", mu1, "-> mu_pi1", None));
    rows.push(row("(ii)", "(n/N^2) sum_{i!=j} Delta_ij / (pi_i pi_j)", mu2, "-> mu_pi2", None));

    let d_n: f64 = pi.iter().map(|p| p * (1.0 - p)).sum();
    rows.push(row("A2", "d_N", d_n, "-> infinity", None));
    rows.push(row("A3/B1", "n / d_N", n / d_n, "= O(1)", None));
    rows.push(row("B2", "N / d_N^2", big / (d_n * d_n), "-> 0", None));
    rows.push(row("A4", "N^2 / (n d_N)", big * big / (n * d_n), "= O(1)", None));
    rows.push(row("A5", "n (N - n)^2 / (N^2 d_N)", n * (big - n).powi(2) / (big * big * d_n), "-> alpha", None));

    Ok(ConditionReport { population: size, n, rows })
}

fn row(
    condition: &'static str,
    statistic: &'static str,
    observed: f64,
    bound: &'static str,
    implied: Option<f64>,
) -> ConditionRow {
    ConditionRow { condition, statistic, observed, bound, implied_constant: implied.unwrap_or(observed) }
}

/// All increasing `k`-tuples of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets_of_size(n, k).into_iter().filter(|_| k <= n).map(|m| members(m).collect()).collect()
}

/// `S_N^2 = (1/N^2) sum_i sum_j (pi_ij - pi_i pi_j) / (pi_i pi_j) v_i v_j`
/// from the design's exact first- and second-order inclusion probabilities.
pub fn exact_sn2(design: &Design, v: &[f64]) -> Result<f64> {
    let pi = design.first_order_pi();
    let pij = design.second_order_pi();
    sn2_from(&pi, &pij, v)
}

pub fn sn2_from(pi: &[f64], pij: &Array2<f64>, v: &[f64]) -> Result<f64> {
    let size = pi.len();
    if v.len() != size {
        return Err(invalid("value vector length differs from population size"));
    }
    if let Some((unit, &p)) = pi.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
        return Err(Error::ZeroInclusionProbability { unit, pi: p });
    }
    let mut s = 0.0;
    for i in 0..size {
        for j in 0..size {
            s += (pij[[i, j]] - pi[i] * pi[j]) / (pi[i] * pi[j]) * v[i] * v[j];
        }
    }
    Ok(s / (size * size) as f64)
}

/// Centering of the indicator vectors in [`sigma_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SigmaForm {
    /// Raw indicators `1{Y_i <= t_q}`.
    Ht,
    /// Indicators centered by the super-population CDF, `1{Y_i <= t_q} - F(t_q)`.
    Hj,
}

/// Finite-N matrix
/// `(n/N^2) sum_i sum_j (pi_ij - pi_i pi_j)/(pi_i pi_j) Y_i Y_j^T` on a grid.
pub fn sigma_matrix(
    design: &Design,
    population: &Population,
    grid: &[f64],
    form: SigmaForm,
    law: Option<&SuperPopulationLaw>,
) -> Result<Array2<f64>> {
    let size = design.population_size();
    if population.size() != size {
        return Err(invalid("design and population sizes differ"));
    }
    let center: Vec<f64> = match (form, law) {
        (SigmaForm::Ht, _) => vec![0.0; grid.len()],
        (SigmaForm::Hj, Some(law)) => grid.iter().map(|&t| law.cdf(t)).collect(),
        (SigmaForm::Hj, None) => return Err(invalid("the centered form needs a super-population law")),
    };
    let pi = design.first_order_pi();
    let pij = design.second_order_pi();
    let n = design.expected_size();
    let y = population.y();
    let indicator = |i: usize, q: usize| f64::from(u8::from(y[i] <= grid[q])) - center[q];
    let k = grid.len();
    let mut out = Array2::zeros((k, k));
    for i in 0..size {
        for j in 0..size {
            let w = (pij[[i, j]] - pi[i] * pi[j]) / (pi[i] * pi[j]);
            if w == 0.0 {
                continue;
            }
            for a in 0..k {
                for b in 0..k {
                    out[[a, b]] += w * indicator(i, a) * indicator(j, b);
                }
            }
        }
    }
    out.mapv_inplace(|v| v * n / (size * size) as f64);
    Ok(out)
}

/// Kullback-Leibler divergence `sum_s P(s) ln(P(s) / R(s))`; infinite when
/// `P` charges a sample outside the support of `R`.
pub fn divergence_from_rejective(design: &EnumeratedDesign, reference: &EnumeratedDesign) -> f64 {
    let reference: HashMap<u64, f64> = reference.support.iter().copied().collect();
    let mut total = 0.0;
    for &(mask, p) in &design.support {
        if p == 0.0 {
            continue;
        }
        match reference.get(&mask) {
            Some(&r) if r > 0.0 => total += p * (p / r).ln(),
            _ => return f64::INFINITY,
        }
    }
    total.max(0.0)
}

/// Size of the second-order remainder of a rejective design beyond the
/// first-order expansion `pi_ij - pi_i pi_j ≈ -pi_i pi_j (1-pi_i)(1-pi_j)/d_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub d_n: f64,
    pub max_abs_residual: f64,
    /// `max |residual| * d_N^2`
    pub fitted_constant: f64,
}

pub fn rejective_expansion(enumerated: &EnumeratedDesign) -> ExpansionReport {
    let pi = &enumerated.pi;
    let d_n: f64 = pi.iter().map(|p| p * (1.0 - p)).sum();
    let pij = enumerated.second_order();
    let mut worst = 0.0f64;
    for i in 0..pi.len() {
        for j in 0..pi.len() {
            if i == j {
                continue;
            }
            let exact = pij[[i, j]] - pi[i] * pi[j];
            let approx = -pi[i] * pi[j] * (1.0 - pi[i]) * (1.0 - pi[j]) / d_n;
            worst = worst.max((exact - approx).abs());
        }
    }
    ExpansionReport { d_n, max_abs_residual: worst, fitted_constant: worst * d_n * d_n }
}
