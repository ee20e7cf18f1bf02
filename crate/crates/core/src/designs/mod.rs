//! Single-stage sampling designs: simple random sampling without replacement,
//! Bernoulli, Poisson and rejective (conditional Poisson) sampling.
//!
//! Each design knows its exact first- and second-order inclusion
//! probabilities and can draw samples from a caller-supplied random stream.

mod calibrate;
mod poisson_binomial;

pub use calibrate::{calibrate_rejective_p, Calibration, CalibrationOptions};
pub use poisson_binomial::{PoissonBinomialTable, SuffixTable};

use ndarray::Array2;
use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::asymptotics::DesignConstants;
use crate::error::{invalid, Error, Result};

/// A sampling design over a population of `population_size()` units.
#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Srswor { population: usize, n: usize },
    Bernoulli { population: usize, p: f64 },
    Poisson { pi: Vec<f64> },
    Rejective(Rejective),
}

impl Design {
    pub fn srswor(population: usize, n: usize) -> Result<Self> {
        if n == 0 || n > population {
            return Err(invalid(format!("srswor needs 1 <= n <= N, got n = {n}, N = {population}")));
        }
        Ok(Self::Srswor { population, n })
    }

    pub fn bernoulli(population: usize, p: f64) -> Result<Self> {
        if population == 0 {
            return Err(invalid("bernoulli design needs N >= 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("bernoulli parameter must lie in (0, 1), got {p}")));
        }
        Ok(Self::Bernoulli { population, p })
    }

    pub fn poisson(pi: Vec<f64>) -> Result<Self> {
        if pi.is_empty() {
            return Err(invalid("poisson design needs at least one unit"));
        }
        if let Some((i, v)) = pi.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v <= 1.0)) {
            return Err(invalid(format!("poisson inclusion probability of unit {i} is {v}, expected (0, 1]")));
        }
        Ok(Self::Poisson { pi })
    }

    pub fn rejective(p: Vec<f64>, n: usize) -> Result<Self> {
        Rejective::new(p, n).map(Self::Rejective)
    }

    /// Poisson design with inclusion probabilities `0.4 n/N` on one half of a
    /// randomly ordered population and `1.6 n/N` on the other half.
    pub fn two_level_poisson<R: Rng + ?Sized>(population: usize, n: usize, rng: &mut R) -> Result<Self> {
        let pi = two_level_pi(population, n, rng)?;
        Self::poisson(pi)
    }

    pub fn population_size(&self) -> usize {
        match self {
            Self::Srswor { population, .. } | Self::Bernoulli { population, .. } => *population,
            Self::Poisson { pi } => pi.len(),
            Self::Rejective(r) => r.p.len(),
        }
    }

    /// Design-expected sample size `n = sum_i pi_i`.
    pub fn expected_size(&self) -> f64 {
        match self {
            Self::Srswor { n, .. } => *n as f64,
            Self::Bernoulli { population, p } => *population as f64 * p,
            Self::Poisson { pi } => pi.iter().sum(),
            Self::Rejective(r) => r.n as f64,
        }
    }

    pub fn is_fixed_size(&self) -> bool {
        matches!(self, Self::Srswor { .. } | Self::Rejective(_))
    }

    /// Inclusion probability of unit `i`.
    pub fn pi(&self, i: usize) -> f64 {
        match self {
            Self::Srswor { population, n } => *n as f64 / *population as f64,
            Self::Bernoulli { p, .. } => *p,
            Self::Poisson { pi } => pi[i],
            Self::Rejective(r) => r.pi[i],
        }
    }

    pub fn first_order_pi(&self) -> Vec<f64> {
        match self {
            Self::Poisson { pi } => pi.clone(),
            Self::Rejective(r) => r.pi.clone(),
            _ => (0..self.population_size()).map(|i| self.pi(i)).collect(),
        }
    }

    /// Matrix of `pi_ij`, with `pi_ii = pi_i` on the diagonal.
    pub fn second_order_pi(&self) -> Array2<f64> {
        let size = self.population_size();
        let pi = self.first_order_pi();
        let mut m = Array2::zeros((size, size));
        match self {
            Self::Srswor { population, n } => {
                let (big, small) = (*population as f64, *n as f64);
                let off = if *population > 1 { small * (small - 1.0) / (big * (big - 1.0)) } else { 0.0 };
                m.fill(off);
            }
            Self::Bernoulli { .. } | Self::Poisson { .. } => {
                for i in 0..size {
                    for j in 0..size {
                        m[[i, j]] = pi[i] * pi[j];
                    }
                }
            }
            Self::Rejective(r) => {
                for i in 0..size {
                    let conditional = r.conditional_pi_without(i);
                    for (j, c) in conditional.into_iter().enumerate() {
                        m[[i, j]] = pi[i] * c;
                    }
                }
                // symmetrize: both orderings are exact up to rounding
                for i in 0..size {
                    for j in (i + 1)..size {
                        let v = 0.5 * (m[[i, j]] + m[[j, i]]);
                        m[[i, j]] = v;
                        m[[j, i]] = v;
                    }
                }
            }
        }
        for i in 0..size {
            m[[i, i]] = pi[i];
        }
        m
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SampleDraw {
        let size = self.population_size();
        let included: Vec<usize> = match self {
            Self::Srswor { n, .. } => {
                let mut idx = index::sample(rng, size, *n).into_vec();
                idx.sort_unstable();
                idx
            }
            Self::Bernoulli { p, .. } => (0..size).filter(|_| rng.random::<f64>() < *p).collect(),
            Self::Poisson { pi } => (0..size).filter(|&i| rng.random::<f64>() < pi[i]).collect(),
            Self::Rejective(r) => r.draw_sequential(rng),
        };
        self.make_draw(included)
    }

    pub(crate) fn make_draw(&self, included: Vec<usize>) -> SampleDraw {
        let mut indicators = vec![false; self.population_size()];
        for &i in &included {
            indicators[i] = true;
        }
        let pi_of_included = included.iter().map(|&i| self.pi(i)).collect();
        SampleDraw { indicators, included, pi_of_included }
    }

    /// Design constants lambda, mu_pi1, mu_pi2, d_N and the derived gammas.
    pub fn constants(&self) -> DesignConstants {
        let size = self.population_size() as f64;
        let pi = self.first_order_pi();
        let n = self.expected_size();
        let lambda = n / size;
        let mu_pi1 = n / (size * size) * pi.iter().map(|p| 1.0 / p - 1.0).sum::<f64>();
        let d_n: f64 = pi.iter().map(|p| p * (1.0 - p)).sum();
        let mu_pi2 = match self {
            Self::Srswor { .. } => lambda - 1.0,
            Self::Bernoulli { .. } | Self::Poisson { .. } => 0.0,
            Self::Rejective(_) => {
                let total: f64 = pi.iter().map(|p| 1.0 - p).sum();
                let squares: f64 = pi.iter().map(|p| (1.0 - p) * (1.0 - p)).sum();
                -n / (size * size) * (total * total - squares) / d_n
            }
        };
        DesignConstants::new(lambda, mu_pi1, mu_pi2, d_n)
    }
}

pub fn first_order_pi(design: &Design) -> Vec<f64> {
    design.first_order_pi()
}

pub fn second_order_pi(design: &Design) -> Array2<f64> {
    design.second_order_pi()
}

pub fn draw<R: Rng + ?Sized>(design: &Design, rng: &mut R) -> SampleDraw {
    design.draw(rng)
}

pub fn design_constants(design: &Design) -> DesignConstants {
    design.constants()
}

pub(crate) fn two_level_pi<R: Rng + ?Sized>(population: usize, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let mut pi = two_level_pi_ordered(population, n)?;
    pi.shuffle(rng);
    Ok(pi)
}

/// `0.4 n/N` for the first half of the units and `1.6 n/N` for the rest.
pub fn two_level_pi_ordered(population: usize, n: usize) -> Result<Vec<f64>> {
    if population < 2 || n == 0 {
        return Err(invalid("two-level poisson design needs N >= 2 and n >= 1"));
    }
    let base = n as f64 / population as f64;
    if 1.6 * base > 1.0 {
        return Err(invalid(format!("two-level poisson design needs 1.6 n/N <= 1, got {}", 1.6 * base)));
    }
    let half = population / 2;
    Ok((0..population).map(|i| if i < half { 0.4 * base } else { 1.6 * base }).collect())
}

/// Rejective sampling: Poisson sampling with working probabilities `p`
/// conditioned on the sample size being `n`, i.e.
/// `P(s) ∝ prod_{i in s} p_i / (1 - p_i)` over samples of size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejective {
    p: Vec<f64>,
    n: usize,
    pi: Vec<f64>,
    suffix: SuffixTable,
}

impl Rejective {
    pub fn new(p: Vec<f64>, n: usize) -> Result<Self> {
        let size = p.len();
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            return Err(invalid(format!("rejective working probability of unit {i} is {v}, expected (0, 1)")));
        }
        if n == 0 || n + 1 > size {
            return Err(invalid(format!("rejective design needs 1 <= n <= N - 1, got n = {n}, N = {size}")));
        }
        let suffix = SuffixTable::new(&p, n);
        let total = suffix.get(0, n);
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateDesign(format!("P(S = {n}) = {total} under the working probabilities")));
        }
        let loo = poisson_binomial::leave_one_out(&p, n - 1);
        let pi = p.iter().zip(&loo).map(|(pi, l)| pi * l / total).collect();
        Ok(Self { p, n, pi, suffix })
    }

    pub fn working_probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Unnormalized mass `prod_{i in s} p_i / (1 - p_i)` of a sample.
    pub fn odds_product(&self, included: &[usize]) -> f64 {
        included.iter().map(|&i| self.p[i] / (1.0 - self.p[i])).product()
    }

    /// `P(j in s | i in s)` for every `j` (zero at `j = i`): the first-order
    /// probabilities of the rejective design on the other units with size `n - 1`.
    fn conditional_pi_without(&self, i: usize) -> Vec<f64> {
        let size = self.p.len();
        let mut out = vec![0.0; size];
        if self.n == 1 {
            return out;
        }
        let rest: Vec<f64> = self.p.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        let m = self.n - 1;
        let total = PoissonBinomialTable::new(&rest, m).get(rest.len(), m);
        let loo = poisson_binomial::leave_one_out(&rest, m - 1);
        let mut k = 0;
        for (j, slot) in out.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            *slot = rest[k] * loo[k] / total;
            k += 1;
        }
        out
    }

    /// Exact sequential draw: unit `i` enters with probability
    /// `p_i P(S_{i+1..} = r - 1) / P(S_{i..} = r)` given `r` open slots.
    pub fn draw_sequential<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let size = self.p.len();
        let mut remaining = self.n;
        let mut chosen = Vec::with_capacity(self.n);
        for i in 0..size {
            if remaining == 0 {
                break;
            }
            if size - i == remaining {
                chosen.extend(i..size);
                break;
            }
            let num = self.p[i] * self.suffix.get(i + 1, remaining - 1);
            let den = self.suffix.get(i, remaining);
            if rng.random::<f64>() * den < num {
                chosen.push(i);
                remaining -= 1;
            }
        }
        chosen
    }

    /// Draw by repeating Poisson sampling with probabilities `p` until the
    /// sample has size `n`. Returns `None` after `max_tries` failures.
    pub fn draw_by_rejection<R: Rng + ?Sized>(&self, rng: &mut R, max_tries: usize) -> Option<Vec<usize>> {
        for _ in 0..max_tries {
            let s: Vec<usize> = (0..self.p.len()).filter(|&i| rng.random::<f64>() < self.p[i]).collect();
            if s.len() == self.n {
                return Some(s);
            }
        }
        None
    }
}

/// One realized sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDraw {
    pub indicators: Vec<bool>,
    pub included: Vec<usize>,
    pub pi_of_included: Vec<f64>,
}

impl SampleDraw {
    /// Builds a draw from explicit indices and inclusion probabilities.
    pub fn new(population: usize, included: Vec<usize>, pi_of_included: Vec<f64>) -> Result<Self> {
        if included.len() != pi_of_included.len() {
            return Err(invalid("included and pi_of_included must have equal length"));
        }
        let mut indicators = vec![false; population];
        for &i in &included {
            if i >= population {
                return Err(Error::Index(format!("unit {i} outside population of size {population}")));
            }
            if indicators[i] {
                return Err(Error::Index(format!("unit {i} included twice")));
            }
            indicators[i] = true;
        }
        if let Some((k, v)) = pi_of_included.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::ZeroInclusionProbability { unit: included[k], pi: *v });
        }
        Ok(Self { indicators, included, pi_of_included })
    }

    pub fn size(&self) -> usize {
        self.included.len()
    }

    pub fn population_size(&self) -> usize {
        self.indicators.len()
    }

    /// `N_hat = sum_i xi_i / pi_i`.
    pub fn estimated_population_size(&self) -> f64 {
        self.pi_of_included.iter().map(|p| 1.0 / p).sum()
    }
}
