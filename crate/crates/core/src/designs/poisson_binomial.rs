/// Truncated distribution table of partial sums of independent Bernoulli trials.
///
/// Row `i` holds `P(X_1 + ... + X_i = k)` for `0 <= k <= max_count`, where
/// `X_j ~ Bernoulli(probs[j - 1])`. Row 0 is the point mass at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBinomialTable {
    probs: Vec<f64>,
    max_count: usize,
    rows: Vec<f64>,
}

impl PoissonBinomialTable {
    pub fn new(probs: &[f64], max_count: usize) -> Self {
        let width = max_count + 1;
        let mut rows = vec![0.0; (probs.len() + 1) * width];
        rows[0] = 1.0;
        for (i, &p) in probs.iter().enumerate() {
            let (prev, next) = rows[i * width..(i + 2) * width].split_at_mut(width);
            let q = 1.0 - p;
            next[0] = prev[0] * q;
            for k in 1..width {
                next[k] = prev[k] * q + prev[k - 1] * p;
            }
        }
        Self { probs: probs.to_vec(), max_count, rows }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_count(&self) -> usize {
        self.max_count
    }

    /// Number of rows (`len(probs) + 1`).
    pub fn len(&self) -> usize {
        self.probs.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let width = self.max_count + 1;
        &self.rows[i * width..(i + 1) * width]
    }

    /// `P(X_1 + ... + X_i = k)`, zero beyond the truncation.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        if k > self.max_count {
            0.0
        } else {
            self.row(i)[k]
        }
    }
}

/// Suffix view: row `i` is the distribution of `X_{i+1} + ... + X_N`
/// (zero-based units `i..N`). Built as a prefix table over the reversed
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffixTable {
    inner: PoissonBinomialTable,
}

impl SuffixTable {
    pub fn new(probs: &[f64], max_count: usize) -> Self {
        let reversed: Vec<f64> = probs.iter().rev().copied().collect();
        Self { inner: PoissonBinomialTable::new(&reversed, max_count) }
    }

    /// `P(sum over units i..N = k)`.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        let n_units = self.inner.probs.len();
        self.inner.get(n_units - i, k)
    }
}

/// `P(S_{-i} = m)` for every unit `i`, where `S_{-i}` leaves unit `i` out.
pub(crate) fn leave_one_out(probs: &[f64], m: usize) -> Vec<f64> {
    let prefix = PoissonBinomialTable::new(probs, m);
    let suffix = SuffixTable::new(probs, m);
    (0..probs.len()).map(|i| (0..=m).map(|k| prefix.get(i, k) * suffix.get(i + 1, m - k)).sum()).collect()
}
