//! Multivariate hypergeometric and multinomial class counts: probability mass
//! functions, exact covariance matrices, the finite population correction that
//! links them, and sequential-draw samplers.

use crate::error::{out_of_range, Error, Result};
use crate::population::ClassifiedPopulation;
use crate::rng::DrawSource;
use crate::Replacement;

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Finite population correction `1 - (n-1)/(N-1)`.
///
/// `fpc(1, 1)` is 1: a single draw from a single unit is the same with or
/// without replacement.
pub fn fpc(n: u64, population: u64) -> Result<f64> {
    if n < 1 || n > population {
        return Err(out_of_range("n", n, format!("1 <= n <= N = {population}")));
    }
    if population == 1 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1) as f64 / (population - 1) as f64)
}

/// `ln(n!)`. Exact summation up to a cutoff, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    const EXACT_UP_TO: u64 = 256;
    if n <= EXACT_UP_TO {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln C(n, k)`; `k <= n` is assumed.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Class counts observed in `n` draws.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidCounts("at least one class is required".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    /// Number of draws, `Σ a_k`.
    pub fn draws(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.counts
    }
}

impl From<CountVector> for Vec<u64> {
    fn from(c: CountVector) -> Self {
        c.counts
    }
}

/// Multivariate hypergeometric probability `Π C(N_k, a_k) / C(N, n)`.
///
/// Count vectors outside the support (some `a_k > N_k`) have probability 0.
pub fn mvhyper_pmf(counts: &CountVector, pop: &ClassifiedPopulation) -> Result<f64> {
    if counts.classes() != pop.classes() {
        return Err(Error::LengthMismatch {
            what: "count vector",
            expected: pop.classes(),
            found: counts.classes(),
        });
    }
    let n = counts.draws();
    let total = pop.total();
    if n > total {
        return Err(out_of_range("n", n, format!("n <= N = {total}")));
    }
    if counts.counts().iter().zip(pop.sizes()).any(|(a, s)| a > s) {
        return Ok(0.0);
    }
    let ln_num: f64 = counts
        .counts()
        .iter()
        .zip(pop.sizes())
        .map(|(&a, &s)| ln_binomial(s, a))
        .sum();
    Ok((ln_num - ln_binomial(total, n)).exp())
}

pub(crate) fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
        return Err(Error::InvalidProbabilities(format!("entry {p} outside [0, 1]")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Multinomial probability `n! / Π a_k! · Π p_k^{a_k}`.
pub fn multinomial_pmf(counts: &CountVector, probs: &[f64]) -> Result<f64> {
    validate_probabilities(probs)?;
    if counts.classes() != probs.len() {
        return Err(Error::LengthMismatch {
            what: "count vector",
            expected: probs.len(),
            found: counts.classes(),
        });
    }
    let mut ln_p = ln_factorial(counts.draws());
    for (&a, &p) in counts.counts().iter().zip(probs) {
        if a == 0 {
            continue;
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        ln_p += a as f64 * p.ln() - ln_factorial(a);
    }
    Ok(ln_p.exp())
}

/// Dense symmetric `K × K` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        self.rows().map(|r| r.iter().sum::<f64>().abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CovMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Positive semidefiniteness via symmetric-pivoted LDLᵀ elimination;
    /// pivots within `tol` of zero are treated as zero.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut a = self.to_rows();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let (pos, &p) = active
                .iter()
                .enumerate()
                .max_by(|x, y| a[*x.1][*x.1].total_cmp(&a[*y.1][*y.1]))
                .expect("non-empty");
            let pivot = a[p][p];
            if pivot < -tol {
                return false;
            }
            active.swap_remove(pos);
            if pivot <= tol {
                // Remaining diagonal is ~0, so off-diagonals must vanish too.
                return active.iter().all(|&i| active.iter().all(|&j| a[i][j].abs() <= tol));
            }
            for &i in &active {
                let f = a[i][p] / pivot;
                for &j in &active {
                    a[i][j] -= f * a[p][j];
                }
            }
        }
        true
    }
}

/// Multinomial covariance: `n p_k (1 - p_k)` on the diagonal, `-n p_k p_l` off it.
pub fn multinomial_cov(probs: &[f64], n: u64) -> Result<CovMatrix> {
    validate_probabilities(probs)?;
    if n < 1 {
        return Err(out_of_range("n", n, "n >= 1"));
    }
    let n = n as f64;
    Ok(CovMatrix::from_fn(probs.len(), |k, l| {
        if k == l {
            n * probs[k] * (1.0 - probs[k])
        } else {
            -n * (probs[k] * probs[l])
        }
    }))
}

/// Multivariate hypergeometric covariance: the multinomial covariance at
/// `p_k = N_k / N` multiplied by `fpc(n, N)`.
pub fn mvhyper_cov(pop: &ClassifiedPopulation, n: u64) -> Result<CovMatrix> {
    let correction = fpc(n, pop.total())?;
    let z = pop.proportions();
    let n = n as f64;
    Ok(CovMatrix::from_fn(pop.classes(), |k, l| {
        let base = if k == l { z[k] * (1.0 - z[k]) } else { -(z[k] * z[l]) };
        n * base * correction
    }))
}

/// Class counts from `n` sequential single-unit draws. Without replacement
/// the remaining class counts are decremented after every draw.
pub fn sample_counts<S: DrawSource + ?Sized>(
    pop: &ClassifiedPopulation,
    n: u64,
    replacement: Replacement,
    source: &mut S,
) -> Result<CountVector> {
    let total = pop.total();
    if replacement == Replacement::Without && n > total {
        return Err(out_of_range("n", n, format!("n <= N = {total} without replacement")));
    }
    let mut remaining = pop.sizes().to_vec();
    let mut remaining_total = total;
    let mut counts = vec![0u64; pop.classes()];
    for _ in 0..n {
        let mut u = source.below(remaining_total);
        let class = remaining
            .iter()
            .position(|&r| {
                if u < r {
                    true
                } else {
                    u -= r;
                    false
                }
            })
            .expect("draw falls inside the remaining population");
        counts[class] += 1;
        if replacement == Replacement::Without {
            remaining[class] -= 1;
            remaining_total -= 1;
        }
    }
    CountVector::new(counts)
}
