//! Exhaustive enumeration of ordered draw outcomes.
//!
//! Every design here is a sequence of single-unit draws, so exact moments are
//! sums over ordered outcomes. Instances are bounded by an explicit outcome
//! limit; exceeding it is an error rather than a truncated sum.

use std::collections::BTreeMap;

use crate::distributions::CovMatrix;
use crate::error::{out_of_range, Error, Result};
use crate::population::ClassifiedPopulation;
use crate::Replacement;

use super::report::ExactMoments;
use super::{EstimatorKind, Frame, Scenario};

/// Largest number of outcomes an enumeration will visit.
pub const OUTCOME_LIMIT: u64 = 10_000_000;

/// Number of ordered outcomes of `n` draws from `units` units, saturating.
pub fn ordered_outcome_count(units: u64, n: u64, replacement: Replacement) -> u128 {
    let mut count: u128 = 1;
    for j in 0..n {
        let factor = match replacement {
            Replacement::With => units,
            Replacement::Without => units.saturating_sub(j),
        } as u128;
        count = count.saturating_mul(factor);
    }
    count
}

/// Calls `visit` on every ordered outcome of `n` draws from `0..units`.
/// Returns the number of outcomes visited.
pub fn for_each_ordered(
    units: usize,
    n: usize,
    replacement: Replacement,
    limit: u64,
    mut visit: impl FnMut(&[usize]),
) -> Result<u64> {
    if n < 1 {
        return Err(out_of_range("n", n as u64, "n >= 1"));
    }
    if replacement == Replacement::Without && n > units {
        return Err(out_of_range(
            "n",
            n as u64,
            format!("n <= N = {units} without replacement"),
        ));
    }
    let outcomes = ordered_outcome_count(units as u64, n as u64, replacement);
    if outcomes > limit as u128 {
        return Err(Error::TooLarge { outcomes, limit });
    }
    let mut seq = Vec::with_capacity(n);
    match replacement {
        Replacement::With => {
            let mut digits = vec![0usize; n];
            loop {
                visit(&digits);
                // odometer increment, last draw fastest
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return Ok(outcomes as u64);
                    }
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < units {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        }
        Replacement::Without => {
            let mut used = vec![false; units];
            visit_without(units, n, &mut used, &mut seq, &mut visit);
            Ok(outcomes as u64)
        }
    }
}

fn visit_without(units: usize, n: usize, used: &mut [bool], seq: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if seq.len() == n {
        visit(seq);
        return;
    }
    for u in 0..units {
        if used[u] {
            continue;
        }
        used[u] = true;
        seq.push(u);
        visit_without(units, n, used, seq, visit);
        seq.pop();
        used[u] = false;
    }
}

/// Mean and variance of a weighted outcome set, in two passes so the
/// variance is summed around the exact mean.
fn two_pass(mut walk: impl FnMut(&mut dyn FnMut(f64, f64)) -> Result<u64>) -> Result<ExactMoments> {
    let (mut total_weight, mut weighted_sum) = (0.0, 0.0);
    let outcomes = walk(&mut |w, x| {
        total_weight += w;
        weighted_sum += w * x;
    })?;
    let mean = weighted_sum / total_weight;
    let mut ss = 0.0;
    walk(&mut |w, x| ss += w * (x - mean) * (x - mean))?;
    Ok(ExactMoments {
        mean,
        variance: ss / total_weight,
        outcomes,
    })
}

/// Exact mean and variance of an estimator under the scenario's design.
pub fn enumerate_moments(scenario: &Scenario, estimator: EstimatorKind) -> Result<ExactMoments> {
    enumerate_moments_with_limit(scenario, estimator, OUTCOME_LIMIT)
}

pub fn enumerate_moments_with_limit(scenario: &Scenario, estimator: EstimatorKind, limit: u64) -> Result<ExactMoments> {
    scenario.check_estimator(estimator)?;
    let replacement = scenario.design().replacement();
    let n = scenario.draws();

    if let (Frame::Classified(pop), EstimatorKind::ClassCount(k)) = (scenario.frame(), estimator) {
        let dist = enumerate_count_distribution(pop, n as u64, replacement)?;
        return two_pass(|sink| {
            for (counts, p) in dist.iter() {
                sink(p, counts[k] as f64);
            }
            Ok(dist.len() as u64)
        });
    }

    let units = scenario.sampling_units() as usize;
    if let Frame::Weighted { weights, .. } = scenario.frame() {
        if replacement == Replacement::With {
            // Outcome weight Π M_i; normalised by the total weight t_M^n.
            let sizes = weights.sizes();
            return two_pass(|sink| {
                let mut failure = None;
                let visited = for_each_ordered(sizes.len(), n, replacement, limit, |seq| {
                    let w: f64 = seq.iter().map(|&i| sizes[i] as f64).product();
                    match scenario.evaluate(estimator, seq) {
                        Ok(x) => sink(w, x),
                        Err(e) => failure = failure.take().or(Some(e)),
                    }
                })?;
                failure.map_or(Ok(visited), Err)
            });
        }
    }

    two_pass(|sink| {
        let mut failure = None;
        let visited = for_each_ordered(units, n, replacement, limit, |seq| {
            match scenario.evaluate(estimator, seq) {
                Ok(x) => sink(1.0, x),
                Err(e) => failure = failure.take().or(Some(e)),
            }
        })?;
        failure.map_or(Ok(visited), Err)
    })
}

/// Exact law of the class-count vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CountDistribution {
    classes: usize,
    draws: u64,
    probabilities: BTreeMap<Vec<u64>, f64>,
}

impl CountDistribution {
    pub fn iter(&self) -> impl Iterator<Item = (&[u64], f64)> {
        self.probabilities.iter().map(|(c, &p)| (c.as_slice(), p))
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn probability(&self, counts: &[u64]) -> f64 {
        self.probabilities.get(counts).copied().unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.classes];
        for (c, p) in self.iter() {
            for (m, &a) in mean.iter_mut().zip(c) {
                *m += p * a as f64;
            }
        }
        mean
    }

    pub fn covariance(&self) -> CovMatrix {
        let mean = self.mean();
        let mut acc = vec![0.0; self.classes * self.classes];
        for (c, p) in self.iter() {
            for k in 0..self.classes {
                let dk = c[k] as f64 - mean[k];
                for l in 0..self.classes {
                    acc[k * self.classes + l] += p * dk * (c[l] as f64 - mean[l]);
                }
            }
        }
        CovMatrix::from_fn(self.classes, |k, l| acc[k * self.classes + l])
    }
}

/// Count distribution by following the sequential draws one at a time: after
/// `j` draws with counts `a`, the next draw lands in class `k` with probability
/// `(N_k - a_k) / (N - j)` without replacement, `N_k / N` with replacement.
///
/// Equivalent to summing over ordered unit-level outcomes (see
/// [`enumerate_count_distribution_ordered`]) but polynomial in size.
pub fn enumerate_count_distribution(
    pop: &ClassifiedPopulation,
    n: u64,
    replacement: Replacement,
) -> Result<CountDistribution> {
    let total = pop.total();
    if replacement == Replacement::Without && n > total {
        return Err(out_of_range("n", n, format!("n <= N = {total} without replacement")));
    }
    let classes = pop.classes();
    let mut states: BTreeMap<Vec<u64>, f64> = BTreeMap::from([(vec![0; classes], 1.0)]);
    for j in 0..n {
        let denom = match replacement {
            Replacement::With => total,
            Replacement::Without => total - j,
        } as f64;
        let mut next: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (counts, p) in &states {
            for k in 0..classes {
                let available = match replacement {
                    Replacement::With => pop.sizes()[k],
                    Replacement::Without => pop.sizes()[k] - counts[k],
                };
                if available == 0 {
                    continue;
                }
                let mut c = counts.clone();
                c[k] += 1;
                *next.entry(c).or_insert(0.0) += p * available as f64 / denom;
            }
        }
        if next.len() as u64 > OUTCOME_LIMIT {
            return Err(Error::TooLarge {
                outcomes: next.len() as u128,
                limit: OUTCOME_LIMIT,
            });
        }
        states = next;
    }
    Ok(CountDistribution {
        classes,
        draws: n,
        probabilities: states,
    })
}

/// Count distribution by visiting every ordered sequence of distinct units
/// (or of units with repetition) and tallying class labels.
pub fn enumerate_count_distribution_ordered(
    pop: &ClassifiedPopulation,
    n: u64,
    replacement: Replacement,
    limit: u64,
) -> Result<CountDistribution> {
    let labels = pop.unit_labels();
    let classes = pop.classes();
    let mut tallies: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let outcomes = for_each_ordered(labels.len(), n as usize, replacement, limit, |seq| {
        let mut c = vec![0u64; classes];
        for &u in seq {
            c[labels[u]] += 1;
        }
        *tallies.entry(c).or_insert(0) += 1;
    })?;
    let probabilities = tallies
        .into_iter()
        .map(|(c, t)| (c, t as f64 / outcomes as f64))
        .collect();
    Ok(CountDistribution {
        classes,
        draws: n,
        probabilities,
    })
}
