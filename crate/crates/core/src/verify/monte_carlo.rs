//! Seeded Monte Carlo harness.
//!
//! Trials are cut into fixed-size blocks; block `b` draws from stream
//! `offset + b` of the seed, whatever thread runs it. Block results are merged
//! in block order, so the output is bit-identical for any worker count.

use rayon::prelude::*;

use crate::error::{out_of_range, Error, Result};
use crate::rng::stream;

use super::report::EmpiricalMoments;
use super::{EstimatorKind, Scenario};

/// Trials per random stream.
pub const BLOCK_SIZE: u64 = 10_000;
/// Batches used for the standard error of the variance.
pub const BATCHES: u64 = 100;

/// Count, mean and sum of squared deviations; merges associatively.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (a, b) = (self.count as f64, other.count as f64);
        self.mean += delta * b / count as f64;
        self.m2 += other.m2 + delta * delta * a * b / count as f64;
        self.count = count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with divisor `count - 1`.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloSettings {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl MonteCarloSettings {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

struct BlockResult {
    overall: MomentAccumulator,
    // (batch index, accumulator), ascending batch index
    batches: Vec<(u64, MomentAccumulator)>,
}

fn run_block(
    scenario: &Scenario,
    estimator: EstimatorKind,
    settings: &MonteCarloSettings,
    batches: u64,
    stream_offset: u64,
    block: u64,
) -> Result<BlockResult> {
    let mut rng = stream(settings.seed, stream_offset.wrapping_add(block));
    let start = block * BLOCK_SIZE;
    let end = (start + BLOCK_SIZE).min(settings.trials);
    let mut overall = MomentAccumulator::default();
    let mut per_batch: Vec<(u64, MomentAccumulator)> = Vec::new();
    for t in start..end {
        let x = scenario.simulate_once(estimator, &mut rng)?;
        overall.push(x);
        let batch = (t as u128 * batches as u128 / settings.trials as u128) as u64;
        match per_batch.last_mut() {
            Some((b, acc)) if *b == batch => acc.push(x),
            _ => {
                let mut acc = MomentAccumulator::default();
                acc.push(x);
                per_batch.push((batch, acc));
            }
        }
    }
    Ok(BlockResult {
        overall,
        batches: per_batch,
    })
}

/// Empirical mean and variance of an estimator over seeded trials.
pub fn simulate(
    scenario: &Scenario,
    estimator: EstimatorKind,
    settings: &MonteCarloSettings,
) -> Result<EmpiricalMoments> {
    simulate_on_streams(scenario, estimator, settings, 0)
}

pub(crate) fn simulate_on_streams(
    scenario: &Scenario,
    estimator: EstimatorKind,
    settings: &MonteCarloSettings,
    stream_offset: u64,
) -> Result<EmpiricalMoments> {
    if settings.trials < 1 {
        return Err(out_of_range("trials", settings.trials, "trials >= 1"));
    }
    scenario.check_estimator(estimator)?;
    let batches = BATCHES.min(settings.trials);
    let blocks = settings.trials.div_ceil(BLOCK_SIZE);
    let run = || -> Result<Vec<BlockResult>> {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(scenario, estimator, settings, batches, stream_offset, b))
            .collect()
    };
    let results = match settings.workers {
        None => run()?,
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?
            .install(run)?,
    };

    let mut overall = MomentAccumulator::default();
    let mut batch_acc = vec![MomentAccumulator::default(); batches as usize];
    for block in &results {
        overall.merge(&block.overall);
        for (b, acc) in &block.batches {
            batch_acc[*b as usize].merge(acc);
        }
    }

    let variance = overall.sample_variance().unwrap_or(0.0);
    let mean_se = (variance / overall.count() as f64).sqrt();
    let batch_variances: Option<Vec<f64>> = batch_acc.iter().map(MomentAccumulator::sample_variance).collect();
    let variance_se = batch_variances.filter(|v| v.len() >= 2).map(|v| {
        let mut spread = MomentAccumulator::default();
        v.iter().for_each(|&x| spread.push(x));
        (spread.sample_variance().unwrap_or(0.0) / v.len() as f64).sqrt()
    });

    Ok(EmpiricalMoments {
        mean: overall.mean(),
        variance,
        trials: settings.trials,
        seed: settings.seed,
        mean_se,
        variance_se,
        batches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_sequential_push() {
        let xs: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 / 3.0).collect();
        let mut whole = MomentAccumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = MomentAccumulator::default();
        let mut right = MomentAccumulator::default();
        xs[..15].iter().for_each(|&x| left.push(x));
        xs[15..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), whole.count());
        assert!((left.mean() - whole.mean()).abs() < 1e-12);
        assert!((left.sample_variance().unwrap() - whole.sample_variance().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn constant_stream_has_zero_variance() {
        let mut acc = MomentAccumulator::default();
        for _ in 0..1000 {
            acc.push(0.1);
        }
        let mut other = acc;
        other.merge(&acc);
        assert_eq!(other.sample_variance(), Some(0.0));
        assert_eq!(other.mean(), 0.1);
    }
}
