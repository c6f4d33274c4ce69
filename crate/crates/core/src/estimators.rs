//! Point estimators and their closed-form design variances.
//!
//! Conventions: SRS and ACS estimate the population mean `Ȳ`; the
//! Hansen-Hurvitz estimator estimates the population total `t_Y`.

use serde::{Deserialize, Serialize};

use crate::designs::{AcsSample, DesignKind, DrawSequence, GroupedSample};
use crate::distributions::fpc;
use crate::error::{out_of_range, Error, Result};
use crate::population::{flatten_networks, NetworkPartition, Population, SizeWeights};
use crate::Replacement;

/// The population quantity an estimator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimand {
    Mean,
    Total,
    /// S², the population variance with divisor `N - 1`.
    PopulationVariance,
    /// Number of sampled units falling in one class.
    ClassCount,
}

/// A point estimate together with the design variance of its estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub point: f64,
    pub theoretical_variance: f64,
    pub design: DesignKind,
    pub estimand: Estimand,
}

impl EstimateReport {
    pub fn new(point: f64, theoretical_variance: f64, design: DesignKind, estimand: Estimand) -> Result<Self> {
        if theoretical_variance.is_nan() || theoretical_variance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "theoretical variance {theoretical_variance} is negative"
            )));
        }
        Ok(Self {
            point,
            theoretical_variance,
            design,
            estimand,
        })
    }
}

fn mean_over(pop: &Population, units: impl ExactSizeIterator<Item = usize>, f: impl Fn(usize) -> f64) -> Result<f64> {
    let n = units.len();
    if n == 0 {
        return Err(Error::InvalidSample("empty sample".into()));
    }
    let mut sum = 0.0;
    for u in units {
        if u >= pop.len() {
            return Err(Error::InvalidSample(format!("unit {u} outside 0..{}", pop.len())));
        }
        sum += f(u);
    }
    Ok(sum / n as f64)
}

/// Sample mean `ȳ` of the drawn units' values.
pub fn sample_mean(pop: &Population, seq: &DrawSequence) -> Result<f64> {
    if seq.design() == DesignKind::PpsWor {
        return Err(Error::InvalidSample(
            "extended-population positions are not units".into(),
        ));
    }
    mean_over(pop, seq.indices().iter().copied(), |u| pop.value(u))
}

fn check_sample_size(n: usize, population: u64, replacement: Replacement) -> Result<()> {
    if n < 1 {
        return Err(out_of_range("n", n as u64, "n >= 1"));
    }
    if replacement == Replacement::Without && n as u64 > population {
        return Err(out_of_range(
            "n",
            n as u64,
            format!("n <= {population} without replacement"),
        ));
    }
    Ok(())
}

/// Variance of a mean of `n` draws from a population with variance `sigma2`
/// (divisor `N`), corrected by `fpc(n, N)` without replacement.
fn mean_of_draws_variance(sigma2: f64, population: u64, n: usize, replacement: Replacement) -> Result<f64> {
    check_sample_size(n, population, replacement)?;
    let wr = sigma2 / n as f64;
    Ok(match replacement {
        Replacement::With => wr,
        Replacement::Without => wr * fpc(n as u64, population)?,
    })
}

/// `var(ȳ) = (1 / nN) Σ (Y_i - Ȳ)²`, times `fpc(n, N)` without replacement.
pub fn srs_mean_variance(pop: &Population, n: usize, replacement: Replacement) -> Result<f64> {
    mean_of_draws_variance(pop.variance(), pop.len() as u64, n, replacement)
}

/// Hansen-Hurvitz estimator of the population total: mean of `y_i / z_i`
/// over draws.
pub fn hansen_hurvitz(pop: &Population, weights: &SizeWeights, seq: &DrawSequence) -> Result<f64> {
    weights.check_matches(pop)?;
    let bound = match seq.design() {
        DesignKind::PpsWr => pop.len() as u64,
        DesignKind::PpsWor => weights.total(),
        other => return Err(Error::InvalidSample(format!("{other} draws are not PPS draws"))),
    };
    if let Some(&i) = seq.indices().iter().find(|&&i| i as u64 >= bound) {
        return Err(Error::InvalidSample(format!("index {i} outside 0..{bound}")));
    }
    let units = seq.units(weights);
    mean_over(pop, units.into_iter(), |u| weights.expand(u, pop.value(u)))
}

/// `var(Ŷ_HH) = n⁻¹ Σ Z_i (Y_i / Z_i - t_Y)²`; without replacement from the
/// extended population this shrinks by `fpc(n, t_M)`.
pub fn hh_variance(pop: &Population, weights: &SizeWeights, n: usize, replacement: Replacement) -> Result<f64> {
    weights.check_matches(pop)?;
    let total = pop.total();
    let sigma2: f64 = (0..pop.len())
        .map(|i| {
            let d = weights.expand(i, pop.value(i)) - total;
            weights.probability(i) * d * d
        })
        .sum();
    mean_of_draws_variance(sigma2, weights.total(), n, replacement)
}

/// Mean over initial draws of the network mean of each drawn unit.
pub fn acs_mean(pop: &Population, partition: &NetworkPartition, sample: &AcsSample) -> Result<f64> {
    partition.check_matches(pop)?;
    let initial = sample.initial().indices();
    if let Some(&i) = initial.iter().find(|&&i| !sample.final_units().contains(&i)) {
        return Err(Error::InvalidSample(format!(
            "initial unit {i} missing from the final sample"
        )));
    }
    mean_over(pop, initial.iter().copied(), |u| partition.network_mean_of(u))
}

/// Variance of [`acs_mean`]: the flattened population's variance over `n1`,
/// times `fpc(n1, N)` without replacement.
pub fn acs_variance(
    pop: &Population,
    partition: &NetworkPartition,
    n1: usize,
    replacement: Replacement,
) -> Result<f64> {
    let flat = flatten_networks(pop, partition)?;
    mean_of_draws_variance(flat.variance(), pop.len() as u64, n1, replacement)
}

fn group_means(pop: &Population, groups: &GroupedSample) -> Result<Vec<f64>> {
    groups
        .groups()
        .iter()
        .map(|g| mean_over(pop, g.iter().copied(), |u| pop.value(u)))
        .collect()
}

/// Unbiased estimate of S² from random-group means: the average over group
/// pairs `k < l` of `(ȳ⁽ᵏ⁾ - ȳ⁽ˡ⁾)² / (1/n_k + 1/n_l)`.
pub fn random_group_variance_estimate(pop: &Population, groups: &GroupedSample) -> Result<f64> {
    let k = groups.group_count();
    if k < 2 {
        return Err(out_of_range("K", k as u64, "at least 2 groups"));
    }
    let means = group_means(pop, groups)?;
    let sizes = groups.sizes();
    let mut sum = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let d = means[a] - means[b];
            sum += d * d / (1.0 / sizes[a] as f64 + 1.0 / sizes[b] as f64);
        }
    }
    Ok(sum / (k * (k - 1) / 2) as f64)
}

/// Equal-size shortcut: `m` times the sample variance of the `K` group means.
pub fn random_group_equal_size_estimate(pop: &Population, groups: &GroupedSample) -> Result<f64> {
    let k = groups.group_count();
    if k < 2 {
        return Err(out_of_range("K", k as u64, "at least 2 groups"));
    }
    let sizes = groups.sizes();
    let m = sizes[0];
    if sizes.iter().any(|&s| s != m) {
        return Err(Error::InvalidSample("groups differ in size".into()));
    }
    let means = group_means(pop, groups)?;
    let grand = means.iter().sum::<f64>() / k as f64;
    let s2: f64 = means.iter().map(|y| (y - grand) * (y - grand)).sum::<f64>() / (k - 1) as f64;
    Ok(m as f64 * s2)
}

/// `E{(ȳ⁽ᵏ⁾ - ȳ⁽ˡ⁾)²} = S² (1/n_k + 1/n_l)` for two disjoint groups of a
/// without-replacement sample.
pub fn rg_pair_expectation(pop: &Population, n_k: usize, n_l: usize) -> Result<f64> {
    if n_k < 1 || n_l < 1 {
        return Err(out_of_range("group size", n_k.min(n_l) as u64, "group sizes >= 1"));
    }
    if n_k + n_l > pop.len() {
        return Err(out_of_range(
            "n_k + n_l",
            (n_k + n_l) as u64,
            format!("<= N = {}", pop.len()),
        ));
    }
    Ok(pop.s_squared() * (1.0 / n_k as f64 + 1.0 / n_l as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::random_group_split;

    fn pop(values: &[f64]) -> Population {
        Population::new(values.to_vec()).unwrap()
    }

    fn seq(indices: &[usize], design: DesignKind, bound: usize) -> DrawSequence {
        DrawSequence::new(indices.to_vec(), design, bound).unwrap()
    }

    #[test]
    fn sample_mean_examples() {
        let p = pop(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(sample_mean(&p, &seq(&[1, 4], DesignKind::Srs, 5)).unwrap(), 3.5);
        assert_eq!(
            sample_mean(&p, &seq(&[4, 2, 0, 1, 3], DesignKind::Srs, 5)).unwrap(),
            3.0
        );
        assert!(sample_mean(&p, &seq(&[], DesignKind::Srs, 5)).is_err());
        let c = pop(&[2.5; 4]);
        assert_eq!(sample_mean(&c, &seq(&[3, 3, 1], DesignKind::SrsWr, 4)).unwrap(), 2.5);
    }

    #[test]
    fn srs_variance_examples() {
        let p = pop(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!((srs_mean_variance(&p, 2, Replacement::Without).unwrap() - 0.75).abs() < 1e-15);
        assert!((srs_mean_variance(&p, 2, Replacement::With).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(srs_mean_variance(&p, 5, Replacement::Without).unwrap(), 0.0);
        assert!(srs_mean_variance(&p, 6, Replacement::Without).is_err());
        assert!(srs_mean_variance(&p, 6, Replacement::With).is_ok());
    }

    #[test]
    fn hansen_hurvitz_examples() {
        let p = pop(&[2.0, 2.0, 3.0]);
        let w = SizeWeights::new(vec![1, 2, 3]).unwrap();
        assert_eq!(hansen_hurvitz(&p, &w, &seq(&[0], DesignKind::PpsWr, 3)).unwrap(), 12.0);
        let census = seq(&[5, 0, 3, 1, 4, 2], DesignKind::PpsWor, 6);
        assert!((hansen_hurvitz(&p, &w, &census).unwrap() - 7.0).abs() < 1e-12);

        let prop = pop(&[1.0, 2.0, 3.0]);
        for u in 0..3 {
            assert_eq!(
                hansen_hurvitz(&prop, &w, &seq(&[u], DesignKind::PpsWr, 3)).unwrap(),
                6.0
            );
        }
        assert!(hansen_hurvitz(&p, &w, &seq(&[0], DesignKind::Srs, 3)).is_err());
    }

    #[test]
    fn hh_variance_examples() {
        let p = pop(&[2.0, 2.0, 3.0]);
        let w = SizeWeights::new(vec![1, 2, 3]).unwrap();
        assert!((hh_variance(&p, &w, 2, Replacement::With).unwrap() - 2.5).abs() < 1e-12);
        assert!((hh_variance(&p, &w, 2, Replacement::Without).unwrap() - 2.0).abs() < 1e-12);
        assert!(hh_variance(&p, &w, 7, Replacement::Without).is_err());
        let prop = pop(&[1.0, 2.0, 3.0]);
        assert_eq!(hh_variance(&prop, &w, 3, Replacement::With).unwrap(), 0.0);
    }

    #[test]
    fn acs_examples() {
        let p = pop(&[1.0, 3.0, 5.0]);
        let np = NetworkPartition::from_assignment(&p, &[0, 0, 1]).unwrap();
        let s = AcsSample::from_initial(seq(&[0], DesignKind::Acs, 3), &np).unwrap();
        assert_eq!(acs_mean(&p, &np, &s).unwrap(), 2.0);
        let census = AcsSample::from_initial(seq(&[2, 0, 1], DesignKind::Acs, 3), &np).unwrap();
        assert_eq!(acs_mean(&p, &np, &census).unwrap(), 3.0);
        assert!((acs_variance(&p, &np, 2, Replacement::With).unwrap() - 1.0).abs() < 1e-15);
        assert!((acs_variance(&p, &np, 2, Replacement::Without).unwrap() - 0.5).abs() < 1e-15);
        let c = pop(&[3.0; 3]);
        assert!(matches!(
            acs_variance(&c, &np, 2, Replacement::With),
            Err(Error::InvalidPartition(_))
        ));
        let cp = NetworkPartition::from_assignment(&c, &[0, 0, 1]).unwrap();
        assert_eq!(acs_variance(&c, &cp, 2, Replacement::With).unwrap(), 0.0);
    }

    #[test]
    fn random_group_examples() {
        let p = pop(&[1.0, 2.0, 3.0, 4.0]);
        assert!((rg_pair_expectation(&p, 2, 2).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert!((rg_pair_expectation(&p, 1, 1).unwrap() - 10.0 / 3.0).abs() < 1e-15);
        assert!(rg_pair_expectation(&p, 3, 2).is_err());
        assert_eq!(rg_pair_expectation(&pop(&[7.0; 4]), 1, 2).unwrap(), 0.0);

        let g = random_group_split(&seq(&[2, 0, 3, 1], DesignKind::Srs, 4), &[2, 2]).unwrap();
        // means 2 and 3: (1)² / (1/2 + 1/2)
        assert_eq!(random_group_variance_estimate(&p, &g).unwrap(), 1.0);
        assert_eq!(random_group_equal_size_estimate(&p, &g).unwrap(), 1.0);

        let one = random_group_split(&seq(&[2, 0], DesignKind::Srs, 4), &[2]).unwrap();
        assert!(random_group_variance_estimate(&p, &one).is_err());
    }

    #[test]
    fn estimate_report_rejects_negative_variance() {
        assert!(EstimateReport::new(1.0, -0.1, DesignKind::Srs, Estimand::Mean).is_err());
        assert!(EstimateReport::new(1.0, 0.0, DesignKind::Srs, Estimand::Mean).is_ok());
    }
}
