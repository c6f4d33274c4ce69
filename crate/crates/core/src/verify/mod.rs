//! Verification of closed-form moments against two independent engines:
//! exhaustive enumeration of ordered outcomes and a seeded Monte Carlo run.

pub mod enumerate;
pub mod monte_carlo;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::designs::{self, AcsSample, DesignKind, DrawSequence};
use crate::distributions::{
    fpc, multinomial_cov, multinomial_pmf, mvhyper_cov, mvhyper_pmf, sample_counts, CountVector, CovMatrix,
};
use crate::error::{out_of_range, Error, Result};
use crate::estimators::{self, Estimand};
use crate::population::{ClassifiedPopulation, NetworkPartition, Population, SizeWeights};
use crate::rng::DrawSource;
use crate::Replacement;

pub use enumerate::{
    enumerate_count_distribution, enumerate_count_distribution_ordered, enumerate_moments, CountDistribution,
    OUTCOME_LIMIT,
};
pub use monte_carlo::{simulate, MomentAccumulator, MonteCarloSettings};
pub use report::{
    CountDistributionReport, CountOutcome, EmpiricalMoments, EnumerationReport, ExactMoments, MomentReport, Moments,
    RelativeEfficiencyReport, Tolerances, VarianceSource, Verdicts,
};

/// Which statistic a verification run studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    SampleMean,
    HansenHurvitz,
    AcsMean,
    RandomGroupVariance,
    /// Count of draws falling in the given class.
    ClassCount(usize),
}

impl EstimatorKind {
    pub fn estimand(self) -> Estimand {
        match self {
            EstimatorKind::SampleMean | EstimatorKind::AcsMean => Estimand::Mean,
            EstimatorKind::HansenHurvitz => Estimand::Total,
            EstimatorKind::RandomGroupVariance => Estimand::PopulationVariance,
            EstimatorKind::ClassCount(_) => Estimand::ClassCount,
        }
    }

    pub fn label(self) -> String {
        match self {
            EstimatorKind::SampleMean => "sample_mean".into(),
            EstimatorKind::HansenHurvitz => "hansen_hurvitz".into(),
            EstimatorKind::AcsMean => "acs_mean".into(),
            EstimatorKind::RandomGroupVariance => "random_group_variance".into(),
            EstimatorKind::ClassCount(k) => format!("class_count[{k}]"),
        }
    }
}

/// The population a design samples from, with whatever auxiliary structure
/// the design needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Units(Population),
    Weighted {
        population: Population,
        weights: SizeWeights,
    },
    Networked {
        population: Population,
        partition: NetworkPartition,
    },
    Classified(ClassifiedPopulation),
}

impl Frame {
    pub fn weighted(population: Population, weights: SizeWeights) -> Result<Self> {
        if weights.len() != population.len() {
            return Err(Error::LengthMismatch {
                what: "size weights",
                expected: population.len(),
                found: weights.len(),
            });
        }
        Ok(Frame::Weighted { population, weights })
    }

    pub fn networked(population: Population, partition: NetworkPartition) -> Result<Self> {
        if partition.units() != population.len() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} units but the population has {}",
                partition.units(),
                population.len()
            )));
        }
        Ok(Frame::Networked { population, partition })
    }

    /// Number of units in the population.
    pub fn units(&self) -> u64 {
        match self {
            Frame::Units(p) | Frame::Weighted { population: p, .. } | Frame::Networked { population: p, .. } => {
                p.len() as u64
            }
            Frame::Classified(c) => c.total(),
        }
    }
}

/// A population frame paired with a design and its sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    frame: Frame,
    design: DesignKind,
    draws: usize,
    group_sizes: Option<Vec<usize>>,
}

impl Scenario {
    pub fn new(frame: Frame, design: DesignKind, draws: usize, group_sizes: Option<Vec<usize>>) -> Result<Self> {
        let compatible = match &frame {
            Frame::Units(_) | Frame::Classified(_) => matches!(design, DesignKind::Srs | DesignKind::SrsWr),
            Frame::Weighted { .. } => design.is_pps(),
            Frame::Networked { .. } => design.is_acs(),
        };
        if !compatible {
            return Err(Error::InvalidConfig(format!(
                "design {design} does not fit this population frame"
            )));
        }
        let scenario = Self {
            frame,
            design,
            draws,
            group_sizes,
        };
        let limit = scenario.sampling_units();
        if draws < 1 {
            return Err(out_of_range("n", 0, "n >= 1"));
        }
        if design.replacement() == Replacement::Without && draws as u64 > limit {
            return Err(out_of_range(
                "n",
                draws as u64,
                format!("n <= {limit} for without-replacement design {design}"),
            ));
        }
        if let Some(sizes) = &scenario.group_sizes {
            if !matches!(scenario.frame, Frame::Units(_)) || design != DesignKind::Srs {
                return Err(Error::InvalidConfig(
                    "random groups need a without-replacement simple random sample of unit values".into(),
                ));
            }
            if sizes.len() < 2 || sizes.contains(&0) {
                return Err(Error::InvalidConfig(
                    "random groups need at least two non-empty groups".into(),
                ));
            }
            if sizes.iter().sum::<usize>() != draws {
                return Err(Error::InvalidConfig(format!(
                    "group sizes sum to {} but n = {draws}",
                    sizes.iter().sum::<usize>()
                )));
            }
        }
        Ok(scenario)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn design(&self) -> DesignKind {
        self.design
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn group_sizes(&self) -> Option<&[usize]> {
        self.group_sizes.as_deref()
    }

    /// The same frame and sample size under another design.
    pub fn with_design(&self, design: DesignKind) -> Result<Self> {
        Self::new(self.frame.clone(), design, self.draws, self.group_sizes.clone())
    }

    /// Size of the population the draws are taken from: `t_M` for PPS, `N` otherwise.
    pub fn sampling_units(&self) -> u64 {
        match &self.frame {
            Frame::Weighted { weights, .. } => weights.total(),
            other => other.units(),
        }
    }

    /// The estimators a run studies by default.
    pub fn estimators(&self) -> Vec<EstimatorKind> {
        match &self.frame {
            Frame::Units(_) if self.group_sizes.is_some() => vec![EstimatorKind::RandomGroupVariance],
            Frame::Units(_) => vec![EstimatorKind::SampleMean],
            Frame::Weighted { .. } => vec![EstimatorKind::HansenHurvitz],
            Frame::Networked { .. } => vec![EstimatorKind::AcsMean],
            Frame::Classified(c) => (0..c.classes()).map(EstimatorKind::ClassCount).collect(),
        }
    }

    pub fn check_estimator(&self, estimator: EstimatorKind) -> Result<()> {
        let ok = match (&self.frame, estimator) {
            (Frame::Units(_), EstimatorKind::SampleMean) => true,
            (Frame::Units(_), EstimatorKind::RandomGroupVariance) => self.group_sizes.is_some(),
            (Frame::Weighted { .. }, EstimatorKind::HansenHurvitz) => true,
            (Frame::Networked { .. }, EstimatorKind::AcsMean) => true,
            (Frame::Classified(c), EstimatorKind::ClassCount(k)) => k < c.classes(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "estimator {} under design {}",
                estimator.label(),
                self.design
            )))
        }
    }

    /// Closed-form expectation and design variance.
    pub fn theoretical(&self, estimator: EstimatorKind) -> Result<Moments> {
        self.check_estimator(estimator)?;
        let replacement = self.design.replacement();
        let n = self.draws;
        Ok(match (&self.frame, estimator) {
            (Frame::Units(p), EstimatorKind::SampleMean) => Moments {
                mean: p.mean(),
                variance: Some(estimators::srs_mean_variance(p, n, replacement)?),
            },
            (Frame::Units(p), EstimatorKind::RandomGroupVariance) => Moments {
                mean: p.s_squared(),
                variance: None,
            },
            (Frame::Weighted { population, weights }, _) => Moments {
                mean: population.total(),
                variance: Some(estimators::hh_variance(population, weights, n, replacement)?),
            },
            (Frame::Networked { population, partition }, _) => Moments {
                mean: population.mean(),
                variance: Some(estimators::acs_variance(population, partition, n, replacement)?),
            },
            (Frame::Classified(c), EstimatorKind::ClassCount(k)) => {
                let cov = count_covariance(c, n as u64, replacement)?;
                Moments {
                    mean: n as f64 * c.sizes()[k] as f64 / c.total() as f64,
                    variance: Some(cov.get(k, k)),
                }
            }
            _ => unreachable!("checked above"),
        })
    }

    fn evaluate_sequence(&self, estimator: EstimatorKind, seq: DrawSequence) -> Result<f64> {
        match (&self.frame, estimator) {
            (Frame::Units(p), EstimatorKind::SampleMean) => estimators::sample_mean(p, &seq),
            (Frame::Units(p), EstimatorKind::RandomGroupVariance) => {
                let sizes = self.group_sizes.as_deref().expect("checked group sizes");
                let groups = designs::random_group_split(&seq, sizes)?;
                estimators::random_group_variance_estimate(p, &groups)
            }
            (Frame::Weighted { population, weights }, EstimatorKind::HansenHurvitz) => {
                estimators::hansen_hurvitz(population, weights, &seq)
            }
            (Frame::Networked { population, partition }, EstimatorKind::AcsMean) => {
                let sample = AcsSample::from_initial(seq, partition)?;
                estimators::acs_mean(population, partition, &sample)
            }
            (Frame::Classified(c), EstimatorKind::ClassCount(k)) => {
                let labels = c.unit_labels();
                Ok(seq.indices().iter().filter(|&&u| labels[u] == k).count() as f64)
            }
            _ => Err(Error::Unsupported(format!("estimator {}", estimator.label()))),
        }
    }

    /// Estimator value for one ordered outcome (unit indices, or extended
    /// positions for PPS without replacement).
    pub fn evaluate(&self, estimator: EstimatorKind, outcome: &[usize]) -> Result<f64> {
        self.evaluate_sequence(estimator, DrawSequence::from_parts(outcome.to_vec(), self.design))
    }

    /// Draws one sample with the design's sampler and evaluates the estimator.
    pub fn simulate_once<S: DrawSource + ?Sized>(&self, estimator: EstimatorKind, source: &mut S) -> Result<f64> {
        let replacement = self.design.replacement();
        let n = self.draws;
        match (&self.frame, estimator) {
            (Frame::Classified(c), EstimatorKind::ClassCount(k)) => {
                Ok(sample_counts(c, n as u64, replacement, source)?.counts()[k] as f64)
            }
            (Frame::Units(p), _) => {
                let seq = designs::srs(p.len(), n, replacement, source)?;
                self.evaluate_sequence(estimator, seq)
            }
            (Frame::Weighted { population, weights }, _) => {
                let seq = match replacement {
                    Replacement::With => designs::pps_wr(weights, n, source)?,
                    Replacement::Without => designs::pps_wor_extended(population, weights, n, source)?,
                };
                self.evaluate_sequence(estimator, seq)
            }
            (Frame::Networked { population, partition }, EstimatorKind::AcsMean) => {
                let sample = designs::acs(population, partition, n, replacement, source)?;
                estimators::acs_mean(population, partition, &sample)
            }
            _ => Err(Error::Unsupported(format!("estimator {}", estimator.label()))),
        }
    }
}

fn count_covariance(pop: &ClassifiedPopulation, n: u64, replacement: Replacement) -> Result<CovMatrix> {
    match replacement {
        Replacement::Without => mvhyper_cov(pop, n),
        Replacement::With => multinomial_cov(&pop.proportions(), n),
    }
}

/// Enumerated and/or simulated moments compared against the closed form.
///
/// Enumeration is skipped when `enumerate` is false or the instance exceeds
/// [`OUTCOME_LIMIT`]; Monte Carlo runs when settings are given.
pub fn verify_scenario(
    scenario: &Scenario,
    estimator: EstimatorKind,
    enumerate: bool,
    monte_carlo: Option<&MonteCarloSettings>,
    tolerances: Tolerances,
) -> Result<MomentReport> {
    let theoretical = scenario.theoretical(estimator)?;
    let enumerated = if enumerate {
        match enumerate_moments(scenario, estimator) {
            Ok(m) => Some(m),
            Err(Error::TooLarge { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let empirical = monte_carlo.map(|s| simulate(scenario, estimator, s)).transpose()?;
    Ok(MomentReport::assemble(
        estimator,
        scenario.design(),
        estimator.estimand(),
        scenario.draws(),
        theoretical,
        enumerated,
        empirical,
        tolerances,
    ))
}

/// Monte Carlo moments of an estimator with verdicts against the closed form.
pub fn run_monte_carlo(
    scenario: &Scenario,
    estimator: EstimatorKind,
    settings: &MonteCarloSettings,
    tolerances: Tolerances,
) -> Result<MomentReport> {
    verify_scenario(scenario, estimator, false, Some(settings), tolerances)
}

/// Ratio of without- to with-replacement variance, enumerated when the
/// instance allows it and simulated otherwise (only if `fallback` is given),
/// checked against `fpc(n, N)` with `N = t_M` for PPS.
pub fn relative_efficiency(
    scenario: &Scenario,
    estimator: EstimatorKind,
    fallback: Option<&MonteCarloSettings>,
    tolerances: Tolerances,
) -> Result<RelativeEfficiencyReport> {
    if scenario.group_sizes().is_some() {
        return Err(Error::Unsupported(
            "random groups have no with-replacement counterpart".into(),
        ));
    }
    scenario.check_estimator(estimator)?;
    let (wor, wr) = match scenario.design().replacement() {
        Replacement::Without => (scenario.clone(), scenario.with_design(scenario.design().counterpart())?),
        Replacement::With => (scenario.with_design(scenario.design().counterpart())?, scenario.clone()),
    };
    let effective_population = wor.sampling_units();
    let n = scenario.draws();
    let predicted_fpc = fpc(n as u64, effective_population)?;

    let exact = enumerate_moments(&wor, estimator).and_then(|a| Ok((a, enumerate_moments(&wr, estimator)?)));
    let (source, wor_variance, wr_variance, tolerance, pass) = match exact {
        Ok((a, b)) => {
            let ratio_ok = if b.variance > tolerances.oracle_abs {
                tolerances.exact_agrees(a.variance / b.variance, predicted_fpc)
            } else {
                tolerances.exact_agrees(a.variance, b.variance * predicted_fpc)
            };
            (
                VarianceSource::Enumerated,
                a.variance,
                b.variance,
                tolerances.oracle_abs,
                ratio_ok,
            )
        }
        Err(Error::TooLarge { outcomes, limit }) => {
            let Some(settings) = fallback else {
                return Err(Error::TooLarge { outcomes, limit });
            };
            let a = monte_carlo::simulate_on_streams(&wor, estimator, settings, 0)?;
            let b = monte_carlo::simulate_on_streams(&wr, estimator, settings, 1 << 32)?;
            let rel = |v: f64, se: Option<f64>| se.map(|s| if v > 0.0 { s / v } else { 0.0 });
            let band = match (rel(a.variance, a.variance_se), rel(b.variance, b.variance_se)) {
                (Some(x), Some(y)) if b.variance > 0.0 => {
                    tolerances.se_multiplier * (a.variance / b.variance) * (x * x + y * y).sqrt()
                }
                _ => tolerances.oracle_abs,
            };
            let pass = if b.variance > 0.0 {
                (a.variance / b.variance - predicted_fpc).abs() <= band.max(tolerances.oracle_abs)
            } else {
                a.variance <= tolerances.oracle_abs
            };
            (VarianceSource::Empirical, a.variance, b.variance, band, pass)
        }
        Err(e) => return Err(e),
    };
    Ok(RelativeEfficiencyReport {
        estimator,
        design_wor: wor.design(),
        design_wr: wr.design(),
        effective_population,
        draws: n,
        wor_variance,
        wr_variance,
        ratio: (wr_variance > tolerances.oracle_abs).then(|| wor_variance / wr_variance),
        predicted_fpc,
        source,
        tolerance,
        pass,
    })
}

/// Exact moments of an estimator alongside the closed form.
pub fn enumeration_report(scenario: &Scenario, estimator: EstimatorKind) -> Result<EnumerationReport> {
    Ok(EnumerationReport {
        estimator,
        design: scenario.design(),
        draws: scenario.draws(),
        theoretical: scenario.theoretical(estimator)?,
        enumerated: enumerate_moments(scenario, estimator)?,
    })
}

/// The exact class-count distribution of `n` draws, each support point with
/// its closed-form pmf value.
pub fn count_distribution_report(
    pop: &ClassifiedPopulation,
    n: u64,
    replacement: Replacement,
) -> Result<CountDistributionReport> {
    let dist = enumerate_count_distribution(pop, n, replacement)?;
    let probs = pop.proportions();
    let outcomes = dist
        .iter()
        .map(|(counts, probability)| {
            let cv = CountVector::new(counts.to_vec())?;
            let pmf = match replacement {
                Replacement::Without => mvhyper_pmf(&cv, pop)?,
                Replacement::With => multinomial_pmf(&cv, &probs)?,
            };
            Ok(CountOutcome {
                counts: counts.to_vec(),
                probability,
                pmf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountDistributionReport {
        design: DesignKind::srs(replacement),
        subgroup_sizes: pop.sizes().to_vec(),
        draws: n,
        outcomes,
        mean: dist.mean(),
        covariance: dist.covariance().to_rows(),
    })
}

/// Enumerated class-count covariance with and without replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct CountCovarianceCheck {
    pub without_replacement: CovMatrix,
    pub with_replacement: CovMatrix,
    pub fpc: f64,
    /// Largest `|cov_wor - fpc · cov_wr|` over all entries.
    pub max_abs_deviation: f64,
}

/// Enumerates both count distributions and measures how far the
/// without-replacement covariance is from `fpc(n, N)` times the
/// with-replacement covariance.
pub fn count_covariance_check(pop: &ClassifiedPopulation, n: u64) -> Result<CountCovarianceCheck> {
    let factor = fpc(n, pop.total())?;
    let wor = enumerate_count_distribution(pop, n, Replacement::Without)?.covariance();
    let wr = enumerate_count_distribution(pop, n, Replacement::With)?.covariance();
    let max_abs_deviation = wor.max_abs_diff(&wr.scaled(factor));
    Ok(CountCovarianceCheck {
        without_replacement: wor,
        with_replacement: wr,
        fpc: factor,
        max_abs_deviation,
    })
}
