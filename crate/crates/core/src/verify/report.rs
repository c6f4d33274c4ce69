//! Report records and the tolerance rules that turn moments into verdicts.
//!
//! Reports serialize every real number as a JSON number with 17 significant
//! digits, so reading a report back reproduces the exact `f64` values.

use serde::{Deserialize, Serialize};

use super::EstimatorKind;
use crate::designs::DesignKind;
use crate::estimators::Estimand;

pub(crate) mod json17 {
    use serde::{Serialize, Serializer};
    use serde_json::value::RawValue;

    fn raw(v: f64) -> Option<Box<RawValue>> {
        if !v.is_finite() {
            return None;
        }
        RawValue::from_string(format!("{v:.16e}")).ok()
    }

    pub fn f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        raw(*v).serialize(s)
    }

    pub fn opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.and_then(raw).serialize(s)
    }

    pub fn vec_f64<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| raw(x)))
    }

    pub fn mat_f64<S: Serializer>(m: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [f64]);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                vec_f64(self.0, s)
            }
        }
        s.collect_seq(m.iter().map(|r| Row(r)))
    }
}

/// Default tolerances used when comparing moments.
pub const ORACLE_ABS_TOLERANCE: f64 = 1e-10;
pub const ORACLE_REL_TOLERANCE: f64 = 1e-9;
pub const SE_MULTIPLIER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance for exact (enumerated vs closed-form) comparisons.
    #[serde(serialize_with = "json17::f64")]
    pub oracle_abs: f64,
    /// Relative tolerance for exact comparisons; the larger bound applies.
    #[serde(serialize_with = "json17::f64")]
    pub oracle_rel: f64,
    /// Width of the Monte Carlo acceptance band in standard errors.
    #[serde(serialize_with = "json17::f64")]
    pub se_multiplier: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle_abs: ORACLE_ABS_TOLERANCE,
            oracle_rel: ORACLE_REL_TOLERANCE,
            se_multiplier: SE_MULTIPLIER,
        }
    }
}

impl Tolerances {
    pub fn exact_agrees(&self, observed: f64, expected: f64) -> bool {
        (observed - expected).abs() <= self.oracle_abs.max(self.oracle_rel * expected.abs())
    }

    /// `|observed - expected| <= k·SE`. The band never shrinks below the
    /// absolute oracle tolerance, so zero-variance cases compare exactly up to
    /// rounding.
    pub fn empirical_agrees(&self, observed: f64, expected: f64, se: Option<f64>) -> bool {
        let band = se.map_or(0.0, |se| self.se_multiplier * se).max(self.oracle_abs);
        (observed - expected).abs() <= band
    }
}

/// Closed-form moments of an estimator. Variance is absent where no closed
/// form is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    #[serde(serialize_with = "json17::f64")]
    pub mean: f64,
    #[serde(serialize_with = "json17::opt_f64")]
    pub variance: Option<f64>,
}

/// Exact moments obtained by summing over every outcome of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    #[serde(serialize_with = "json17::f64")]
    pub mean: f64,
    #[serde(serialize_with = "json17::f64")]
    pub variance: f64,
    /// Number of outcomes (or support points) summed over.
    pub outcomes: u64,
}

/// Monte Carlo moments with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoments {
    #[serde(serialize_with = "json17::f64")]
    pub mean: f64,
    #[serde(serialize_with = "json17::f64")]
    pub variance: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "json17::f64")]
    pub mean_se: f64,
    /// Spread of per-batch variances; absent when batches are too small.
    #[serde(serialize_with = "json17::opt_f64")]
    pub variance_se: Option<f64>,
    pub batches: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdicts {
    pub enumerated_mean: Option<bool>,
    pub enumerated_variance: Option<bool>,
    pub empirical_mean: Option<bool>,
    pub empirical_variance: Option<bool>,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        [
            self.enumerated_mean,
            self.enumerated_variance,
            self.empirical_mean,
            self.empirical_variance,
        ]
        .into_iter()
        .flatten()
        .all(|v| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub estimator: EstimatorKind,
    pub design: DesignKind,
    pub estimand: Estimand,
    pub draws: usize,
    pub theoretical: Moments,
    pub enumerated: Option<ExactMoments>,
    pub empirical: Option<EmpiricalMoments>,
    pub verdicts: Verdicts,
    pub pass: bool,
    pub tolerances: Tolerances,
}

impl MomentReport {
    /// Applies the tolerance rules: enumerated moments must match the closed
    /// form exactly (up to the oracle tolerance), empirical moments within
    /// `k` standard errors.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        estimator: EstimatorKind,
        design: DesignKind,
        estimand: Estimand,
        draws: usize,
        theoretical: Moments,
        enumerated: Option<ExactMoments>,
        empirical: Option<EmpiricalMoments>,
        tolerances: Tolerances,
    ) -> Self {
        let mut verdicts = Verdicts::default();
        if let Some(e) = &enumerated {
            verdicts.enumerated_mean = Some(tolerances.exact_agrees(e.mean, theoretical.mean));
            verdicts.enumerated_variance = theoretical.variance.map(|v| tolerances.exact_agrees(e.variance, v));
        }
        if let Some(e) = &empirical {
            verdicts.empirical_mean = Some(tolerances.empirical_agrees(e.mean, theoretical.mean, Some(e.mean_se)));
            // Without a closed-form variance, compare against the enumerated one.
            let target = theoretical.variance.or(enumerated.map(|x| x.variance));
            verdicts.empirical_variance = target.map(|v| tolerances.empirical_agrees(e.variance, v, e.variance_se));
        }
        Self {
            estimator,
            design,
            estimand,
            draws,
            theoretical,
            enumerated,
            empirical,
            pass: verdicts.all_pass(),
            verdicts,
            tolerances,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceSource {
    Enumerated,
    Empirical,
}

/// Without-replacement variance relative to with-replacement variance,
/// against the finite population correction that predicts it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeEfficiencyReport {
    pub estimator: EstimatorKind,
    pub design_wor: DesignKind,
    pub design_wr: DesignKind,
    /// `N`, or `t_M` for PPS.
    pub effective_population: u64,
    pub draws: usize,
    #[serde(serialize_with = "json17::f64")]
    pub wor_variance: f64,
    #[serde(serialize_with = "json17::f64")]
    pub wr_variance: f64,
    /// Absent when the with-replacement variance is zero.
    #[serde(serialize_with = "json17::opt_f64")]
    pub ratio: Option<f64>,
    #[serde(serialize_with = "json17::f64")]
    pub predicted_fpc: f64,
    pub source: VarianceSource,
    #[serde(serialize_with = "json17::f64")]
    pub tolerance: f64,
    pub pass: bool,
}

impl RelativeEfficiencyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exact moments of one estimator next to its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub estimator: EstimatorKind,
    pub design: DesignKind,
    pub draws: usize,
    pub theoretical: Moments,
    pub enumerated: ExactMoments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountOutcome {
    pub counts: Vec<u64>,
    /// Probability from the exact enumeration.
    #[serde(serialize_with = "json17::f64")]
    pub probability: f64,
    /// Probability from the closed-form pmf.
    #[serde(serialize_with = "json17::f64")]
    pub pmf: f64,
}

/// Exact class-count distribution with its first two moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistributionReport {
    pub design: DesignKind,
    pub subgroup_sizes: Vec<u64>,
    pub draws: u64,
    pub outcomes: Vec<CountOutcome>,
    #[serde(serialize_with = "json17::vec_f64")]
    pub mean: Vec<f64>,
    #[serde(serialize_with = "json17::mat_f64")]
    pub covariance: Vec<Vec<f64>>,
}
