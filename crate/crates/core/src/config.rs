//! JSON inputs: the population file and the design configuration.
//!
//! Population file:
//!
//! ```json
//! {"values": [1, 2, 3], "sizes": [1, 2, 3], "adjacency": [[1], [0, 2], [1]], "threshold": 0.5}
//! ```
//!
//! `sizes` is needed by the PPS designs, `adjacency` (zero-based neighbour
//! lists) and `threshold` by adaptive cluster sampling. A classified
//! population for class-count work is given as `{"subgroup_sizes": [2, 3]}`.
//!
//! Design configuration:
//!
//! ```json
//! {"design": "srs", "n": 4, "group_sizes": [2, 2]}
//! ```

use serde::{Deserialize, Serialize};

use crate::designs::DesignKind;
use crate::error::{Error, Result};
use crate::population::{compute_networks, Adjacency, ClassifiedPopulation, Population, SizeWeights};
use crate::verify::{Frame, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_sizes: Option<Vec<u64>>,
}

impl PopulationFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        if file.values.is_none() && file.subgroup_sizes.is_none() {
            return Err(Error::InvalidConfig(
                "population file needs `values` or `subgroup_sizes`".into(),
            ));
        }
        Ok(file)
    }

    pub fn population(&self) -> Result<Population> {
        let values = self
            .values
            .clone()
            .ok_or_else(|| Error::InvalidConfig("population file has no `values`".into()))?;
        Population::new(values)
    }

    pub fn classified(&self) -> Result<ClassifiedPopulation> {
        let sizes = self
            .subgroup_sizes
            .clone()
            .ok_or_else(|| Error::InvalidConfig("population file has no `subgroup_sizes`".into()))?;
        ClassifiedPopulation::new(sizes)
    }

    pub fn weights(&self) -> Result<SizeWeights> {
        let sizes = self
            .sizes
            .clone()
            .ok_or_else(|| Error::InvalidConfig("PPS designs need `sizes` in the population file".into()))?;
        SizeWeights::new(sizes)
    }

    pub fn adjacency(&self) -> Result<Adjacency> {
        let lists = self
            .adjacency
            .clone()
            .ok_or_else(|| Error::InvalidConfig("ACS designs need `adjacency` in the population file".into()))?;
        Adjacency::new(lists)
    }

    pub fn threshold(&self) -> Result<f64> {
        match self.threshold {
            Some(t) if t.is_finite() => Ok(t),
            Some(t) => Err(Error::InvalidConfig(format!("threshold {t} is not finite"))),
            None => Err(Error::InvalidConfig(
                "ACS designs need `threshold` in the population file".into(),
            )),
        }
    }

    /// Builds the population frame the design samples from.
    pub fn frame_for(&self, design: DesignKind) -> Result<Frame> {
        match design {
            DesignKind::Srs | DesignKind::SrsWr => match (&self.values, &self.subgroup_sizes) {
                (Some(_), _) => Ok(Frame::Units(self.population()?)),
                (None, Some(_)) => Ok(Frame::Classified(self.classified()?)),
                (None, None) => Err(Error::InvalidConfig("population file is empty".into())),
            },
            DesignKind::PpsWr | DesignKind::PpsWor => {
                let population = self.population()?;
                let weights = self.weights()?;
                Frame::weighted(population, weights)
            }
            DesignKind::Acs | DesignKind::AcsWr => {
                let population = self.population()?;
                let partition = compute_networks(&population, &self.adjacency()?, self.threshold()?)?;
                Frame::networked(population, partition)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub design: DesignKind,
    pub n: usize,
    /// Initial sample size for adaptive cluster sampling; defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_sizes: Option<Vec<usize>>,
}

impl DesignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Number of (initial) draws.
    pub fn draws(&self) -> usize {
        match self.design {
            DesignKind::Acs | DesignKind::AcsWr => self.n1.unwrap_or(self.n),
            _ => self.n,
        }
    }

    pub fn scenario(&self, population: &PopulationFile) -> Result<Scenario> {
        let frame = population.frame_for(self.design)?;
        Scenario::new(frame, self.design, self.draws(), self.group_sizes.clone())
    }
}
