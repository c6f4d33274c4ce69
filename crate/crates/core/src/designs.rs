//! Sampling designs. Every design is a sequence of single-unit draws, so each
//! produces an ordered [`DrawSequence`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::population::{NetworkPartition, Population, SizeWeights};
use crate::rng::DrawSource;
use crate::Replacement;

/// The designs understood by the crate, named as in design configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    /// Simple random sampling without replacement.
    Srs,
    SrsWr,
    PpsWr,
    /// Simple random sampling without replacement from the PPS-extended population.
    PpsWor,
    /// Adaptive cluster sampling, initial sample without replacement.
    Acs,
    AcsWr,
}

impl DesignKind {
    pub fn replacement(self) -> Replacement {
        match self {
            DesignKind::Srs | DesignKind::PpsWor | DesignKind::Acs => Replacement::Without,
            DesignKind::SrsWr | DesignKind::PpsWr | DesignKind::AcsWr => Replacement::With,
        }
    }

    /// The same design with the other replacement scheme.
    pub fn counterpart(self) -> DesignKind {
        match self {
            DesignKind::Srs => DesignKind::SrsWr,
            DesignKind::SrsWr => DesignKind::Srs,
            DesignKind::PpsWr => DesignKind::PpsWor,
            DesignKind::PpsWor => DesignKind::PpsWr,
            DesignKind::Acs => DesignKind::AcsWr,
            DesignKind::AcsWr => DesignKind::Acs,
        }
    }

    pub fn srs(replacement: Replacement) -> Self {
        match replacement {
            Replacement::Without => DesignKind::Srs,
            Replacement::With => DesignKind::SrsWr,
        }
    }

    pub fn acs(replacement: Replacement) -> Self {
        match replacement {
            Replacement::Without => DesignKind::Acs,
            Replacement::With => DesignKind::AcsWr,
        }
    }

    pub fn is_pps(self) -> bool {
        matches!(self, DesignKind::PpsWr | DesignKind::PpsWor)
    }

    pub fn is_acs(self) -> bool {
        matches!(self, DesignKind::Acs | DesignKind::AcsWr)
    }

    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Srs => "srs",
            DesignKind::SrsWr => "srs_wr",
            DesignKind::PpsWr => "pps_wr",
            DesignKind::PpsWor => "pps_wor",
            DesignKind::Acs => "acs",
            DesignKind::AcsWr => "acs_wr",
        }
    }
}

impl std::fmt::Display for DesignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered unit indices produced by a design.
///
/// For [`DesignKind::PpsWor`] the indices address positions `0..t_M` of the
/// extended population; [`DrawSequence::units`] maps them back to units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawSequence {
    indices: Vec<usize>,
    replacement: Replacement,
    design: DesignKind,
}

impl DrawSequence {
    /// Validates that indices lie in `0..bound` and, without replacement, are distinct.
    pub fn new(indices: Vec<usize>, design: DesignKind, bound: usize) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= bound) {
            return Err(Error::InvalidSample(format!("index {i} outside 0..{bound}")));
        }
        let replacement = design.replacement();
        if replacement == Replacement::Without {
            let distinct: BTreeSet<_> = indices.iter().collect();
            if distinct.len() != indices.len() {
                return Err(Error::InvalidSample(
                    "repeated index in a without-replacement draw".into(),
                ));
            }
        }
        Ok(Self {
            indices,
            replacement,
            design,
        })
    }

    /// Unchecked constructor for outcomes the caller generated itself.
    pub(crate) fn from_parts(indices: Vec<usize>, design: DesignKind) -> Self {
        Self {
            indices,
            replacement: design.replacement(),
            design,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn replacement(&self) -> Replacement {
        self.replacement
    }

    pub fn design(&self) -> DesignKind {
        self.design
    }

    /// Original population units behind each draw.
    pub fn units(&self, weights: &SizeWeights) -> Vec<usize> {
        match self.design {
            DesignKind::PpsWor => self.indices.iter().map(|&p| weights.unit_at(p as u64)).collect(),
            _ => self.indices.clone(),
        }
    }
}

/// A without-replacement sample split into disjoint ordered groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedSample {
    groups: Vec<Vec<usize>>,
}

impl GroupedSample {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// Initial draw of an adaptive cluster sample together with every unit that
/// enters through network expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcsSample {
    initial: DrawSequence,
    final_units: BTreeSet<usize>,
}

impl AcsSample {
    /// Assembles a sample from an initial draw by adding the whole network of
    /// every initially drawn unit.
    pub fn from_initial(initial: DrawSequence, partition: &NetworkPartition) -> Result<Self> {
        if !initial.design().is_acs() && !matches!(initial.design(), DesignKind::Srs | DesignKind::SrsWr) {
            return Err(Error::InvalidSample(format!(
                "{} draws cannot seed an adaptive cluster sample",
                initial.design()
            )));
        }
        if let Some(&i) = initial.indices().iter().find(|&&i| i >= partition.units()) {
            return Err(Error::InvalidSample(format!("initial unit {i} outside the partition")));
        }
        let networks: BTreeSet<usize> = initial.indices().iter().map(|&i| partition.network_of(i)).collect();
        let final_units = (0..partition.units())
            .filter(|&u| networks.contains(&partition.network_of(u)))
            .collect();
        Ok(Self { initial, final_units })
    }

    pub fn initial(&self) -> &DrawSequence {
        &self.initial
    }

    pub fn final_units(&self) -> &BTreeSet<usize> {
        &self.final_units
    }
}

/// `n` uniform draws from `0..units`. Without replacement this is a partial
/// Fisher-Yates shuffle: each draw is uniform over the units not yet drawn.
fn sequential_draws<S: DrawSource + ?Sized>(
    units: usize,
    n: usize,
    replacement: Replacement,
    source: &mut S,
) -> Result<Vec<usize>> {
    if n < 1 {
        return Err(out_of_range("n", n as u64, "n >= 1"));
    }
    match replacement {
        Replacement::With => Ok((0..n).map(|_| source.below(units as u64) as usize).collect()),
        Replacement::Without => {
            if n > units {
                return Err(out_of_range(
                    "n",
                    n as u64,
                    format!("n <= N = {units} without replacement"),
                ));
            }
            let mut remaining: Vec<usize> = (0..units).collect();
            for j in 0..n {
                let pick = j + source.below((units - j) as u64) as usize;
                remaining.swap(j, pick);
            }
            remaining.truncate(n);
            Ok(remaining)
        }
    }
}

/// Simple random sampling of `n` draws from `units` units.
pub fn srs<S: DrawSource + ?Sized>(
    units: usize,
    n: usize,
    replacement: Replacement,
    source: &mut S,
) -> Result<DrawSequence> {
    let indices = sequential_draws(units, n, replacement, source)?;
    Ok(DrawSequence {
        indices,
        replacement,
        design: DesignKind::srs(replacement),
    })
}

/// PPS with replacement: every draw picks unit `i` with probability
/// `M_i / t_M`, by inverse transform on the integer cumulative weights.
pub fn pps_wr<S: DrawSource + ?Sized>(weights: &SizeWeights, n: usize, source: &mut S) -> Result<DrawSequence> {
    if n < 1 {
        return Err(out_of_range("n", n as u64, "n >= 1"));
    }
    let indices = (0..n).map(|_| weights.unit_at(source.below(weights.total()))).collect();
    Ok(DrawSequence {
        indices,
        replacement: Replacement::With,
        design: DesignKind::PpsWr,
    })
}

/// Simple random sampling without replacement of `n` positions from the
/// extended population of size `t_M`.
pub fn pps_wor_extended<S: DrawSource + ?Sized>(
    pop: &Population,
    weights: &SizeWeights,
    n: usize,
    source: &mut S,
) -> Result<DrawSequence> {
    weights.check_matches(pop)?;
    let total = weights.total();
    if n as u64 > total {
        return Err(out_of_range("n", n as u64, format!("n <= t_M = {total}")));
    }
    let indices = sequential_draws(total as usize, n, Replacement::Without, source)?;
    Ok(DrawSequence {
        indices,
        replacement: Replacement::Without,
        design: DesignKind::PpsWor,
    })
}

/// Adaptive cluster sampling: a simple random initial sample of `n1` units,
/// each bringing its whole network into the final sample.
pub fn acs<S: DrawSource + ?Sized>(
    pop: &Population,
    partition: &NetworkPartition,
    n1: usize,
    replacement: Replacement,
    source: &mut S,
) -> Result<AcsSample> {
    partition.check_matches(pop)?;
    let indices = sequential_draws(pop.len(), n1, replacement, source)?;
    let initial = DrawSequence {
        indices,
        replacement,
        design: DesignKind::acs(replacement),
    };
    AcsSample::from_initial(initial, partition)
}

/// Ascribes the first `sizes[0]` draws to group 1, the next `sizes[1]` to
/// group 2 and so on. For a sequential without-replacement draw this has the
/// same law as sampling first and then grouping at random.
pub fn random_group_split(seq: &DrawSequence, sizes: &[usize]) -> Result<GroupedSample> {
    if seq.replacement() == Replacement::With {
        return Err(Error::InvalidSample(
            "random groups require a without-replacement draw".into(),
        ));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidSample("group sizes must be positive".into()));
    }
    let total: usize = sizes.iter().sum();
    if total != seq.len() {
        return Err(Error::LengthMismatch {
            what: "group sizes total",
            expected: seq.len(),
            found: total,
        });
    }
    let mut rest = seq.indices();
    let groups = sizes
        .iter()
        .map(|&s| {
            let (head, tail) = rest.split_at(s);
            rest = tail;
            head.to_vec()
        })
        .collect();
    Ok(GroupedSample { groups })
}
