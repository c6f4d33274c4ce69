//! Finite populations and the two transformations used to reduce complex
//! designs to simple random sampling: PPS extension and network flattening.
//!
//! Unit indices are zero-based throughout the crate.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A finite population of real unit values `Y_1..Y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    values: Vec<f64>,
}

impl Population {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPopulation(
                "population must contain at least one unit".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPopulation(format!("value of unit {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a population holds at least one unit.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, unit: usize) -> f64 {
        self.values[unit]
    }

    /// Population total `t_Y`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Population mean `Ȳ`.
    pub fn mean(&self) -> f64 {
        self.total() / self.len() as f64
    }

    /// Sum of squared deviations from the mean.
    pub fn sum_squared_deviations(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|y| (y - mean) * (y - mean)).sum()
    }

    /// Population variance with divisor `N` (σ²).
    pub fn variance(&self) -> f64 {
        self.sum_squared_deviations() / self.len() as f64
    }

    /// Population variance with divisor `N - 1` (S²). Zero for a single unit.
    pub fn s_squared(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        self.sum_squared_deviations() / (self.len() - 1) as f64
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&y| y == self.values[0])
    }
}

/// A population of `N` units classified into `K` subgroups of sizes `N_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedPopulation {
    sizes: Vec<u64>,
}

impl ClassifiedPopulation {
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPopulation("at least one subgroup is required".into()));
        }
        if let Some(k) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPopulation(format!("subgroup {k} is empty")));
        }
        if sizes.iter().try_fold(0u64, |acc, &s| acc.checked_add(s)).is_none() {
            return Err(Error::InvalidPopulation("subgroup sizes overflow".into()));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn classes(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Class proportions `N_k / N`.
    pub fn proportions(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.sizes.iter().map(|&s| s as f64 / total).collect()
    }

    /// Class label of each unit when units are laid out class by class.
    pub fn unit_labels(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s as usize))
            .collect()
    }
}

/// Positive integer size measures `M_i` driving PPS selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeWeights {
    sizes: Vec<u64>,
    // cumulative[i] = M_0 + ... + M_i
    cumulative: Vec<u64>,
}

impl SizeWeights {
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPopulation("size weights must not be empty".into()));
        }
        let mut cumulative = Vec::with_capacity(sizes.len());
        let mut acc = 0u64;
        for (unit, &m) in sizes.iter().enumerate() {
            if m == 0 {
                return Err(Error::InvalidWeight { unit });
            }
            acc = acc
                .checked_add(m)
                .ok_or_else(|| Error::InvalidPopulation("size weights overflow".into()))?;
            cumulative.push(acc);
        }
        Ok(Self { sizes, cumulative })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// `t_M`, the size of the extended population.
    pub fn total(&self) -> u64 {
        *self.cumulative.last().expect("non-empty weights")
    }

    /// Single-draw selection probability `Z_i = M_i / t_M`.
    pub fn probability(&self, unit: usize) -> f64 {
        self.sizes[unit] as f64 / self.total() as f64
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.probability(i)).collect()
    }

    /// Expanded value `y / Z_i`, computed as `y · t_M / M_i`.
    pub fn expand(&self, unit: usize, y: f64) -> f64 {
        y * self.total() as f64 / self.sizes[unit] as f64
    }

    /// Original unit owning a position `0..t_M` of the extended population.
    pub fn unit_at(&self, position: u64) -> usize {
        debug_assert!(position < self.total());
        self.cumulative.partition_point(|&c| c <= position)
    }

    pub(crate) fn check_matches(&self, pop: &Population) -> Result<()> {
        if self.len() != pop.len() {
            return Err(Error::LengthMismatch {
                what: "size weights",
                expected: pop.len(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// Symmetric neighbour relation between units, without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    pub fn new(mut neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let n = neighbors.len();
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&j) = list.iter().find(|&&j| j >= n) {
                return Err(Error::InvalidAdjacency(format!(
                    "unit {i} lists neighbour {j} outside 0..{n}"
                )));
            }
            if list.binary_search(&i).is_ok() {
                return Err(Error::InvalidAdjacency(format!("unit {i} is its own neighbour")));
            }
        }
        for (i, list) in neighbors.iter().enumerate() {
            for &j in list {
                if neighbors[j].binary_search(&i).is_err() {
                    return Err(Error::InvalidAdjacency(format!(
                        "relation is not symmetric: {j} is a neighbour of {i} but not vice versa"
                    )));
                }
            }
        }
        Ok(Self { neighbors })
    }

    /// Builds the relation from undirected edges.
    pub fn from_edges(units: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); units];
        for &(a, b) in edges {
            if a >= units || b >= units {
                return Err(Error::InvalidAdjacency(format!("edge ({a}, {b}) outside 0..{units}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        Self::new(neighbors)
    }

    /// Units `0 - 1 - ... - (units-1)` on a line.
    pub fn path(units: usize) -> Self {
        let edges: Vec<_> = (1..units).map(|i| (i - 1, i)).collect();
        Self::from_edges(units, &edges).expect("path graph is valid")
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, unit: usize) -> &[usize] {
        &self.neighbors[unit]
    }
}

/// A partition of the population's units into networks, with per-network
/// sizes and means.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPartition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    means: Vec<f64>,
}

impl NetworkPartition {
    /// Builds a partition from a unit → network label map. Labels are
    /// arbitrary; they are renumbered `0..K` in order of first appearance.
    pub fn from_assignment(pop: &Population, labels: &[usize]) -> Result<Self> {
        if labels.len() != pop.len() {
            return Err(Error::LengthMismatch {
                what: "network assignment",
                expected: pop.len(),
                found: labels.len(),
            });
        }
        let mut relabel = std::collections::HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|&l| {
                let next = relabel.len();
                *relabel.entry(l).or_insert(next)
            })
            .collect();
        let networks = relabel.len();
        let mut sizes = vec![0usize; networks];
        let mut sums = vec![0.0f64; networks];
        for (unit, &k) in assignment.iter().enumerate() {
            sizes[k] += 1;
            sums[k] += pop.value(unit);
        }
        let means = sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).collect();
        Ok(Self {
            assignment,
            sizes,
            means,
        })
    }

    /// Every unit in its own network.
    pub fn singletons(pop: &Population) -> Self {
        let labels: Vec<usize> = (0..pop.len()).collect();
        Self::from_assignment(pop, &labels).expect("identity labels are valid")
    }

    pub fn units(&self) -> usize {
        self.assignment.len()
    }

    pub fn networks(&self) -> usize {
        self.sizes.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn network_of(&self, unit: usize) -> usize {
        self.assignment[unit]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Network means `Ȳ⁽ᵏ⁾`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Units of network `k`, ascending.
    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.units()).filter(|&i| self.assignment[i] == k).collect()
    }

    /// Mean of the network containing `unit`.
    pub fn network_mean_of(&self, unit: usize) -> f64 {
        self.means[self.assignment[unit]]
    }

    pub(crate) fn check_matches(&self, pop: &Population) -> Result<()> {
        if self.units() != pop.len() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} units but the population has {}",
                self.units(),
                pop.len()
            )));
        }
        let mut sums = vec![0.0; self.networks()];
        for (unit, &k) in self.assignment.iter().enumerate() {
            sums[k] += pop.value(unit);
        }
        for (k, (sum, &size)) in sums.iter().zip(&self.sizes).enumerate() {
            let mean = sum / size as f64;
            if (mean - self.means[k]).abs() > 1e-12 * mean.abs().max(1.0) {
                return Err(Error::InvalidPartition(format!(
                    "network {k} mean {} does not match the population ({mean})",
                    self.means[k]
                )));
            }
        }
        Ok(())
    }
}

/// Builds the extended population of size `t_M` in which unit `i` appears
/// `M_i` times with value `Y_i / Z_i`. Its mean is the original total `t_Y`.
pub fn extend_pps(pop: &Population, weights: &SizeWeights) -> Result<Population> {
    weights.check_matches(pop)?;
    let mut values = Vec::with_capacity(weights.total() as usize);
    for (unit, &m) in weights.sizes().iter().enumerate() {
        let expanded = weights.expand(unit, pop.value(unit));
        values.extend(std::iter::repeat_n(expanded, m as usize));
    }
    Population::new(values)
}

/// Groups units satisfying `y > threshold` into networks (connected components
/// of the induced subgraph); every other unit is a singleton network.
pub fn compute_networks(pop: &Population, adjacency: &Adjacency, threshold: f64) -> Result<NetworkPartition> {
    if adjacency.len() != pop.len() {
        return Err(Error::LengthMismatch {
            what: "adjacency",
            expected: pop.len(),
            found: adjacency.len(),
        });
    }
    let satisfies = |i: usize| pop.value(i) > threshold;
    let mut labels = vec![usize::MAX; pop.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..pop.len() {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = next;
        if satisfies(start) {
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                for &j in adjacency.neighbors(i) {
                    if labels[j] == usize::MAX && satisfies(j) {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        next += 1;
    }
    NetworkPartition::from_assignment(pop, &labels)
}

/// Replaces each unit's value by the mean of its network.
pub fn flatten_networks(pop: &Population, partition: &NetworkPartition) -> Result<Population> {
    partition.check_matches(pop)?;
    let values = (0..pop.len()).map(|i| partition.network_mean_of(i)).collect();
    Population::new(values)
}
