//! Truncated random walks over the undirected view of a document network.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::corpus::DocumentNetwork;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Maximum number of nodes in a walk, root included.
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self { walks_per_node: 80, walk_length: 80, seed: 0 }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 {
            return Err(Error::InvalidConfig("walks_per_node must be at least 1"));
        }
        if self.walk_length == 0 {
            return Err(Error::InvalidConfig("walk_length must be at least 1"));
        }
        Ok(())
    }
}

/// Node sequences plus per-node occurrence counts.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    /// Ids for node indices.
    pub node_ids: Vec<String>,
    pub walks: Vec<Vec<usize>>,
    pub frequencies: Vec<u64>,
}

impl WalkCorpus {
    /// Builds a corpus from explicit walks, recounting frequencies.
    pub fn from_walks(node_ids: Vec<String>, walks: Vec<Vec<usize>>) -> Result<Self> {
        let mut frequencies = alloc::vec![0u64; node_ids.len()];
        for &v in walks.iter().flatten() {
            let slot = frequencies.get_mut(v).ok_or(Error::OutOfRange {
                requested: v + 1,
                available: node_ids.len(),
            })?;
            *slot += 1;
        }
        Ok(Self { node_ids, walks, frequencies })
    }

    pub fn total_occurrences(&self) -> u64 {
        self.frequencies.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.iter().all(Vec::is_empty)
    }

    /// `(id, f_i)` for every node, in index order.
    pub fn frequency_table(&self) -> FrequencyTable {
        FrequencyTable {
            entries: self
                .node_ids
                .iter()
                .cloned()
                .zip(self.frequencies.iter().copied())
                .collect(),
        }
    }

    /// The `m` most frequent nodes, descending; ties by ascending index.
    pub fn top_m_nodes(&self, m: usize) -> Result<Vec<usize>> {
        let positive = self.frequencies.iter().filter(|&&f| f > 0).count();
        if m == 0 || m > positive {
            return Err(Error::OutOfRange { requested: m, available: positive });
        }
        let mut order = rank_by_frequency(&self.frequencies);
        order.truncate(m);
        Ok(order)
    }
}

/// Indices sorted by descending frequency, ties by ascending index.
pub fn rank_by_frequency(frequencies: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..frequencies.len()).collect();
    order.sort_by(|&a, &b| frequencies[b].cmp(&frequencies[a]).then(a.cmp(&b)));
    order
}

/// Node occurrence counts keyed by id, in a fixed order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    pub entries: Vec<(String, u64)>,
}

/// Generates `walks_per_node` walks rooted at every node.
///
/// Walks are ordered by root index then walk ordinal, and each uses its own
/// RNG stream derived from `(seed, root, ordinal)`, so any partition of roots
/// across workers reproduces the same corpus.
pub fn generate_walks(net: &DocumentNetwork, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    if net.is_empty() {
        return Err(Error::Empty("network has no documents"));
    }
    let adjacency = net.undirected_neighbors();
    let roots: Vec<usize> = (0..net.len()).collect();
    let walks = walks_from_roots(&adjacency, &roots, cfg);
    WalkCorpus::from_walks(net.ids().to_vec(), walks)
}

/// Walks for a subset of roots, in canonical order.
pub fn walks_from_roots(adjacency: &[Vec<usize>], roots: &[usize], cfg: &WalkConfig) -> Vec<Vec<usize>> {
    let mut walks = Vec::with_capacity(roots.len() * cfg.walks_per_node);
    for &root in roots {
        for ordinal in 0..cfg.walks_per_node {
            let mut rng = rng::seeded(cfg.seed, &[root as u64, ordinal as u64]);
            walks.push(single_walk(adjacency, root, cfg.walk_length, &mut rng));
        }
    }
    walks
}

fn single_walk(adjacency: &[Vec<usize>], root: usize, length: usize, rng: &mut rng::Rng) -> Vec<usize> {
    let mut walk = Vec::with_capacity(length);
    walk.push(root);
    let mut current = root;
    while walk.len() < length {
        let neighbors = &adjacency[current];
        if neighbors.is_empty() {
            break;
        }
        current = neighbors[rng.random_range(0..neighbors.len())];
        walk.push(current);
    }
    walk
}
