use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kl_bisect, Graph, GraphError, NodeId};
use crate::seed::bisection_seed;

/// Disjoint cover of a graph's nodes produced by recursive bisection.
///
/// Parts are listed in bisection order (children of part `i` at depth `d`
/// sit at `2i` and `2i + 1` at depth `d + 1`); each part is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<Vec<NodeId>>,
    pub seed: u64,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size_range(&self) -> (usize, usize) {
        let sizes = self.parts.iter().map(Vec::len);
        (sizes.clone().min().unwrap_or(0), sizes.max().unwrap_or(0))
    }

    /// Check disjointness, coverage of `graph`, power-of-two count and size spread.
    pub fn validate(&self, graph: &Graph) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for p in &self.parts {
            for &n in p {
                if !seen.insert(n) {
                    return Err(format!("node {n} appears in more than one part"));
                }
            }
        }
        if !seen.iter().copied().eq(graph.nodes().iter().copied()) {
            return Err("parts do not cover the graph's node set exactly".into());
        }
        if !self.parts.len().is_power_of_two() {
            return Err(format!("part count {} is not a power of two", self.parts.len()));
        }
        let (lo, hi) = self.size_range();
        if hi - lo > 1 {
            return Err(format!("part sizes range over [{lo}, {hi}]"));
        }
        Ok(())
    }
}

/// Bisect every part together until no part exceeds `max_part_size`.
///
/// Each level doubles the part count, so sizes stay within one of each other.
pub fn recursive_bisection(graph: &Graph, max_part_size: usize, seed: u64) -> Result<Partition, GraphError> {
    if graph.is_empty() {
        return Err(GraphError::Empty);
    }
    if max_part_size == 0 {
        return Err(GraphError::InvalidParameter("max_part_size must be at least 1".into()));
    }
    let mut parts = vec![graph.nodes().to_vec()];
    let mut depth = 0u32;
    while parts.iter().any(|p| p.len() > max_part_size) {
        if parts.iter().any(|p| p.len() < 2) {
            return Err(GraphError::Unsplittable { max_part_size });
        }
        let halves = parts
            .par_iter()
            .enumerate()
            .map(|(i, p)| kl_bisect(graph, p, bisection_seed(seed, depth, i as u32)))
            .collect::<Result<Vec<_>, _>>()?;
        parts = halves.into_iter().flat_map(|(a, b)| [a, b]).collect();
        depth += 1;
    }
    Ok(Partition { parts, seed })
}
