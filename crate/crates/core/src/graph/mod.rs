//! Target graphs: representation, edge-list ingestion, Chimera construction
//! and the recursive Kernighan-Lin bisection that cuts a graph into the
//! disjoint regions carrying the random sub-QUBOs.

mod chimera;
mod edge_list;
mod kl;
mod partition;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use chimera::chimera_graph;
pub use edge_list::{load_edge_list, save_edge_list};
pub use kl::{cut_size, kl_bisect};
pub use partition::{recursive_bisection, Partition};

pub type NodeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on node {node}{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    SelfLoop { node: NodeId, line: Option<usize> },
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bisection needs at least 2 nodes, got {0}")]
    SubsetTooSmall(usize),
    #[error("graph is empty")]
    Empty,
    #[error("cannot reach part size {max_part_size}: a part of size 1 would have to be split")]
    Unsplittable { max_part_size: usize },
}

/// Undirected simple graph with canonical (ascending) node order.
///
/// Node order defines bitstring order everywhere downstream.
#[derive(Debug, Clone)]
pub struct Graph {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    index: HashMap<NodeId, usize>,
    adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Build a graph from explicit nodes plus edges. Edge endpoints must be
    /// listed in `nodes`; duplicate edges and nodes collapse.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        let mut canon = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { node: u, line: None });
            }
            for w in [u, v] {
                if !nodes.contains(&w) {
                    return Err(GraphError::UnknownNode(w));
                }
            }
            canon.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_canonical(nodes.into_iter().collect(), canon.into_iter().collect()))
    }

    /// Build a graph whose node set is exactly the edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self, GraphError> {
        let edges: Vec<_> = edges.into_iter().collect();
        let nodes: BTreeSet<NodeId> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        Self::new(nodes, edges)
    }

    pub fn empty() -> Self {
        Self::from_canonical(Vec::new(), Vec::new())
    }

    fn from_canonical(nodes: Vec<NodeId>, edges: Vec<(NodeId, NodeId)>) -> Self {
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); nodes.len()];
        for &(u, v) in &edges {
            let (iu, iv) = (index[&u], index[&v]);
            adj[iu].push(iv);
            adj[iv].push(iu);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { nodes, edges, index, adj }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    /// Position of `id` in canonical node order.
    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn degree(&self, id: NodeId) -> Option<usize> {
        self.position(id).map(|p| self.adj[p].len())
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let slice: &[usize] = match self.position(id) {
            Some(p) => &self.adj[p],
            None => &[],
        };
        slice.iter().map(move |&q| self.nodes[q])
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        match (self.position(u), self.position(v)) {
            (Some(pu), Some(pv)) => self.adj[pu].binary_search(&pv).is_ok(),
            _ => false,
        }
    }

    pub fn isolated_nodes(&self) -> Vec<NodeId> {
        self.nodes.iter().zip(&self.adj).filter(|(_, a)| a.is_empty()).map(|(&n, _)| n).collect()
    }

    /// Subgraph on `nodes` keeping every edge with both endpoints inside.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<Graph, GraphError> {
        let mut keep = vec![false; self.nodes.len()];
        for &n in nodes {
            let p = self.position(n).ok_or(GraphError::UnknownNode(n))?;
            keep[p] = true;
        }
        let sub_nodes: Vec<NodeId> = self.nodes.iter().zip(&keep).filter(|(_, &k)| k).map(|(&n, _)| n).collect();
        let sub_edges: Vec<(NodeId, NodeId)> =
            self.edges.iter().filter(|(u, v)| keep[self.index[u]] && keep[self.index[v]]).copied().collect();
        Ok(Self::from_canonical(sub_nodes, sub_edges))
    }

    pub(crate) fn adjacency_positions(&self, pos: usize) -> &[usize] {
        &self.adj[pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges([(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn canonicalizes_edges() {
        let g = Graph::from_edges([(3, 1), (1, 3), (2, 1)]).unwrap();
        assert_eq!(g.nodes(), &[1, 2, 3]);
        assert_eq!(g.edges(), &[(1, 2), (1, 3)]);
        assert_eq!(g.degree(1), Some(2));
        assert!(g.has_edge(3, 1));
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn rejects_self_loops_and_unknown_endpoints() {
        assert!(matches!(Graph::from_edges([(4, 4)]), Err(GraphError::SelfLoop { node: 4, .. })));
        assert_eq!(Graph::new([0, 1], [(0, 2)]), Err(GraphError::UnknownNode(2)));
    }

    #[test]
    fn induced_subgraph_edges() {
        let t = triangle();
        assert_eq!(t.induced_subgraph(&[0, 1]).unwrap().edge_count(), 1);
        let e = t.induced_subgraph(&[]).unwrap();
        assert!(e.is_empty() && e.edge_count() == 0);
        assert_eq!(t.induced_subgraph(&[0, 9]), Err(GraphError::UnknownNode(9)));
    }

    #[test]
    fn induced_chimera_cell() {
        let g = chimera_graph(2, 2, 4).unwrap();
        let cell: Vec<NodeId> = (0..8).collect();
        let sub = g.induced_subgraph(&cell).unwrap();
        assert_eq!(sub.node_count(), 8);
        assert_eq!(sub.edge_count(), 16);
    }

    #[test]
    fn isolated_nodes_listed() {
        let g = Graph::new([0, 1, 2, 7], [(0, 1)]).unwrap();
        assert_eq!(g.isolated_nodes(), vec![2, 7]);
    }
}
