use super::{Graph, GraphError, NodeId};

/// Chimera graph with `m x n` cells of `K_{t,t}`.
///
/// Node `((i * n + j) * 2 + u) * t + k` is qubit `k` on shore `u` of cell
/// `(i, j)`. Shore 0 couples vertically to the cell below, shore 1
/// horizontally to the cell to the right.
pub fn chimera_graph(m: u32, n: u32, t: u32) -> Result<Graph, GraphError> {
    if m == 0 || n == 0 || t == 0 {
        return Err(GraphError::InvalidParameter(format!("chimera dimensions must be positive, got ({m},{n},{t})")));
    }
    let id = |i: u32, j: u32, u: u32, k: u32| -> NodeId { ((i * n + j) * 2 + u) * t + k };
    let mut edges = Vec::new();
    for i in 0..m {
        for j in 0..n {
            for k in 0..t {
                for k2 in 0..t {
                    edges.push((id(i, j, 0, k), id(i, j, 1, k2)));
                }
                if i + 1 < m {
                    edges.push((id(i, j, 0, k), id(i + 1, j, 0, k)));
                }
                if j + 1 < n {
                    edges.push((id(i, j, 1, k), id(i, j + 1, 1, k)));
                }
            }
        }
    }
    Graph::new(0..2 * t * m * n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let g = chimera_graph(1, 1, 4).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (8, 16));
        let g = chimera_graph(2, 2, 4).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (32, 80));
        let g = chimera_graph(1, 1, 1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn counts_match_closed_form() {
        for m in 1..=4u32 {
            for n in 1..=4u32 {
                for t in 1..=4u32 {
                    let g = chimera_graph(m, n, t).unwrap();
                    let nodes = 2 * t * m * n;
                    let edges = m * n * t * t + t * (m * (n - 1) + n * (m - 1));
                    assert_eq!(g.node_count(), nodes as usize, "({m},{n},{t})");
                    assert_eq!(g.edge_count(), edges as usize, "({m},{n},{t})");
                }
            }
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(chimera_graph(0, 1, 1), Err(GraphError::InvalidParameter(_))));
        assert!(matches!(chimera_graph(1, 1, 0), Err(GraphError::InvalidParameter(_))));
    }
}
