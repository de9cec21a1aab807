use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Graph, GraphError, NodeId};

/// Parse a whitespace-separated edge list.
///
/// Each non-blank line outside `#` comments is `u v`. A line holding a single
/// id declares a node without edges (dead couplers can isolate a qubit).
pub fn load_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |tok: &str| -> Result<NodeId, GraphError> {
            tok.parse::<NodeId>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("expected a non-negative integer node id, got {tok:?}"),
            })
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [u] => {
                nodes.insert(parse(u)?);
            }
            [u, v] => {
                let (u, v) = (parse(u)?, parse(v)?);
                if u == v {
                    return Err(GraphError::SelfLoop { node: u, line: Some(line_no) });
                }
                nodes.insert(u);
                nodes.insert(v);
                edges.push((u, v));
            }
            _ => return Err(GraphError::Parse { line: line_no, message: format!("expected \"u v\", got {line:?}") }),
        }
    }
    Graph::new(nodes, edges)
}

/// Canonical edge list: sorted `min max` pairs, then isolated nodes as single ids.
pub fn save_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    for &(u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    for n in graph.isolated_nodes() {
        writeln!(out, "{n}").unwrap();
    }
    out
}
