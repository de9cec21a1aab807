//! Posiform planting and the end-to-end instance generator.

mod instance;
mod verify;

use rand::Rng;
use thiserror::Error;

use crate::exact::ExactError;
use crate::graph::{Graph, GraphError, NodeId};
use crate::qubo::{Assignment, QuboError};
use crate::seed;
use crate::twosat::{Clause, Literal, TwoSatError, TwoSatFormula};

pub use instance::{
    build_planted_instance, Certification, FormulaStats, GeneratorConfig, PartRecord, PlantedInstance, SeedTree,
    DEFAULT_SUB_SOLVER_LIMIT,
};
pub use verify::{flip_scan, verify_brute_force, verify_flip_scan, VerificationReport, VerifyMode};

#[derive(Debug, Error)]
pub enum PlantingError {
    #[error("target has no value for node {0}")]
    MissingTarget(NodeId),
    #[error("node {0} has no incident edge and unit clauses are disabled")]
    IsolatedNode(NodeId),
    #[error("{0} must be positive")]
    InvalidParameter(&'static str),
    #[error("uniqueness not reached after {clauses} edge clauses ({reason}); unpinned variables: {unpinned:?}")]
    NotUnique { clauses: usize, reason: &'static str, unpinned: Vec<NodeId> },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    TwoSat(#[from] TwoSatError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("instance document: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantingOptions {
    pub batch_size: usize,
    /// Cap on distinct edge clauses; unit clauses for isolated nodes are not counted.
    pub max_clauses: usize,
    /// Pin degree-0 nodes with a unit clause; when false they are an error.
    pub unit_clauses: bool,
}

impl PlantingOptions {
    /// `batch_size = max(32, ceil(n / 10))`, `max_clauses = 10 |E|`, unit clauses on.
    pub fn defaults_for(graph: &Graph) -> Self {
        PlantingOptions {
            batch_size: default_batch_size(graph.node_count()),
            max_clauses: 10 * graph.edge_count(),
            unit_clauses: true,
        }
    }
}

pub fn default_batch_size(nodes: usize) -> usize {
    32.max(nodes.div_ceil(10))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedFormula {
    pub formula: TwoSatFormula,
    pub batches: usize,
    pub unit_clauses: usize,
}

/// Draw an edge uniformly, then one of the three polarity patterns on it that
/// `target` satisfies.
pub fn sample_clause(graph: &Graph, target: &Assignment, rng: &mut impl Rng) -> Clause {
    let edges = graph.edges();
    assert!(!edges.is_empty(), "sample_clause needs at least one edge");
    let (i, j) = edges[rng.gen_range(0..edges.len())];
    let ti = target.get(i).expect("target covers the graph");
    let tj = target.get(j).expect("target covers the graph");
    // A pattern (pi, pj) is violated iff both literals are false: pi == !ti and pj == !tj.
    let legal: Vec<(bool, bool)> = [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .filter(|&(pi, pj)| !(pi != ti && pj != tj))
        .collect();
    let (pi, pj) = legal[rng.gen_range(0..legal.len())];
    Clause::Binary(Literal { var: i, positive: pi }, Literal { var: j, positive: pj })
}

/// Plant `target` with default unit-clause handling.
pub fn plant_posiform(
    graph: &Graph,
    target: &Assignment,
    batch_size: usize,
    max_clauses: usize,
    seed: u64,
) -> Result<PlantedFormula, PlantingError> {
    let opts = PlantingOptions { batch_size, max_clauses, unit_clauses: true };
    plant_posiform_with(graph, target, &opts, seed)
}

/// Grow a 2-SAT formula on `graph`'s edges, `batch_size` new clauses at a
/// time, until `target` is its only satisfying assignment.
///
/// Once a variable is pinned (its complement forces a contradiction) it stays
/// pinned as clauses are added, so each batch only re-probes the variables
/// still free after the previous one.
pub fn plant_posiform_with(
    graph: &Graph,
    target: &Assignment,
    opts: &PlantingOptions,
    seed: u64,
) -> Result<PlantedFormula, PlantingError> {
    if opts.batch_size == 0 {
        return Err(PlantingError::InvalidParameter("batch_size"));
    }
    for &v in graph.nodes() {
        target.get(v).ok_or(PlantingError::MissingTarget(v))?;
    }
    let mut formula = TwoSatFormula::new(graph.nodes().iter().copied());
    let isolated = graph.isolated_nodes();
    if let (false, Some(&v)) = (opts.unit_clauses, isolated.first()) {
        return Err(PlantingError::IsolatedNode(v));
    }
    for &v in &isolated {
        formula.add_clause(Clause::Unit(Literal::satisfied_by_value(v, target.get(v).unwrap())))?;
    }
    let unit_clauses = isolated.len();
    let saturated_at = 3 * graph.edge_count();
    let mut rng = seed::rng(seed);
    let mut candidates: Vec<NodeId> = graph.nodes().to_vec();
    let mut batches = 0;
    loop {
        candidates = formula.unpinned_variables(target, &candidates)?.expect("target satisfies every planted clause");
        if candidates.is_empty() {
            return Ok(PlantedFormula { formula, batches, unit_clauses });
        }
        let edge_clauses = formula.len() - unit_clauses;
        let reason = if edge_clauses >= saturated_at {
            Some("every satisfied pattern on every edge is present")
        } else if edge_clauses >= opts.max_clauses {
            Some("max_clauses reached")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(PlantingError::NotUnique { clauses: edge_clauses, reason, unpinned: candidates });
        }
        let goal = (edge_clauses + opts.batch_size).min(opts.max_clauses).min(saturated_at);
        while formula.len() - unit_clauses < goal {
            formula.add_clause(sample_clause(graph, target, &mut rng))?;
        }
        batches += 1;
        log::debug!("planting batch {batches}: {} clauses, {} unpinned", formula.len(), candidates.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;
    use crate::graph::chimera_graph;
    use crate::twosat::formula_to_posiform_qubo;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};
    use std::collections::BTreeMap;

    fn path(n: u32) -> Graph {
        Graph::from_edges((0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn random_target(g: &Graph, seed: u64) -> Assignment {
        let mut rng = seed::rng(seed);
        Assignment::from_pairs(g.nodes().iter().map(|&v| (v, rng.gen_bool(0.5))))
    }

    #[test]
    fn single_edge_needs_all_three_patterns() {
        let g = Graph::from_edges([(1, 2)]).unwrap();
        let t = Assignment::from_pairs([(1, true), (2, true)]);
        let out = plant_posiform(&g, &t, 1, 10, 3).unwrap();
        assert_eq!(out.formula.len(), 3);
        assert!(out.formula.is_unique_solution(&t).unwrap());
        assert_eq!(out.batches, 3);
    }

    #[test]
    fn never_emits_violated_pattern() {
        let g = Graph::from_edges([(1, 2)]).unwrap();
        let mut rng = seed::rng(1);
        for (t1, t2, banned) in [(true, true, (false, false)), (false, true, (true, false))] {
            let t = Assignment::from_pairs([(1, t1), (2, t2)]);
            for _ in 0..2000 {
                let c = sample_clause(&g, &t, &mut rng);
                let Clause::Binary(a, b) = c else { panic!("unit from edge sampler") };
                assert_ne!((a.positive, b.positive), banned);
                assert!(c.satisfied_by(&t).unwrap());
            }
        }
    }

    #[test]
    fn pattern_frequencies() {
        let g = Graph::from_edges([(1, 2)]).unwrap();
        let t = Assignment::from_pairs([(1, false), (2, true)]);
        let mut rng = seed::rng(99);
        let mut counts = BTreeMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            *counts.entry(sample_clause(&g, &t, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        for (c, n) in counts {
            let f = n as f64 / draws as f64;
            assert!((f - 1.0 / 3.0).abs() <= 0.02, "{c:?}: {f}");
        }
    }

    #[test]
    fn path_graphs_terminate() {
        let g = path(8);
        for s in 0..50 {
            let t = random_target(&g, s);
            let opts = PlantingOptions::defaults_for(&g);
            let out = plant_posiform_with(&g, &t, &PlantingOptions { batch_size: 2, ..opts }, s).unwrap();
            assert!(out.formula.len() < 10 * g.edge_count());
            assert!(out.formula.is_unique_solution(&t).unwrap());
        }
    }

    #[test]
    fn isolated_nodes() {
        let g = Graph::new([0, 1, 2, 5], [(0, 1), (1, 2)]).unwrap();
        let t = Assignment::from_pairs([(0, true), (1, false), (2, true), (5, false)]);
        let out = plant_posiform(&g, &t, 4, 100, 7).unwrap();
        assert_eq!(out.unit_clauses, 1);
        assert!(out.formula.contains(&Clause::Unit(Literal::neg(5))));
        assert!(out.formula.is_unique_solution(&t).unwrap());

        let opts = PlantingOptions { batch_size: 4, max_clauses: 100, unit_clauses: false };
        assert!(matches!(plant_posiform_with(&g, &t, &opts, 7), Err(PlantingError::IsolatedNode(5))));

        let lonely = Graph::new([3], []).unwrap();
        let t = Assignment::from_pairs([(3, true)]);
        assert_eq!(plant_posiform(&lonely, &t, 1, 0, 0).unwrap().formula.len(), 1);
    }

    #[test]
    fn explicit_failure_names_unpinned() {
        let g = path(6);
        let t = random_target(&g, 4);
        match plant_posiform(&g, &t, 1, 1, 0) {
            Err(PlantingError::NotUnique { clauses: 1, unpinned, .. }) => {
                assert!(!unpinned.is_empty());
                assert!(unpinned.iter().all(|v| g.contains_node(*v)));
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(matches!(plant_posiform(&g, &t, 0, 10, 0), Err(PlantingError::InvalidParameter(_))));
        assert!(matches!(plant_posiform(&g, &Assignment::new(), 1, 10, 0), Err(PlantingError::MissingTarget(0))));
    }

    #[test]
    fn posiform_has_single_zero() {
        let g = chimera_graph(1, 2, 3).unwrap();
        for s in 0..10 {
            let t = random_target(&g, 100 + s);
            let out = plant_posiform(&g, &t, 8, 10 * g.edge_count(), s).unwrap();
            let p = formula_to_posiform_qubo(&out.formula);
            let r = brute_force(&p, true).unwrap();
            assert_eq!(r.optimum_energy.raw(), 0);
            assert_eq!(r.ground_state_count, Some(1));
            assert_eq!(r.optima[0], t);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn planted_clauses_live_on_edges(seed: u64, m in 2u32..4, batch in 1usize..40) {
            let g = chimera_graph(1, m, 2).unwrap();
            let t = random_target(&g, seed);
            let out = plant_posiform(&g, &t, batch, 10 * g.edge_count(), seed).unwrap();
            prop_assert!(out.formula.is_unique_solution(&t).unwrap());
            for c in out.formula.clauses() {
                prop_assert!(c.satisfied_by(&t).unwrap());
                if let Clause::Binary(a, b) = c {
                    prop_assert!(g.has_edge(a.var, b.var));
                }
            }
        }
    }
}
