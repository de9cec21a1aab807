use super::{Clause, Literal, TwoSatFormula};
use crate::qubo::Assignment;

/// Implication graph on `2n` literal nodes: node `2p` is `x_p`, `2p + 1` is `!x_p`,
/// with `p` the variable's position in the formula.
#[derive(Debug, Clone)]
pub struct ImplicationGraph {
    vars: Vec<crate::graph::NodeId>,
    start: Vec<usize>,
    targets: Vec<usize>,
}

impl ImplicationGraph {
    pub fn new(f: &TwoSatFormula) -> Self {
        let n_nodes = 2 * f.variables().len();
        let node = |l: Literal| 2 * f.position(l.var).expect("registered") + usize::from(!l.positive);
        let mut arcs = Vec::with_capacity(2 * f.len());
        for c in f.clauses() {
            match *c {
                Clause::Unit(a) => arcs.push((node(a) ^ 1, node(a))),
                Clause::Binary(a, b) => {
                    arcs.push((node(a) ^ 1, node(b)));
                    arcs.push((node(b) ^ 1, node(a)));
                }
            }
        }
        let mut start = vec![0usize; n_nodes + 1];
        for &(u, _) in &arcs {
            start[u + 1] += 1;
        }
        for i in 0..n_nodes {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut targets = vec![0usize; arcs.len()];
        for (u, v) in arcs {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        ImplicationGraph { vars: f.variables().to_vec(), start, targets }
    }

    fn node_of(&self, l: Literal) -> usize {
        2 * self.vars.binary_search(&l.var).expect("registered") + usize::from(!l.positive)
    }

    fn succ(&self, u: usize) -> &[usize] {
        &self.targets[self.start[u]..self.start[u + 1]]
    }

    /// Tarjan's algorithm, iterative. Components are numbered in completion
    /// order, which is a reverse topological order of the condensation.
    pub fn components(&self) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let n = self.start.len() - 1;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut comp = vec![UNSEEN; n];
        let mut stack = Vec::new();
        let mut call: Vec<(usize, usize)> = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            while let Some(&mut (u, ref mut edge)) = call.last_mut() {
                if let Some(&v) = self.succ(u).get(*edge) {
                    *edge += 1;
                    if index[v] == UNSEEN {
                        index[v] = next_index;
                        low[v] = next_index;
                        next_index += 1;
                        stack.push(v);
                        call.push((v, 0));
                    } else if comp[v] == UNSEEN {
                        low[u] = low[u].min(index[v]);
                    }
                } else {
                    call.pop();
                    if low[u] == index[u] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            comp[w] = next_comp;
                            if w == u {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[u]);
                    }
                }
            }
        }
        comp
    }

    /// Satisfying assignment, or `None` if some `x` and `!x` share a component.
    pub fn solve(&self) -> Option<Assignment> {
        let comp = self.components();
        let mut out = Assignment::new();
        for (p, &v) in self.vars.iter().enumerate() {
            let (pos, neg) = (comp[2 * p], comp[2 * p + 1]);
            if pos == neg {
                return None;
            }
            // The literal whose component completes first is later in topological order.
            out.set(v, pos < neg);
        }
        Some(out)
    }

    pub fn reachability(&self) -> Reachability {
        Reachability { mark: vec![0; self.start.len() - 1], stamp: 0, queue: Vec::new() }
    }
}

/// Reusable scratch space for repeated reachability queries.
pub struct Reachability {
    mark: Vec<u32>,
    stamp: u32,
    queue: Vec<usize>,
}

impl Reachability {
    /// Whether `to` is reachable from `from` along implications.
    pub fn reaches(&mut self, g: &ImplicationGraph, from: Literal, to: Literal) -> bool {
        let (s, t) = (g.node_of(from), g.node_of(to));
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.queue.clear();
        self.queue.push(s);
        self.mark[s] = self.stamp;
        while let Some(u) = self.queue.pop() {
            if u == t {
                return true;
            }
            for &v in g.succ(u) {
                if self.mark[v] != self.stamp {
                    self.mark[v] = self.stamp;
                    self.queue.push(v);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_implications() {
        // (!x1 | x2) & (!x2 | x3): x1 -> x2 -> x3.
        let mut f = TwoSatFormula::new([1, 2, 3]);
        f.add_clause(Clause::binary(Literal::neg(1), Literal::pos(2)).unwrap()).unwrap();
        f.add_clause(Clause::binary(Literal::neg(2), Literal::pos(3)).unwrap()).unwrap();
        let g = ImplicationGraph::new(&f);
        let mut r = g.reachability();
        assert!(r.reaches(&g, Literal::pos(1), Literal::pos(3)));
        assert!(r.reaches(&g, Literal::neg(3), Literal::neg(1)));
        assert!(!r.reaches(&g, Literal::pos(3), Literal::pos(1)));
        assert!(f.solve().is_some());
    }

    #[test]
    fn cycle_through_complement_is_unsat() {
        // x1 -> x2 -> !x1 and !x1 -> x1 via the unit clause.
        let mut f = TwoSatFormula::new([1, 2]);
        f.add_clause(Clause::binary(Literal::neg(1), Literal::pos(2)).unwrap()).unwrap();
        f.add_clause(Clause::binary(Literal::neg(2), Literal::neg(1)).unwrap()).unwrap();
        f.add_clause(Clause::Unit(Literal::pos(1))).unwrap();
        assert_eq!(f.solve(), None);
    }

    #[test]
    fn empty_formula_solves() {
        let f = TwoSatFormula::new([4, 5]);
        let a = f.solve().unwrap();
        assert_eq!(a.len(), 2);
        assert!(TwoSatFormula::new([]).solve().unwrap().is_empty());
    }
}
