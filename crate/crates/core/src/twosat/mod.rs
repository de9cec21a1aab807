//! 2-SAT formulas over graph nodes: implication-graph solving, per-variable
//! uniqueness certification, and compilation of clauses into posiform
//! penalties.

mod implication;
mod penalty;

use std::collections::HashSet;
use std::fmt::{self, Write};

use thiserror::Error;

use crate::graph::NodeId;
use crate::qubo::Assignment;

pub use implication::ImplicationGraph;
pub use penalty::{clause_to_penalty, formula_to_posiform_qubo};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwoSatError {
    #[error("literal on variable {0}, which is not in the formula")]
    UnknownVariable(NodeId),
    #[error("binary clause repeats variable {0}")]
    RepeatedVariable(NodeId),
    #[error("assignment has no value for variable {0}")]
    MissingValue(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: NodeId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: NodeId) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: NodeId) -> Self {
        Literal { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }

    /// The literal that is true when `var` takes `value`.
    pub fn satisfied_by_value(var: NodeId, value: bool) -> Self {
        Literal { var, positive: value }
    }

    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "!x{}", self.var)
        }
    }
}

/// A unit or two-literal disjunction. Binary clauses keep the lower variable first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    Unit(Literal),
    Binary(Literal, Literal),
}

impl Clause {
    pub fn binary(a: Literal, b: Literal) -> Result<Self, TwoSatError> {
        if a.var == b.var {
            return Err(TwoSatError::RepeatedVariable(a.var));
        }
        Ok(if a.var < b.var { Clause::Binary(a, b) } else { Clause::Binary(b, a) })
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> {
        let (a, b) = match *self {
            Clause::Unit(a) => (a, None),
            Clause::Binary(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn satisfied_by(&self, a: &Assignment) -> Result<bool, TwoSatError> {
        for lit in self.literals() {
            let v = a.get(lit.var).ok_or(TwoSatError::MissingValue(lit.var))?;
            if lit.eval(v) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TwoSatFormula {
    variables: Vec<NodeId>,
    clauses: Vec<Clause>,
    seen: HashSet<Clause>,
}

impl PartialEq for TwoSatFormula {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.clauses == other.clauses
    }
}

impl TwoSatFormula {
    pub fn new(variables: impl IntoIterator<Item = NodeId>) -> Self {
        let mut variables: Vec<NodeId> = variables.into_iter().collect();
        variables.sort_unstable();
        variables.dedup();
        TwoSatFormula { variables, ..Default::default() }
    }

    /// Append `clause`; returns `false` (and changes nothing) for an exact duplicate.
    pub fn add_clause(&mut self, clause: Clause) -> Result<bool, TwoSatError> {
        if let Clause::Binary(a, b) = clause {
            if a.var == b.var {
                return Err(TwoSatError::RepeatedVariable(a.var));
            }
        }
        let clause = match clause {
            Clause::Binary(a, b) => Clause::binary(a, b)?,
            c => c,
        };
        for lit in clause.literals() {
            if self.position(lit.var).is_none() {
                return Err(TwoSatError::UnknownVariable(lit.var));
            }
        }
        if !self.seen.insert(clause) {
            return Ok(false);
        }
        self.clauses.push(clause);
        Ok(true)
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.seen.contains(clause)
    }

    pub fn variables(&self) -> &[NodeId] {
        &self.variables
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.variables.binary_search(&v).ok()
    }

    pub fn violated_count(&self, a: &Assignment) -> Result<usize, TwoSatError> {
        let mut n = 0;
        for c in &self.clauses {
            if !c.satisfied_by(a)? {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn satisfied_by(&self, a: &Assignment) -> Result<bool, TwoSatError> {
        Ok(self.violated_count(a)? == 0)
    }

    /// A satisfying assignment, or `None` when unsatisfiable.
    pub fn solve(&self) -> Option<Assignment> {
        ImplicationGraph::new(self).solve()
    }

    /// True iff `target` satisfies the formula and no other assignment does:
    /// for every variable, forcing it to the opposite value is unsatisfiable.
    pub fn is_unique_solution(&self, target: &Assignment) -> Result<bool, TwoSatError> {
        Ok(self.unpinned_variables(target, self.variables())?.map(|u| u.is_empty()).unwrap_or(false))
    }

    /// Among `candidates`, the variables that some other satisfying assignment
    /// sets differently from `target`. `None` when `target` is not a solution.
    ///
    /// Since `target` satisfies the formula, adding the unit clause `l` keeps it
    /// satisfiable iff `l` does not imply `!l`; each probe is one reachability
    /// query on the implication graph.
    pub fn unpinned_variables(
        &self,
        target: &Assignment,
        candidates: &[NodeId],
    ) -> Result<Option<Vec<NodeId>>, TwoSatError> {
        for &v in &self.variables {
            target.get(v).ok_or(TwoSatError::MissingValue(v))?;
        }
        if !self.satisfied_by(target)? {
            return Ok(None);
        }
        let graph = ImplicationGraph::new(self);
        let mut probe = graph.reachability();
        let mut out = Vec::new();
        for &v in candidates {
            let val = target.get(v).ok_or(TwoSatError::MissingValue(v))?;
            let wrong = Literal::satisfied_by_value(v, !val);
            if !probe.reaches(&graph, wrong, wrong.negated()) {
                out.push(v);
            }
        }
        Ok(Some(out))
    }

    /// DIMACS CNF dump; variable `k` is the `k`-th node in ascending order,
    /// listed in leading comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.variables.iter().enumerate() {
            writeln!(out, "c var {} node {}", k + 1, v).unwrap();
        }
        writeln!(out, "p cnf {} {}", self.variables.len(), self.clauses.len()).unwrap();
        for c in &self.clauses {
            for lit in c.literals() {
                let k = self.position(lit.var).expect("clause variables registered") as i64 + 1;
                write!(out, "{} ", if lit.positive { k } else { -k }).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}
