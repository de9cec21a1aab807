//! Exact fixed-point QUBO algebra.
//!
//! A [`Qubo`] is `offset + sum a_i x_i + sum_{i<j} a_ij x_i x_j` over an explicit
//! variable set, with every coefficient in [`Milli`]. Zero terms are never
//! stored. Construct through [`QuboBuilder`]; a built `Qubo` is immutable and
//! carries a CSR index ([`IndexedQubo`]) for O(degree) flip deltas.

mod assignment;
mod coefficients;
mod io;
mod ising;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fixed::Milli;
use crate::graph::NodeId;

pub use assignment::Assignment;
pub use coefficients::{random_qubo, CoefficientSet, CsetTag};
pub use io::{from_coo, to_coo, QuboDoc};
pub use ising::IsingModel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuboError {
    #[error("assignment has no value for variable {0}")]
    MissingVariable(NodeId),
    #[error("variable {0} is not part of the QUBO")]
    UnknownVariable(NodeId),
    #[error("quadratic term on a single variable {0}")]
    SelfPair(NodeId),
    #[error("random QUBOs overlap on variable {0}")]
    Overlap(NodeId),
    #[error("scaling coefficient must be positive, got {0}")]
    NonPositiveAlpha(Milli),
    #[error("term {term} scaled by {alpha} is not a whole number of thousandths")]
    InexactScaling { term: Milli, alpha: Milli },
    #[error("spin model does not map to whole thousandths: {0}")]
    InexactIsing(String),
    #[error("coefficient set must contain at least one nonzero value")]
    EmptyCoefficientSet,
    #[error("bitstring length {got} does not match {expected} variables")]
    BitstringLength { expected: usize, got: usize },
    #[error("bitstring contains {0:?}; only '0' and '1' allowed")]
    BitstringChar(char),
    #[error("format error: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Default)]
pub struct QuboBuilder {
    variables: BTreeSet<NodeId>,
    linear: BTreeMap<NodeId, Milli>,
    quadratic: BTreeMap<(NodeId, NodeId), Milli>,
    offset: Milli,
}

impl QuboBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, v: NodeId) -> &mut Self {
        self.variables.insert(v);
        self
    }

    pub fn add_variables(&mut self, vs: impl IntoIterator<Item = NodeId>) -> &mut Self {
        self.variables.extend(vs);
        self
    }

    pub fn add_linear(&mut self, v: NodeId, c: Milli) -> &mut Self {
        self.variables.insert(v);
        *self.linear.entry(v).or_default() += c;
        self
    }

    pub fn add_quadratic(&mut self, i: NodeId, j: NodeId, c: Milli) -> Result<&mut Self, QuboError> {
        if i == j {
            return Err(QuboError::SelfPair(i));
        }
        self.variables.insert(i);
        self.variables.insert(j);
        *self.quadratic.entry((i.min(j), i.max(j))).or_default() += c;
        Ok(self)
    }

    pub fn add_offset(&mut self, c: Milli) -> &mut Self {
        self.offset += c;
        self
    }

    /// Add every term of `q`, multiplied by `factor`, which must stay exact.
    pub fn add_scaled(&mut self, q: &Qubo, factor: Milli) -> Result<&mut Self, QuboError> {
        let scale = |term: Milli| term.scale_exact(factor).ok_or(QuboError::InexactScaling { term, alpha: factor });
        self.add_variables(q.variables().iter().copied());
        for (&v, &c) in &q.linear {
            self.add_linear(v, scale(c)?);
        }
        for (&(i, j), &c) in &q.quadratic {
            self.add_quadratic(i, j, scale(c)?)?;
        }
        self.add_offset(scale(q.offset)?);
        Ok(self)
    }

    pub fn build(&self) -> Qubo {
        let linear: BTreeMap<_, _> = self.linear.iter().filter(|(_, c)| !c.is_zero()).map(|(&k, &c)| (k, c)).collect();
        let quadratic: BTreeMap<_, _> =
            self.quadratic.iter().filter(|(_, c)| !c.is_zero()).map(|(&k, &c)| (k, c)).collect();
        let variables: Vec<NodeId> = self.variables.iter().copied().collect();
        let indexed = IndexedQubo::new(&variables, &linear, &quadratic, self.offset);
        Qubo { variables, linear, quadratic, offset: self.offset, indexed }
    }
}

#[derive(Debug, Clone)]
pub struct Qubo {
    variables: Vec<NodeId>,
    linear: BTreeMap<NodeId, Milli>,
    quadratic: BTreeMap<(NodeId, NodeId), Milli>,
    offset: Milli,
    indexed: IndexedQubo,
}

impl PartialEq for Qubo {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.linear == other.linear
            && self.quadratic == other.quadratic
            && self.offset == other.offset
    }
}

impl Eq for Qubo {}

impl Qubo {
    pub fn builder() -> QuboBuilder {
        QuboBuilder::new()
    }

    /// All-zero QUBO over `vars`.
    pub fn zero(vars: impl IntoIterator<Item = NodeId>) -> Qubo {
        let mut b = QuboBuilder::new();
        b.add_variables(vars);
        b.build()
    }

    /// Sorted variable ids; this is the canonical bit order.
    pub fn variables(&self) -> &[NodeId] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn linear(&self) -> &BTreeMap<NodeId, Milli> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(NodeId, NodeId), Milli> {
        &self.quadratic
    }

    pub fn offset(&self) -> Milli {
        self.offset
    }

    pub fn linear_of(&self, v: NodeId) -> Milli {
        self.linear.get(&v).copied().unwrap_or_default()
    }

    pub fn quadratic_of(&self, i: NodeId, j: NodeId) -> Milli {
        self.quadratic.get(&(i.min(j), i.max(j))).copied().unwrap_or_default()
    }

    pub fn has_terms(&self) -> bool {
        !self.linear.is_empty() || !self.quadratic.is_empty()
    }

    pub fn indexed(&self) -> &IndexedQubo {
        &self.indexed
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.variables.binary_search(&v).ok()
    }

    /// Builder pre-loaded with this QUBO's terms.
    pub fn to_builder(&self) -> QuboBuilder {
        QuboBuilder {
            variables: self.variables.iter().copied().collect(),
            linear: self.linear.clone(),
            quadratic: self.quadratic.clone(),
            offset: self.offset,
        }
    }

    /// Dense 0/1 state in canonical order.
    pub fn dense_state(&self, a: &Assignment) -> Result<Vec<u8>, QuboError> {
        self.variables.iter().map(|&v| a.get(v).map(u8::from).ok_or(QuboError::MissingVariable(v))).collect()
    }

    pub fn assignment_from_dense(&self, state: &[u8]) -> Assignment {
        Assignment::from_pairs(self.variables.iter().copied().zip(state.iter().map(|&b| b != 0)))
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Milli, QuboError> {
        let x = self.dense_state(a)?;
        Ok(Milli(self.indexed.energy(&x)))
    }

    /// `evaluate(flip(a, v)) - evaluate(a)`, from `v`'s incident terms only.
    pub fn delta_flip(&self, a: &Assignment, v: NodeId) -> Result<Milli, QuboError> {
        let p = self.position(v).ok_or(QuboError::UnknownVariable(v))?;
        let xv = a.get(v).ok_or(QuboError::MissingVariable(v))?;
        let mut field = self.indexed.linear[p];
        for (q, w) in self.indexed.neighbors(p) {
            let u = self.variables[q];
            if a.get(u).ok_or(QuboError::MissingVariable(u))? {
                field += w;
            }
        }
        Ok(Milli(if xv { -field } else { field }))
    }

    /// Sum of `randoms` (disjoint variable sets) plus `alpha * posiform`.
    pub fn glue(randoms: &[Qubo], posiform: &Qubo, alpha: Milli) -> Result<Qubo, QuboError> {
        if alpha.raw() <= 0 {
            return Err(QuboError::NonPositiveAlpha(alpha));
        }
        let mut seen = BTreeSet::new();
        let mut b = QuboBuilder::new();
        for r in randoms {
            for &v in r.variables() {
                if !seen.insert(v) {
                    return Err(QuboError::Overlap(v));
                }
            }
            b.add_scaled(r, Milli::ONE)?;
        }
        b.add_scaled(posiform, alpha)?;
        Ok(b.build())
    }
}

/// Position-indexed CSR view of a [`Qubo`] used by the solvers.
#[derive(Debug, Clone)]
pub struct IndexedQubo {
    pub linear: Vec<i64>,
    pub offset: i64,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<i64>,
}

impl IndexedQubo {
    fn new(
        vars: &[NodeId],
        linear: &BTreeMap<NodeId, Milli>,
        quadratic: &BTreeMap<(NodeId, NodeId), Milli>,
        offset: Milli,
    ) -> Self {
        let pos = |v: NodeId| vars.binary_search(&v).expect("term variable registered");
        let n = vars.len();
        let mut lin = vec![0i64; n];
        for (&v, &c) in linear {
            lin[pos(v)] = c.raw();
        }
        let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for (&(i, j), &c) in quadratic {
            let (pi, pj) = (pos(i), pos(j));
            rows[pi].push((pj, c.raw()));
            rows[pj].push((pi, c.raw()));
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        row_start.push(0);
        for mut r in rows {
            r.sort_unstable();
            for (c, w) in r {
                cols.push(c);
                weights.push(w);
            }
            row_start.push(cols.len());
        }
        IndexedQubo { linear: lin, offset: offset.raw(), row_start, cols, weights }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn degree(&self, p: usize) -> usize {
        self.row_start[p + 1] - self.row_start[p]
    }

    /// Neighbour positions and coupling weights of `p`, as parallel slices.
    pub fn row(&self, p: usize) -> (&[usize], &[i64]) {
        let r = self.row_start[p]..self.row_start[p + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    pub fn neighbors(&self, p: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let r = self.row_start[p]..self.row_start[p + 1];
        self.cols[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn energy(&self, x: &[u8]) -> i64 {
        let mut e = self.offset;
        for p in 0..self.len() {
            if x[p] == 0 {
                continue;
            }
            e += self.linear[p];
            for (q, w) in self.neighbors(p) {
                if q > p && x[q] != 0 {
                    e += w;
                }
            }
        }
        e
    }

    /// `a_p + sum_q a_pq x_q`: the energy change of setting `x_p` from 0 to 1.
    pub fn field(&self, x: &[u8], p: usize) -> i64 {
        self.linear[p] + self.neighbors(p).filter(|&(q, _)| x[q] != 0).map(|(_, w)| w).sum::<i64>()
    }

    pub fn delta(&self, x: &[u8], p: usize) -> i64 {
        let f = self.field(x, p);
        if x[p] == 0 {
            f
        } else {
            -f
        }
    }

    /// Upper bound on `|delta|` for flipping `p`: `|a_p| + sum_q |a_pq|`.
    pub fn flip_bound(&self, p: usize) -> i64 {
        self.linear[p].abs() + self.neighbors(p).map(|(_, w)| w.abs()).sum::<i64>()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn m(v: i64) -> Milli {
        Milli(v)
    }

    fn asg(pairs: &[(NodeId, u8)]) -> Assignment {
        Assignment::from_pairs(pairs.iter().map(|&(v, b)| (v, b != 0)))
    }

    /// Brute-force evaluation straight from the term maps.
    fn naive(q: &Qubo, a: &Assignment) -> i64 {
        let bit = |v| i64::from(a.get(v).unwrap());
        q.offset().raw()
            + q.linear().iter().map(|(&v, c)| c.raw() * bit(v)).sum::<i64>()
            + q.quadratic().iter().map(|(&(i, j), c)| c.raw() * bit(i) * bit(j)).sum::<i64>()
    }

    pub(crate) fn random_dense_qubo(n: u32, density: f64, seed: u64) -> Qubo {
        let mut rng = crate::seed::rng(seed);
        let mut b = QuboBuilder::new();
        b.add_variables(0..n);
        for i in 0..n {
            b.add_linear(i, m(rng.gen_range(-20..=20) * 100));
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    b.add_quadratic(i, j, m(rng.gen_range(-20..=20) * 100)).unwrap();
                }
            }
        }
        b.add_offset(m(rng.gen_range(-5000..5000)));
        b.build()
    }

    #[test]
    fn evaluate_examples() {
        let mut b = QuboBuilder::new();
        b.add_linear(1, m(-1000));
        let q = b.build();
        assert_eq!(q.evaluate(&asg(&[(1, 1)])), Ok(m(-1000)));

        let mut b = QuboBuilder::new();
        b.add_linear(1, m(1000)).add_linear(2, m(1000));
        b.add_quadratic(1, 2, m(-3000)).unwrap();
        let q = b.build();
        let energies: Vec<i64> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(x, y)| q.evaluate(&asg(&[(1, x), (2, y)])).unwrap().raw())
            .collect();
        assert_eq!(energies, vec![0, 1000, 1000, -1000]);

        let q = random_dense_qubo(6, 0.5, 3);
        let zeros = Assignment::from_pairs(q.variables().iter().map(|&v| (v, false)));
        assert_eq!(q.evaluate(&zeros), Ok(q.offset()));
    }

    #[test]
    fn missing_variable_rejected() {
        let mut b = QuboBuilder::new();
        b.add_quadratic(1, 2, m(5)).unwrap();
        let q = b.build();
        assert_eq!(q.evaluate(&asg(&[(1, 1)])), Err(QuboError::MissingVariable(2)));
        assert_eq!(q.delta_flip(&asg(&[(1, 1), (2, 0)]), 3), Err(QuboError::UnknownVariable(3)));
    }

    #[test]
    fn delta_examples() {
        let mut b = QuboBuilder::new();
        b.add_linear(1, m(-1000));
        assert_eq!(b.build().delta_flip(&asg(&[(1, 0)]), 1), Ok(m(-1000)));
        let mut b = QuboBuilder::new();
        b.add_quadratic(1, 2, m(500)).unwrap();
        assert_eq!(b.build().delta_flip(&asg(&[(1, 1), (2, 1)]), 2), Ok(m(-500)));
    }

    #[test]
    fn delta_matches_reevaluation_exhaustively() {
        let q = random_dense_qubo(20, 0.3, 11);
        let mut rng = crate::seed::rng(1);
        for _ in 0..50 {
            let a = Assignment::from_pairs(q.variables().iter().map(|&v| (v, rng.gen_bool(0.5))));
            let e = q.evaluate(&a).unwrap();
            for &v in q.variables() {
                let d = q.delta_flip(&a, v).unwrap();
                assert_eq!(q.evaluate(&a.flipped(v)).unwrap(), e + d);
            }
        }
    }

    #[test]
    fn zero_terms_dropped() {
        let mut b = QuboBuilder::new();
        b.add_linear(1, m(100)).add_linear(1, m(-100));
        b.add_quadratic(1, 2, m(7)).unwrap().add_quadratic(2, 1, m(-7)).unwrap();
        let q = b.build();
        assert!(q.linear().is_empty() && q.quadratic().is_empty());
        assert_eq!(q.variables(), &[1, 2]);
        assert_eq!(QuboBuilder::new().add_quadratic(3, 3, m(1)).err(), Some(QuboError::SelfPair(3)));
    }

    #[test]
    fn glue_examples() {
        let mut r = QuboBuilder::new();
        r.add_quadratic(1, 2, m(-1000)).unwrap();
        let mut p = QuboBuilder::new();
        p.add_linear(1, m(1000)).add_linear(2, m(-1000));
        let g = Qubo::glue(&[r.build()], &p.build(), m(100)).unwrap();
        assert_eq!(g.linear(), &BTreeMap::from([(1, m(100)), (2, m(-100))]));
        assert_eq!(g.quadratic(), &BTreeMap::from([((1, 2), m(-1000))]));

        let p = random_dense_qubo(5, 0.5, 2);
        assert_eq!(Qubo::glue(&[], &p, Milli::ONE).unwrap(), p);

        let mut r = QuboBuilder::new();
        r.add_linear(1, m(100));
        let mut p = QuboBuilder::new();
        p.add_linear(1, m(-1000));
        let g = Qubo::glue(&[r.build()], &p.build(), m(100)).unwrap();
        assert!(g.linear().is_empty());
        assert_eq!(g.variables(), &[1]);
    }

    #[test]
    fn glue_errors() {
        let a = Qubo::zero([1, 2]);
        let b = Qubo::zero([2, 3]);
        assert_eq!(Qubo::glue(&[a.clone(), b], &Qubo::zero([]), m(100)), Err(QuboError::Overlap(2)));
        assert_eq!(Qubo::glue(&[a.clone()], &a, m(0)), Err(QuboError::NonPositiveAlpha(m(0))));
        let mut p = QuboBuilder::new();
        p.add_linear(1, m(1));
        assert!(matches!(Qubo::glue(&[], &p.build(), m(100)), Err(QuboError::InexactScaling { .. })));
    }

    proptest! {
        #[test]
        fn indexed_energy_matches_naive(n in 1u32..14, seed: u64, bits: u32) {
            let q = random_dense_qubo(n, 0.4, seed);
            let a = Assignment::from_pairs((0..n).map(|v| (v, bits >> v & 1 == 1)));
            prop_assert_eq!(q.evaluate(&a).unwrap().raw(), naive(&q, &a));
            prop_assert_eq!(q.evaluate(&a).unwrap(), q.evaluate(&a).unwrap());
        }

        #[test]
        fn flip_identity(n in 1u32..16, seed: u64, bits: u32, v in 0u32..16) {
            let q = random_dense_qubo(n, 0.4, seed);
            let v = v % n;
            let a = Assignment::from_pairs((0..n).map(|u| (u, bits >> u & 1 == 1)));
            prop_assert_eq!(
                q.evaluate(&a.flipped(v)).unwrap(),
                q.evaluate(&a).unwrap() + q.delta_flip(&a, v).unwrap()
            );
        }

        #[test]
        fn glue_is_termwise_sum(seed: u64, bits: u32) {
            // Three disjoint random blocks over 0..12 and a posiform-like P with unit coefficients.
            let mut rng = crate::seed::rng(seed);
            let randoms: Vec<Qubo> = (0..3u32).map(|k| {
                let mut b = QuboBuilder::new();
                for v in 4 * k..4 * k + 4 {
                    b.add_linear(v, m(rng.gen_range(-10..=10) * 100));
                    if v + 1 < 4 * k + 4 {
                        b.add_quadratic(v, v + 1, m(rng.gen_range(-10..=10) * 100)).unwrap();
                    }
                }
                b.build()
            }).collect();
            let mut p = QuboBuilder::new();
            p.add_variables(0..12);
            for _ in 0..10 {
                let i = rng.gen_range(0..12);
                let j = rng.gen_range(0..12);
                if i != j {
                    p.add_quadratic(i, j, m(rng.gen_range(-1..=1) * 1000)).unwrap();
                }
                p.add_linear(i, m(rng.gen_range(-1..=1) * 1000));
            }
            p.add_offset(m(rng.gen_range(0..3) * 1000));
            let p = p.build();
            for alpha in [m(100), m(10), m(1000)] {
                let g = Qubo::glue(&randoms, &p, alpha).unwrap();
                let a = Assignment::from_pairs((0..12).map(|v| (v, bits >> v & 1 == 1)));
                let parts: i64 = randoms.iter()
                    .map(|r| r.evaluate(&a.restrict(r.variables())).unwrap().raw())
                    .sum();
                let scaled = p.evaluate(&a).unwrap().raw() * alpha.raw() / 1000;
                prop_assert_eq!(g.evaluate(&a).unwrap().raw(), parts + scaled);
            }
        }
    }
}
