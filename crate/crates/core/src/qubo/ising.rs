use std::collections::BTreeMap;

use super::{Qubo, QuboBuilder, QuboError};
use crate::fixed::Milli;
use crate::graph::NodeId;

/// Spin model `offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j`, `s in {-1, +1}`.
///
/// Coefficients are in quarter-milliunits (1/4000) so the `x = (1 + s) / 2`
/// substitution stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingModel {
    pub variables: Vec<NodeId>,
    pub h: BTreeMap<NodeId, i64>,
    pub j: BTreeMap<(NodeId, NodeId), i64>,
    pub offset: i64,
}

pub const QUARTERS_PER_MILLI: i64 = 4;

impl IsingModel {
    /// Energy in quarter-milliunits. `spin(v)` must be `true` for `+1`.
    pub fn energy(&self, spin: impl Fn(NodeId) -> bool) -> i64 {
        let s = |v| if spin(v) { 1 } else { -1 };
        self.offset
            + self.h.iter().map(|(&v, &h)| h * s(v)).sum::<i64>()
            + self.j.iter().map(|(&(a, b), &j)| j * s(a) * s(b)).sum::<i64>()
    }

    pub fn h_milli(&self, v: NodeId) -> f64 {
        self.h.get(&v).copied().unwrap_or(0) as f64 / QUARTERS_PER_MILLI as f64
    }

    pub fn j_milli(&self, a: NodeId, b: NodeId) -> f64 {
        self.j.get(&(a.min(b), a.max(b))).copied().unwrap_or(0) as f64 / QUARTERS_PER_MILLI as f64
    }

    pub fn offset_milli(&self) -> f64 {
        self.offset as f64 / QUARTERS_PER_MILLI as f64
    }
}

impl Qubo {
    pub fn to_ising(&self) -> IsingModel {
        let mut h: BTreeMap<NodeId, i64> = BTreeMap::new();
        let mut j = BTreeMap::new();
        let mut offset = 4 * self.offset().raw();
        for (&v, &a) in self.linear() {
            *h.entry(v).or_default() += 2 * a.raw();
            offset += 2 * a.raw();
        }
        for (&(u, v), &a) in self.quadratic() {
            let a = a.raw();
            j.insert((u, v), a);
            *h.entry(u).or_default() += a;
            *h.entry(v).or_default() += a;
            offset += a;
        }
        h.retain(|_, c| *c != 0);
        IsingModel { variables: self.variables().to_vec(), h, j, offset }
    }

    /// Inverse of [`Qubo::to_ising`]; fails when a coefficient is not a whole thousandth.
    pub fn from_ising(model: &IsingModel) -> Result<Qubo, QuboError> {
        let exact = |q: i64, what: String| {
            if q % QUARTERS_PER_MILLI == 0 {
                Ok(Milli(q / QUARTERS_PER_MILLI))
            } else {
                Err(QuboError::InexactIsing(what))
            }
        };
        let mut lin: BTreeMap<NodeId, i64> = model.h.iter().map(|(&v, &h)| (v, 2 * h)).collect();
        let mut offset = model.offset - model.h.values().sum::<i64>();
        let mut b = QuboBuilder::new();
        b.add_variables(model.variables.iter().copied());
        for (&(u, v), &jq) in &model.j {
            if u == v {
                return Err(QuboError::SelfPair(u));
            }
            b.add_quadratic(u, v, Milli(jq))?;
            *lin.entry(u).or_default() -= 2 * jq;
            *lin.entry(v).or_default() -= 2 * jq;
            offset += jq;
        }
        for (v, q) in lin {
            b.add_linear(v, exact(q, format!("linear term of {v}"))?);
        }
        b.add_offset(exact(offset, "offset".into())?);
        Ok(b.build())
    }
}
