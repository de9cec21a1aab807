use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Qubo, QuboBuilder, QuboError};
use crate::fixed::Milli;
use crate::graph::Graph;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsetTag {
    Lin2,
    Lin20,
}

impl fmt::Display for CsetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CsetTag::Lin2 => "lin2",
            CsetTag::Lin20 => "lin20",
        })
    }
}

impl FromStr for CsetTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lin2" => Ok(CsetTag::Lin2),
            "lin20" => Ok(CsetTag::Lin20),
            other => Err(format!("unknown coefficient set {other:?} (expected lin2 or lin20)")),
        }
    }
}

/// The discrete values random sub-QUBO coefficients are drawn from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub tag: CsetTag,
    pub values: Vec<Milli>,
}

impl CoefficientSet {
    /// `{-1, +1}`.
    pub fn lin2() -> Self {
        CoefficientSet { tag: CsetTag::Lin2, values: vec![Milli(-1000), Milli(1000)] }
    }

    /// The 20 nonzero multiples of 0.1 in `[-1, 1]`.
    pub fn lin20() -> Self {
        let values = (-10..=10).filter(|&k| k != 0).map(|k| Milli(k * 100)).collect();
        CoefficientSet { tag: CsetTag::Lin20, values }
    }

    pub fn from_tag(tag: CsetTag) -> Self {
        match tag {
            CsetTag::Lin2 => Self::lin2(),
            CsetTag::Lin20 => Self::lin20(),
        }
    }

    /// A custom value list under an existing tag, e.g. lin20 with zero included.
    pub fn with_values(tag: CsetTag, values: Vec<Milli>) -> Result<Self, QuboError> {
        if values.iter().all(|v| v.is_zero()) {
            return Err(QuboError::EmptyCoefficientSet);
        }
        Ok(CoefficientSet { tag, values })
    }

    fn draw(&self, rng: &mut impl Rng) -> Milli {
        self.values[rng.gen_range(0..self.values.len())]
    }
}

/// One independent uniform draw from `cset` per node (in id order), then per
/// edge (in canonical edge order). Offset is zero.
pub fn random_qubo(subgraph: &Graph, cset: &CoefficientSet, seed: u64) -> Qubo {
    let mut rng = seed::rng(seed);
    let mut b = QuboBuilder::new();
    b.add_variables(subgraph.nodes().iter().copied());
    for &v in subgraph.nodes() {
        b.add_linear(v, cset.draw(&mut rng));
    }
    for &(u, v) in subgraph.edges() {
        b.add_quadratic(u, v, cset.draw(&mut rng)).expect("graph edges join distinct nodes");
    }
    b.build()
}
