//! Exact minimization: exhaustive Gray-code enumeration (the oracle) and a
//! depth-first branch and bound for sub-QUBOs too large to enumerate.

mod bnb;
mod brute;

use serde::Serialize;
use thiserror::Error;

use crate::fixed::Milli;
use crate::graph::NodeId;
use crate::qubo::{Assignment, Qubo};

pub use bnb::{branch_and_bound, branch_and_bound_observed};
pub use brute::{brute_force, brute_force_with, count_ground_states, BruteForceOptions};

/// Default variable cap for exhaustive enumeration.
pub const BRUTE_FORCE_CAP: usize = 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("exhaustive search over {n} variables exceeds the cap of {cap}")]
    TooManyVariables { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub optimum_energy: Milli,
    /// Every minimizer (enumeration with `enumerate_all`, up to the storage
    /// limit) or a single witness.
    pub optima: Vec<Assignment>,
    /// Number of minimizers, when the search counted them.
    pub ground_state_count: Option<u64>,
    /// True iff the search space was exhausted.
    pub proved: bool,
    pub nodes_explored: u64,
    pub wall_time: f64,
}

impl ExactResult {
    pub fn witness(&self) -> &Assignment {
        &self.optima[0]
    }

    pub fn report(&self, qubo: &Qubo) -> ExactReport {
        ExactReport {
            variables: qubo.variables().to_vec(),
            optimum_energy: self.optimum_energy,
            optima: self.optima.iter().map(|a| a.to_bitstring(qubo.variables()).expect("optimum is total")).collect(),
            ground_state_count: self.ground_state_count,
            proved: self.proved,
            nodes_explored: self.nodes_explored,
            wall_time: self.wall_time,
        }
    }
}

/// JSON form of an [`ExactResult`]; optima are bitstrings in `variables` order.
#[derive(Debug, Clone, Serialize)]
pub struct ExactReport {
    pub variables: Vec<NodeId>,
    pub optimum_energy: Milli,
    pub optima: Vec<String>,
    pub ground_state_count: Option<u64>,
    pub proved: bool,
    pub nodes_explored: u64,
    pub wall_time: f64,
}
