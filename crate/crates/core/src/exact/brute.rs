use std::time::Instant;

use super::{ExactError, ExactResult, BRUTE_FORCE_CAP};
use crate::fixed::Milli;
use crate::qubo::Qubo;

#[derive(Debug, Clone)]
pub struct BruteForceOptions {
    pub enumerate_all: bool,
    pub max_variables: usize,
    /// Minimizers kept in `optima`; the count is always exact.
    pub max_stored_optima: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { enumerate_all: false, max_variables: BRUTE_FORCE_CAP, max_stored_optima: 1 << 16 }
    }
}

pub fn brute_force(qubo: &Qubo, enumerate_all: bool) -> Result<ExactResult, ExactError> {
    brute_force_with(qubo, &BruteForceOptions { enumerate_all, ..Default::default() })
}

/// Scan all `2^n` states in Gray-code order, one O(degree) flip per step.
pub fn brute_force_with(qubo: &Qubo, opts: &BruteForceOptions) -> Result<ExactResult, ExactError> {
    let n = qubo.num_variables();
    if n > opts.max_variables {
        return Err(ExactError::TooManyVariables { n, cap: opts.max_variables });
    }
    let start = Instant::now();
    let iq = qubo.indexed();
    let keep = if opts.enumerate_all { opts.max_stored_optima.max(1) } else { 1 };

    let mut x = vec![0u8; n];
    let mut field: Vec<i64> = iq.linear.clone();
    let mut energy = iq.offset;
    let mut best = energy;
    let mut count: u64 = 1;
    let mut stored = vec![x.clone()];

    let total: u64 = 1 << n;
    for k in 1..total {
        let p = k.trailing_zeros() as usize;
        let (cols, weights) = iq.row(p);
        if x[p] == 0 {
            energy += field[p];
            x[p] = 1;
            for (&q, &w) in cols.iter().zip(weights) {
                field[q] += w;
            }
        } else {
            energy -= field[p];
            x[p] = 0;
            for (&q, &w) in cols.iter().zip(weights) {
                field[q] -= w;
            }
        }
        if energy < best {
            best = energy;
            count = 1;
            stored.clear();
            stored.push(x.clone());
        } else if energy == best {
            count += 1;
            if stored.len() < keep {
                stored.push(x.clone());
            }
        }
    }

    Ok(ExactResult {
        optimum_energy: Milli(best),
        optima: stored.iter().map(|s| qubo.assignment_from_dense(s)).collect(),
        ground_state_count: Some(count),
        proved: true,
        nodes_explored: total,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Number of assignments attaining the minimum.
pub fn count_ground_states(qubo: &Qubo) -> Result<u64, ExactError> {
    let opts = BruteForceOptions { enumerate_all: true, max_stored_optima: 1, ..Default::default() };
    Ok(brute_force_with(qubo, &opts)?.ground_state_count.expect("enumeration counts"))
}
