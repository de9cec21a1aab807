//! Depth-first branch and bound.
//!
//! Variables are fixed in order of descending total incident coefficient
//! magnitude (ties to the lower id), trying `x = 1` before `x = 0`. With
//! `l_v` the linear coefficient of free `v` after substituting fixed
//! neighbours, and `m_v` the sum of negative couplings from `v` to free
//! variables later in the order, the bound at a partial assignment is
//!
//! `offset + E_fixed + sum_{v free} min(0, l_v + m_v)`
//!
//! which never exceeds the minimum over completions: each free `v` adds
//! `x_v (l_v + sum_{later u} a_vu x_u) >= min(0, l_v + m_v)`.

use std::time::{Duration, Instant};

use super::ExactResult;
use crate::fixed::Milli;
use crate::graph::NodeId;
use crate::qubo::{IndexedQubo, Qubo};

const CLOCK_CHECK_INTERVAL: u64 = 1024;

pub fn branch_and_bound(qubo: &Qubo, time_limit: Duration) -> ExactResult {
    branch_and_bound_observed(qubo, time_limit, |_, _| {})
}

/// As [`branch_and_bound`], calling `observe(fixed, bound)` at every search
/// node after a variable is fixed.
pub fn branch_and_bound_observed(
    qubo: &Qubo,
    time_limit: Duration,
    mut observe: impl FnMut(&[(NodeId, bool)], Milli),
) -> ExactResult {
    let start = Instant::now();
    let mut search = Search::new(qubo, start, time_limit);
    let (greedy_x, greedy_e) = search.greedy();
    search.incumbent = greedy_x;
    search.incumbent_energy = greedy_e;

    let proved = if start.elapsed() >= time_limit {
        false
    } else {
        search.dfs(0, &mut observe);
        !search.aborted
    };
    let mut witness = vec![0u8; search.n];
    for (p, &v) in search.incumbent.iter().enumerate() {
        witness[p] = v;
    }
    ExactResult {
        optimum_energy: Milli(search.incumbent_energy),
        optima: vec![qubo.assignment_from_dense(&witness)],
        ground_state_count: None,
        proved,
        nodes_explored: search.nodes,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

struct Search<'a> {
    qubo: &'a Qubo,
    iq: &'a IndexedQubo,
    n: usize,
    order: Vec<usize>,
    rank: Vec<usize>,
    later_negative: Vec<i64>,
    field: Vec<i64>,
    x: Vec<u8>,
    fixed_energy: i64,
    free_bound: i64,
    incumbent: Vec<u8>,
    incumbent_energy: i64,
    nodes: u64,
    aborted: bool,
    start: Instant,
    limit: Duration,
    trail: Vec<(NodeId, bool)>,
}

impl<'a> Search<'a> {
    fn new(qubo: &'a Qubo, start: Instant, limit: Duration) -> Self {
        let iq = qubo.indexed();
        let n = iq.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (std::cmp::Reverse(iq.flip_bound(p)), p));
        let mut rank = vec![0; n];
        for (r, &p) in order.iter().enumerate() {
            rank[p] = r;
        }
        let later_negative: Vec<i64> =
            (0..n).map(|p| iq.neighbors(p).filter(|&(q, _)| rank[q] > rank[p]).map(|(_, w)| w.min(0)).sum()).collect();
        let field = iq.linear.clone();
        let free_bound = (0..n).map(|p| (field[p] + later_negative[p]).min(0)).sum();
        Search {
            qubo,
            iq,
            n,
            order,
            rank,
            later_negative,
            field,
            x: vec![0; n],
            fixed_energy: 0,
            free_bound,
            incumbent: vec![0; n],
            incumbent_energy: i64::MAX,
            nodes: 0,
            aborted: false,
            start,
            limit,
            trail: Vec::with_capacity(n),
        }
    }

    fn contribution(&self, p: usize) -> i64 {
        (self.field[p] + self.later_negative[p]).min(0)
    }

    /// Fixed-order greedy construction followed by single-flip descent.
    fn greedy(&self) -> (Vec<u8>, i64) {
        let mut x = vec![0u8; self.n];
        let mut field = self.iq.linear.clone();
        for &p in &self.order {
            if field[p] < 0 {
                x[p] = 1;
                for (q, w) in self.iq.neighbors(p) {
                    field[q] += w;
                }
            }
        }
        loop {
            let mut improved = false;
            for p in 0..self.n {
                let d = if x[p] == 0 { field[p] } else { -field[p] };
                if d < 0 {
                    let s = if x[p] == 0 { 1 } else { -1 };
                    x[p] ^= 1;
                    for (q, w) in self.iq.neighbors(p) {
                        field[q] += s * w;
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let e = self.iq.energy(&x);
        (x, e)
    }

    fn bound(&self) -> i64 {
        self.iq.offset + self.fixed_energy + self.free_bound
    }

    fn set_one(&mut self, v: usize, sign: i64) {
        self.fixed_energy += sign * self.field[v];
        let (cols, weights) = self.iq.row(v);
        for (&q, &w) in cols.iter().zip(weights) {
            if self.rank[q] > self.rank[v] {
                let old = (self.field[q] + self.later_negative[q]).min(0);
                self.field[q] += sign * w;
                self.free_bound += (self.field[q] + self.later_negative[q]).min(0) - old;
            }
        }
    }

    fn dfs(&mut self, depth: usize, observe: &mut impl FnMut(&[(NodeId, bool)], Milli)) {
        if depth == self.n {
            let e = self.bound();
            if e < self.incumbent_energy {
                self.incumbent_energy = e;
                self.incumbent.copy_from_slice(&self.x);
            }
            return;
        }
        let v = self.order[depth];
        let own = self.contribution(v);
        self.free_bound -= own;
        let id = self.qubo.variables()[v];
        for val in [1u8, 0] {
            if self.aborted {
                break;
            }
            self.nodes += 1;
            if self.nodes % CLOCK_CHECK_INTERVAL == 0 && self.start.elapsed() >= self.limit {
                self.aborted = true;
                break;
            }
            self.x[v] = val;
            if val == 1 {
                self.set_one(v, 1);
            }
            self.trail.push((id, val == 1));
            let b = self.bound();
            observe(&self.trail, Milli(b));
            if b < self.incumbent_energy {
                self.dfs(depth + 1, observe);
            }
            self.trail.pop();
            if val == 1 {
                self.set_one(v, -1);
            }
            self.x[v] = 0;
        }
        self.free_bound += own;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;
    use crate::qubo::{Assignment, QuboBuilder};
    use rand::Rng;

    const LONG: Duration = Duration::from_secs(60);

    fn random_qubo(n: u32, density: f64, step: i64, seed: u64) -> Qubo {
        let mut rng = crate::seed::rng(seed);
        let mut b = QuboBuilder::new();
        b.add_variables(0..n);
        for i in 0..n {
            b.add_linear(i, Milli(rng.gen_range(-10..=10) * step));
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    b.add_quadratic(i, j, Milli(rng.gen_range(-10..=10) * step)).unwrap();
                }
            }
        }
        b.build()
    }

    #[test]
    fn matches_brute_force() {
        for s in 0..60 {
            let q = random_qubo(4 + (s % 13) as u32, 0.35, 100, s);
            let r = branch_and_bound(&q, LONG);
            assert!(r.proved);
            assert_eq!(r.optimum_energy, brute_force(&q, false).unwrap().optimum_energy, "seed {s}");
            assert_eq!(q.evaluate(r.witness()).unwrap(), r.optimum_energy);
        }
    }

    #[test]
    fn all_positive_prunes_to_zeros() {
        let mut b = QuboBuilder::new();
        b.add_linear(0, Milli(500)).add_linear(1, Milli(100)).add_offset(Milli(42));
        b.add_quadratic(0, 2, Milli(300)).unwrap();
        let q = b.build();
        let r = branch_and_bound(&q, LONG);
        assert!(r.proved);
        assert_eq!(r.optimum_energy, Milli(42));
        assert_eq!(r.witness(), &Assignment::uniform(&[0, 1, 2], false));
    }

    #[test]
    fn zero_limit_returns_greedy() {
        let q = random_qubo(12, 0.4, 100, 3);
        let r = branch_and_bound(&q, Duration::ZERO);
        assert!(!r.proved);
        assert_eq!(r.nodes_explored, 0);
        assert_eq!(q.evaluate(r.witness()).unwrap(), r.optimum_energy);
        let s = Search::new(&q, Instant::now(), LONG);
        assert_eq!(Milli(s.greedy().1), r.optimum_energy);
    }

    #[test]
    fn deterministic() {
        let q = random_qubo(18, 0.3, 1000, 8);
        let a = branch_and_bound(&q, LONG);
        let b = branch_and_bound(&q, LONG);
        assert_eq!(a.optima, b.optima);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }

    #[test]
    fn bound_is_admissible_everywhere() {
        for s in 0..12 {
            let n = 9;
            let q = random_qubo(n, 0.5, 100, 100 + s);
            // Minimum over completions of a partial assignment, by enumeration.
            let subtree_min = |fixed: &[(NodeId, bool)]| -> Milli {
                let free: Vec<NodeId> = (0..n).filter(|v| !fixed.iter().any(|(u, _)| u == v)).collect();
                (0u32..1 << free.len())
                    .map(|bits| {
                        let mut a = Assignment::from_pairs(fixed.iter().copied());
                        for (k, &v) in free.iter().enumerate() {
                            a.set(v, bits >> k & 1 == 1);
                        }
                        q.evaluate(&a).unwrap()
                    })
                    .min()
                    .unwrap()
            };
            let mut visits = 0;
            branch_and_bound_observed(&q, LONG, |fixed, bound| {
                visits += 1;
                let m = subtree_min(fixed);
                assert!(bound <= m, "bound {bound} > subtree min {m} at {fixed:?}");
            });
            assert!(visits > 0);
        }
    }

    #[test]
    fn empty_problem() {
        let mut b = QuboBuilder::new();
        b.add_offset(Milli(7));
        let r = branch_and_bound(&b.build(), LONG);
        assert!(r.proved);
        assert_eq!(r.optimum_energy, Milli(7));
    }
}
