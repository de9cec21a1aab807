//! Kernighan-Lin bisection.
//!
//! Classic pass structure: from a seeded random balanced split, repeatedly
//! pick the unlocked pair `(a, b)` with the largest swap gain
//! `D_a + D_b - 2 c_ab`, lock it, update `D` for its neighbours, then commit
//! the best prefix of the tentative swaps if its total gain is positive.
//! Only edges internal to the subset count.
//!
//! `D` values are bounded by the internal degree, so candidates are kept in
//! per-side buckets indexed by `D`; a bucket is a `BTreeSet` of local indices
//! (which follow node-id order), which makes "lowest node id" tie-breaking
//! fall out of iteration order.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use super::{Graph, GraphError, NodeId};
use crate::seed;

const MAX_PASSES: usize = 64;

/// Number of edges of `graph` with one endpoint in `a` and the other in `b`.
pub fn cut_size(graph: &Graph, a: &[NodeId], b: &[NodeId]) -> usize {
    let b: BTreeSet<NodeId> = b.iter().copied().collect();
    a.iter().map(|&u| graph.neighbors(u).filter(|v| b.contains(v)).count()).sum()
}

/// Split `subset` into halves of sizes `ceil(k/2)` and `floor(k/2)`, both sorted.
pub fn kl_bisect(graph: &Graph, subset: &[NodeId], seed: u64) -> Result<(Vec<NodeId>, Vec<NodeId>), GraphError> {
    let mut ids: Vec<NodeId> = subset.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(GraphError::SubsetTooSmall(ids.len()));
    }
    let k = ids.len();

    let mut local = vec![usize::MAX; graph.node_count()];
    for (i, &id) in ids.iter().enumerate() {
        let p = graph.position(id).ok_or(GraphError::UnknownNode(id))?;
        local[p] = i;
    }
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&id| {
            let mut l: Vec<usize> = graph
                .adjacency_positions(graph.position(id).unwrap())
                .iter()
                .map(|&p| local[p])
                .filter(|&q| q != usize::MAX)
                .collect();
            l.sort_unstable();
            l
        })
        .collect();

    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut side = vec![1u8; k];
    for &i in &order[..k.div_ceil(2)] {
        side[i] = 0;
    }

    let mut pass = Pass::new(&adj);
    for _ in 0..MAX_PASSES {
        let swaps = pass.run(&side);
        let mut best = (0i64, 0usize);
        let mut acc = 0i64;
        for (n, &(_, _, g)) in swaps.iter().enumerate() {
            acc += g;
            if acc > best.0 {
                best = (acc, n + 1);
            }
        }
        if best.0 <= 0 {
            break;
        }
        for &(a, b, _) in &swaps[..best.1] {
            side.swap(a, b);
        }
    }

    let pick = |s: u8| ids.iter().zip(&side).filter(|(_, &x)| x == s).map(|(&n, _)| n).collect();
    Ok((pick(0), pick(1)))
}

struct Pass<'a> {
    adj: &'a [Vec<usize>],
    offset: i64,
    d: Vec<i64>,
    locked: Vec<bool>,
    buckets: [Vec<BTreeSet<usize>>; 2],
}

impl<'a> Pass<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let max_deg = adj.iter().map(Vec::len).max().unwrap_or(0) as i64;
        let width = (2 * max_deg + 1) as usize;
        Pass {
            adj,
            offset: max_deg,
            d: vec![0; adj.len()],
            locked: vec![false; adj.len()],
            buckets: [vec![BTreeSet::new(); width], vec![BTreeSet::new(); width]],
        }
    }

    fn slot(&self, d: i64) -> usize {
        (d + self.offset) as usize
    }

    /// One KL pass from `side`; returns the tentative swaps `(a, b, gain)` in order.
    fn run(&mut self, side: &[u8]) -> Vec<(usize, usize, i64)> {
        for b in self.buckets.iter_mut().flatten() {
            b.clear();
        }
        for i in 0..self.adj.len() {
            self.locked[i] = false;
            self.d[i] = self.adj[i].iter().map(|&j| if side[j] != side[i] { 1 } else { -1 }).sum();
            let s = self.slot(self.d[i]);
            self.buckets[side[i] as usize][s].insert(i);
        }
        let steps = side.iter().filter(|&&s| s == 1).count();
        let mut swaps = Vec::with_capacity(steps);
        for _ in 0..steps {
            let Some((gain, a, b)) = self.best_pair(side) else { break };
            swaps.push((a, b, gain));
            for v in [a, b] {
                self.locked[v] = true;
                let s = self.slot(self.d[v]);
                self.buckets[side[v] as usize][s].remove(&v);
            }
            for v in [a, b] {
                for &x in &self.adj[v] {
                    if self.locked[x] {
                        continue;
                    }
                    let delta = if side[x] == side[v] { 2 } else { -2 };
                    let (old, new) = (self.slot(self.d[x]), self.slot(self.d[x] + delta));
                    let bucket = &mut self.buckets[side[x] as usize];
                    bucket[old].remove(&x);
                    bucket[new].insert(x);
                    self.d[x] += delta;
                }
            }
        }
        swaps
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Max-gain unlocked pair with `a` on side 0; ties go to the lowest `(a, b)`.
    fn best_pair(&self, side: &[u8]) -> Option<(i64, usize, usize)> {
        let [ba, bb] = &self.buckets;
        let nonempty_b: Vec<usize> = (0..bb.len()).rev().filter(|&s| !bb[s].is_empty()).collect();
        let top_b = *nonempty_b.first()? as i64 - self.offset;
        let mut best: Option<(i64, usize, usize)> = None;
        let better = |cand: (i64, usize, usize), cur: Option<(i64, usize, usize)>| match cur {
            None => true,
            Some(c) => cand.0 > c.0 || (cand.0 == c.0 && (cand.1, cand.2) < (c.1, c.2)),
        };

        for sa in (0..ba.len()).rev().filter(|&s| !ba[s].is_empty()) {
            let da = sa as i64 - self.offset;
            if best.is_some_and(|c| da + top_b < c.0) {
                break;
            }
            for &sb in &nonempty_b {
                let db = sb as i64 - self.offset;
                let ub = da + db;
                if best.is_some_and(|c| ub < c.0) {
                    break;
                }
                let free = ba[sa].iter().find_map(|&a| bb[sb].iter().find(|&&b| !self.adjacent(a, b)).map(|&b| (a, b)));
                if let Some((a, b)) = free {
                    if better((ub, a, b), best) {
                        best = Some((ub, a, b));
                    }
                } else if best.is_none_or(|c| ub - 2 >= c.0) {
                    let linked = ba[sa].iter().find_map(|&a| {
                        self.adj[a].iter().find(|&&b| side[b] == 1 && bb[sb].contains(&b)).map(|&b| (a, b))
                    });
                    if let Some((a, b)) = linked {
                        if better((ub - 2, a, b), best) {
                            best = Some((ub - 2, a, b));
                        }
                    }
                }
            }
        }
        best
    }
}
