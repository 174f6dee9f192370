//! Dinic's maximum flow on exact big-integer capacities.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub(crate) struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<BigInt>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); nodes],
            to: Vec::new(),
            residual: Vec::new(),
        }
    }

    /// Arcs are stored in pairs so that `a ^ 1` is the reverse of `a`.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, capacity: BigInt) {
        debug_assert!(!capacity.is_negative());
        self.adjacency[from].push(self.to.len());
        self.to.push(to);
        self.residual.push(capacity);
        self.adjacency[to].push(self.to.len());
        self.to.push(from);
        self.residual.push(BigInt::zero());
    }

    fn levels(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adjacency.len()];
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let v = self.to[a];
                if level[v] == usize::MAX && self.residual[a].is_positive() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (level[sink] != usize::MAX).then_some(level)
    }

    fn augment(
        &mut self,
        u: usize,
        sink: usize,
        limit: &BigInt,
        level: &[usize],
        next_arc: &mut [usize],
    ) -> BigInt {
        if u == sink {
            return limit.clone();
        }
        while next_arc[u] < self.adjacency[u].len() {
            let a = self.adjacency[u][next_arc[u]];
            let v = self.to[a];
            if level[v] == level[u] + 1 && self.residual[a].is_positive() {
                let bottleneck = if &self.residual[a] < limit {
                    self.residual[a].clone()
                } else {
                    limit.clone()
                };
                let pushed = self.augment(v, sink, &bottleneck, level, next_arc);
                if pushed.is_positive() {
                    self.residual[a] -= &pushed;
                    self.residual[a ^ 1] += &pushed;
                    return pushed;
                }
            }
            next_arc[u] += 1;
        }
        BigInt::zero()
    }

    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> BigInt {
        let unbounded: BigInt = self.residual.iter().sum::<BigInt>() + 1u32;
        let mut total = BigInt::zero();
        while let Some(level) = self.levels(source, sink) {
            let mut next_arc = vec![0; self.adjacency.len()];
            loop {
                let pushed = self.augment(source, sink, &unbounded, &level, &mut next_arc);
                if pushed.is_zero() {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes that can still reach `sink` through positive residual arcs.
    /// After a maximum flow their complement is the largest source side of
    /// a minimum cut.
    pub(crate) fn can_reach_sink(&self, sink: usize) -> Vec<bool> {
        let mut mark = vec![false; self.adjacency.len()];
        mark[sink] = true;
        let mut queue = VecDeque::from([sink]);
        while let Some(w) = queue.pop_front() {
            for &a in &self.adjacency[w] {
                // a: w -> x, so a ^ 1 is the arc x -> w.
                let x = self.to[a];
                if !mark[x] && self.residual[a ^ 1].is_positive() {
                    mark[x] = true;
                    queue.push_back(x);
                }
            }
        }
        mark
    }
}
