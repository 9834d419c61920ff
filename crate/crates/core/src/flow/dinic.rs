use std::collections::VecDeque;

use super::graph::{Capacity, CapacityGraph};
use super::{FlowError, FlowResult};
use crate::scalar::Scalar;

/// Residual network. Arc `2k` is the forward copy of arc `k` of the source
/// graph, arc `2k + 1` its paired reverse arc.
#[derive(Debug, Clone)]
pub struct ResidualGraph<S> {
    to: Vec<usize>,
    capacity: Vec<S>,
    residual: Vec<S>,
    adj: Vec<Vec<usize>>,
    sentinel: S,
}

impl<S: Scalar> ResidualGraph<S> {
    /// Builds the residual network of `g`. Infinite arcs get a sentinel
    /// strictly larger than the sum of all finite capacities.
    pub fn from_graph(g: &CapacityGraph<S>) -> Self {
        let sentinel = g.finite_capacity_sum() + S::one();
        let mut r = Self {
            to: Vec::with_capacity(2 * g.arcs().len()),
            capacity: Vec::with_capacity(2 * g.arcs().len()),
            residual: Vec::with_capacity(2 * g.arcs().len()),
            adj: vec![Vec::new(); g.node_count()],
            sentinel,
        };
        for a in g.arcs() {
            let cap = match a.capacity {
                Capacity::Finite(c) => c,
                Capacity::Infinite => sentinel,
            };
            r.push_pair(a.src, a.dst, cap);
        }
        r
    }

    /// Like [`ResidualGraph::from_graph`] but with each arc's capacity
    /// reduced by the flow already committed on it.
    pub fn from_remaining(g: &CapacityGraph<S>, committed: &[S]) -> Self {
        let mut r = Self::from_graph(g);
        for (k, &f) in committed.iter().enumerate() {
            let left = r.capacity[2 * k] - f;
            let left = left.max_of(S::zero());
            r.capacity[2 * k] = left;
            r.residual[2 * k] = left;
        }
        r
    }

    fn push_pair(&mut self, u: usize, v: usize, cap: S) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.capacity.push(cap);
        self.residual.push(cap);
        self.adj[u].push(id);
        self.to.push(u);
        self.capacity.push(S::zero());
        self.residual.push(S::zero());
        self.adj[v].push(id + 1);
        id
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds a forward arc with its reverse twin; returns the forward id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: Capacity<S>) -> usize {
        let cap = match cap {
            Capacity::Finite(c) => c,
            Capacity::Infinite => self.sentinel,
        };
        self.push_pair(u, v, cap)
    }

    /// Closes a forward arc: no further flow may use it in either direction.
    pub fn close_arc(&mut self, forward: usize) {
        self.residual[forward] = S::zero();
        self.residual[forward ^ 1] = S::zero();
    }

    pub fn sentinel(&self) -> S {
        self.sentinel
    }

    /// Flow currently carried by forward arc `forward`.
    pub fn flow(&self, forward: usize) -> S {
        self.capacity[forward] - self.residual[forward]
    }

    pub fn residual(&self, arc: usize) -> S {
        self.residual[arc]
    }

    /// Per-arc flows of the first `arc_count` forward arcs, indexed like the
    /// source graph.
    pub fn arc_flows(&self, arc_count: usize) -> Vec<S> {
        (0..arc_count).map(|k| self.flow(2 * k)).collect()
    }

    fn levels(&self, s: usize, t: usize, level: &mut [usize]) -> bool {
        level.fill(usize::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if level[v] == usize::MAX && self.residual[e].is_positive() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[t] != usize::MAX
    }

    fn augment(&mut self, u: usize, t: usize, limit: S, level: &[usize], next: &mut [usize]) -> S {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.to[e];
            let r = self.residual[e];
            if level[v] == level[u] + 1 && r.is_positive() {
                let pushed = self.augment(v, t, limit.min_of(r), level, next);
                if pushed.is_positive() {
                    self.residual[e] = self.residual[e] - pushed;
                    self.residual[e ^ 1] = self.residual[e ^ 1] + pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        S::zero()
    }

    /// Dinic's algorithm: repeated BFS level graphs, each saturated with a
    /// blocking flow. Adds to any flow already present and returns the
    /// amount added.
    pub fn max_flow(&mut self, s: usize, t: usize) -> S {
        let n = self.adj.len();
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        let mut total = S::zero();
        while self.levels(s, t, &mut level) {
            next.fill(0);
            loop {
                let limit: S = self.adj[s].iter().map(|&e| self.residual[e]).sum();
                if !limit.is_positive() {
                    break;
                }
                let pushed = self.augment(s, t, limit, &level, &mut next);
                if !pushed.is_positive() {
                    break;
                }
                total = total + pushed;
            }
        }
        total
    }
}

/// Exact maximum `source -> sink` flow. A disconnected pair yields zero.
pub fn dinic_max_flow<S: Scalar>(
    g: &CapacityGraph<S>,
    source: usize,
    sink: usize,
) -> Result<FlowResult<S>, FlowError> {
    let n = g.node_count();
    if source >= n || sink >= n {
        return Err(FlowError::UnknownNode(source.max(sink)));
    }
    if source == sink {
        return Err(FlowError::SourceIsSink(source));
    }
    let mut r = ResidualGraph::from_graph(g);
    let value = r.max_flow(source, sink);
    Ok(FlowResult {
        value,
        arc_flows: r.arc_flows(g.arcs().len()),
    })
}
