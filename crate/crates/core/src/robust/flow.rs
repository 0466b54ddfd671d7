//! Dinic maximum flow with real capacities.

use std::collections::VecDeque;

/// Residual capacities below this are treated as saturated.
pub const FLOW_EPS: f64 = 1e-15;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    original: Vec<f64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            original: Vec::new(),
        }
    }

    /// Adds `from → to` and returns its edge id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.adj[from].push(id);
        self.edges.push(Edge { to, cap });
        self.adj[to].push(id + 1);
        self.edges.push(Edge { to: from, cap: 0.0 });
        self.original.push(cap);
        self.original.push(0.0);
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow(&self, id: usize) -> f64 {
        self.edges[id ^ 1].cap
    }

    fn levels(&self, s: usize, t: usize, level: &mut [u32]) -> bool {
        level.fill(u32::MAX);
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > FLOW_EPS && level[to] == u32::MAX {
                    level[to] = level[u] + 1;
                    q.push_back(to);
                }
            }
        }
        level[t] != u32::MAX
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[u32], it: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > FLOW_EPS && level[to] == level[u] + 1 {
                let pushed = self.push(to, t, limit.min(cap), level, it);
                if pushed > 0.0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.adj.len();
        let mut level = vec![u32::MAX; n];
        let mut it = vec![0usize; n];
        let mut total = 0.0;
        while self.levels(s, t, &mut level) {
            it.fill(0);
            loop {
                let pushed = self.push(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Undoes all routed flow.
    pub fn reset(&mut self) {
        for (e, &c) in self.edges.iter_mut().zip(&self.original) {
            e.cap = c;
        }
    }
}
