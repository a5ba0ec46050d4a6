use std::collections::VecDeque;

use super::components::{biconnected_components_simple, component_labels};
use super::Deadline;
use crate::model::{Graph, SimpleGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct OutOfTime;

/// Unit-capacity flow network over the vertex-split graph: vertex `v` becomes
/// `2v` (in) and `2v + 1` (out) joined by a capacity-1 arc.
struct SplitNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u8>,
    initial: Vec<u8>,
    next: Vec<usize>,
}

impl SplitNetwork {
    fn new(g: &SimpleGraph) -> Self {
        let n = g.node_count();
        let mut net = SplitNetwork {
            head: vec![usize::MAX; 2 * n],
            to: Vec::new(),
            cap: Vec::new(),
            initial: Vec::new(),
            next: Vec::new(),
        };
        for v in 0..n {
            net.arc(2 * v, 2 * v + 1);
        }
        for (u, v) in g.edges() {
            net.arc(2 * u + 1, 2 * v);
            net.arc(2 * v + 1, 2 * u);
        }
        net.initial = net.cap.clone();
        net
    }

    fn push_half(&mut self, from: usize, to: usize, cap: u8) {
        self.to.push(to);
        self.cap.push(cap);
        self.next.push(self.head[from]);
        self.head[from] = self.to.len() - 1;
    }

    // arc i and its residual twin i ^ 1
    fn arc(&mut self, from: usize, to: usize) {
        self.push_half(from, to, 1);
        self.push_half(to, from, 0);
    }

    /// Number of internally vertex-disjoint s-t paths, stopping at `limit`.
    fn local(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.cap.copy_from_slice(&self.initial);
        let (source, sink) = (2 * s + 1, 2 * t);
        let mut pred = vec![usize::MAX; self.head.len()];
        let mut flow = 0;
        let mut queue = VecDeque::new();
        while flow < limit {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            pred[source] = usize::MAX - 1;
            queue.clear();
            queue.push_back(source);
            'bfs: while let Some(x) = queue.pop_front() {
                let mut a = self.head[x];
                while a != usize::MAX {
                    let y = self.to[a];
                    if self.cap[a] > 0 && pred[y] == usize::MAX {
                        pred[y] = a;
                        if y == sink {
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                    a = self.next[a];
                }
            }
            if pred[sink] == usize::MAX {
                break;
            }
            let mut y = sink;
            while y != source {
                let a = pred[y];
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                y = self.to[a ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

pub(crate) fn vertex_connectivity_within(g: &SimpleGraph, deadline: &Deadline) -> Result<usize, OutOfTime> {
    let n = g.node_count();
    if n <= 1 || g.is_complete() {
        return Ok(n.saturating_sub(1));
    }
    let (_, count) = component_labels(n, g.edges());
    if count > 1 {
        return Ok(0);
    }
    let (_, cuts) = biconnected_components_simple(g);
    if !cuts.is_empty() {
        return Ok(1);
    }
    let v = (0..n).min_by_key(|&v| g.degree(v)).unwrap_or(0);
    let mut best = g.degree(v);
    if best <= 2 {
        return Ok(best);
    }
    let mut net = SplitNetwork::new(g);
    for w in 0..n {
        if w == v || g.has_edge(v, w) {
            continue;
        }
        deadline.check()?;
        best = best.min(net.local(v, w, best));
    }
    let nbrs = g.neighbors(v);
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if g.has_edge(x, y) {
                continue;
            }
            deadline.check()?;
            best = best.min(net.local(x, y, best));
        }
    }
    Ok(best)
}

/// Vertex connectivity of the simple undirected view. Complete graphs on `n`
/// nodes have connectivity `n - 1`; disconnected graphs have 0.
pub fn vertex_connectivity(g: &Graph) -> usize {
    vertex_connectivity_simple(&g.simple_view())
}

pub fn vertex_connectivity_simple(g: &SimpleGraph) -> usize {
    match vertex_connectivity_within(g, &Deadline::none()) {
        Ok(k) => k,
        Err(OutOfTime) => unreachable!("no deadline set"),
    }
}

/// Minimum number of vertices separating `s` from `t`, for non-adjacent
/// distinct `s` and `t`.
pub fn local_vertex_connectivity(g: &SimpleGraph, s: usize, t: usize) -> usize {
    assert!(s != t && !g.has_edge(s, t), "local connectivity needs non-adjacent endpoints");
    SplitNetwork::new(g).local(s, t, usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(n: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        SimpleGraph::from_edges(n, edges.iter().copied())
    }

    fn complete(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    #[test]
    fn small_cases() {
        assert_eq!(vertex_connectivity_simple(&sg(4, &[(0, 1), (1, 2), (2, 3)])), 1);
        assert_eq!(vertex_connectivity_simple(&sg(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])), 2);
        assert_eq!(vertex_connectivity_simple(&complete(4)), 3);
        assert_eq!(vertex_connectivity_simple(&complete(1)), 0);
        assert_eq!(vertex_connectivity_simple(&sg(0, &[])), 0);
        assert_eq!(vertex_connectivity_simple(&sg(3, &[(0, 1)])), 0);
    }

    #[test]
    fn dense_cases() {
        // K3,3 is 3-connected; the 3-cube too; the Petersen graph too
        let k33 = sg(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]);
        assert_eq!(vertex_connectivity_simple(&k33), 3);
        let cube: Vec<(usize, usize)> = (0..8usize)
            .flat_map(|u| (0..3).map(move |b| (u, u ^ (1 << b))))
            .filter(|(u, v)| u < v)
            .collect();
        assert_eq!(vertex_connectivity_simple(&sg(8, &cube)), 3);
        let mut petersen = Vec::new();
        for i in 0..5 {
            petersen.push((i, (i + 1) % 5));
            petersen.push((i, i + 5));
            petersen.push((5 + i, 5 + (i + 2) % 5));
        }
        assert_eq!(vertex_connectivity_simple(&sg(10, &petersen)), 3);
        // K5 minus an edge
        let mut k5e: Vec<(usize, usize)> = complete(5).edges().collect();
        k5e.retain(|&e| e != (0, 1));
        assert_eq!(vertex_connectivity_simple(&sg(5, &k5e)), 3);
    }

    #[test]
    fn local_connectivity() {
        let c6 = sg(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        assert_eq!(local_vertex_connectivity(&c6, 0, 3), 2);
    }
}
