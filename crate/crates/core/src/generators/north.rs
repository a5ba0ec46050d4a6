//! Cleanup pipeline turning a set of digraphs into distinct connected DAGs.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeneratorError;
use crate::analysis::components::component_labels;
use crate::model::{EdgeRecord, Graph};

/// Keeps the first graph of every labeled-isomorphism class, preserving order.
pub fn dedup_labeled(graphs: &[Graph]) -> Vec<Graph> {
    let mut seen = HashSet::new();
    graphs
        .iter()
        .filter(|g| seen.insert(g.labeled_signature()))
        .cloned()
        .collect()
}

/// Joins the (weakly) connected components with `components - 1` new edges.
/// Component `i` is linked to a uniformly chosen node of components
/// `0..i` from a uniformly chosen node of its own; directed edges get a random
/// orientation. Returns the graph and the added `(source, target)` pairs.
pub fn connect_randomly(g: &Graph, rng_seed: u64) -> (Graph, Vec<(String, String)>) {
    connect_with(g, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

fn connect_with(g: &Graph, rng: &mut ChaCha8Rng) -> (Graph, Vec<(String, String)>) {
    let (labels, count) = component_labels(g.node_count(), g.edge_indices());
    if count <= 1 {
        return (g.clone(), Vec::new());
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in labels.iter().enumerate() {
        members[c].push(v);
    }
    let mut parts = g.to_parts();
    let mut added = Vec::with_capacity(count - 1);
    let mut earlier: Vec<usize> = members[0].clone();
    for comp in &members[1..] {
        let u = comp[rng.random_range(0..comp.len())];
        let w = earlier[rng.random_range(0..earlier.len())];
        let (s, t) = if rng.random_bool(0.5) { (u, w) } else { (w, u) };
        let (s, t) = (g.nodes()[s].id.clone(), g.nodes()[t].id.clone());
        parts.edges.push(EdgeRecord::new(s.clone(), t.clone()));
        added.push((s, t));
        earlier.extend_from_slice(comp);
    }
    (parts.build().expect("endpoints exist"), added)
}

/// Greedy vertex ordering: sinks to the back, sources to the front, otherwise
/// the vertex with the largest out-degree minus in-degree (lowest index on
/// ties). Self-loops are ignored.
pub fn feedback_ordering(n: usize, arcs: &[(usize, usize)]) -> Vec<usize> {
    let mut out_deg = vec![0i64; n];
    let mut in_deg = vec![0i64; n];
    let mut out_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in arcs.iter().filter(|(u, v)| u != v) {
        out_deg[u] += 1;
        in_deg[v] += 1;
        out_adj[u].push(v);
        in_adj[v].push(u);
    }
    let mut removed = vec![false; n];
    let mut front = Vec::with_capacity(n);
    let mut back = Vec::new();
    let mut left = n;

    let remove = |v: usize,
                  removed: &mut Vec<bool>,
                  out_deg: &mut Vec<i64>,
                  in_deg: &mut Vec<i64>| {
        removed[v] = true;
        for &w in &out_adj[v] {
            in_deg[w] -= 1;
        }
        for &w in &in_adj[v] {
            out_deg[w] -= 1;
        }
    };

    while left > 0 {
        let mut progressed = true;
        while progressed {
            progressed = false;
            for v in 0..n {
                if !removed[v] && out_deg[v] == 0 {
                    remove(v, &mut removed, &mut out_deg, &mut in_deg);
                    back.push(v);
                    left -= 1;
                    progressed = true;
                }
            }
            for v in 0..n {
                if !removed[v] && in_deg[v] == 0 {
                    remove(v, &mut removed, &mut out_deg, &mut in_deg);
                    front.push(v);
                    left -= 1;
                    progressed = true;
                }
            }
        }
        if left == 0 {
            break;
        }
        let v = (0..n)
            .filter(|&v| !removed[v])
            .max_by_key(|&v| (out_deg[v] - in_deg[v], std::cmp::Reverse(v)))
            .expect("vertices remain");
        remove(v, &mut removed, &mut out_deg, &mut in_deg);
        front.push(v);
        left -= 1;
    }
    back.reverse();
    front.extend(back);
    front
}

/// Result of [`eliminate_cycles`].
#[derive(Debug, Clone, PartialEq)]
pub struct CycleElimination {
    pub graph: Graph,
    /// Inverted edges, in their original orientation.
    pub inverted: Vec<(String, String)>,
    pub dropped_self_loops: usize,
}

/// Inverts every edge pointing backwards in [`feedback_ordering`], yielding an
/// acyclic digraph over the same underlying undirected edges. Self-loops are
/// dropped and counted.
pub fn eliminate_cycles(g: &Graph) -> Result<CycleElimination, GeneratorError> {
    if !g.is_directed() {
        return Err(GeneratorError::NotDirected);
    }
    let arcs: Vec<(usize, usize)> = g.edge_indices().collect();
    let order = feedback_ordering(g.node_count(), &arcs);
    let mut pos = vec![0; g.node_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut parts = g.to_parts();
    let mut inverted = Vec::new();
    let mut dropped = 0;
    let mut kept = Vec::with_capacity(parts.edges.len());
    for (mut edge, (s, t)) in parts.edges.into_iter().zip(arcs) {
        if s == t {
            dropped += 1;
            continue;
        }
        if pos[s] > pos[t] {
            inverted.push((edge.source.clone(), edge.target.clone()));
            std::mem::swap(&mut edge.source, &mut edge.target);
        }
        kept.push(edge);
    }
    parts.edges = kept;
    Ok(CycleElimination {
        graph: parts.build().expect("endpoints unchanged"),
        inverted,
        dropped_self_loops: dropped,
    })
}

/// Deduplicates, connects and makes acyclic, in that order, then drops any
/// duplicates the random connection step created. Graphs without nodes are
/// discarded since they cannot be connected.
pub fn sanitize_north(graphs: &[Graph], rng_seed: u64) -> Result<Vec<Graph>, GeneratorError> {
    if let Some(i) = graphs.iter().position(|g| !g.is_directed()) {
        return Err(GeneratorError::NotDirectedAt(i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::new();
    for g in dedup_labeled(graphs) {
        if g.node_count() == 0 {
            continue;
        }
        let (connected, _) = connect_with(&g, &mut rng);
        out.push(eliminate_cycles(&connected)?.graph);
    }
    Ok(dedup_labeled(&out))
}
