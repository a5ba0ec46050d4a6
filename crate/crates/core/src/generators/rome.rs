//! Mutation generator producing families of small connected undirected
//! graphs from a seed graph.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GeneratorError;
use crate::analysis::biconnected_components_simple;
use crate::model::{build_graph, EdgeRecord, Graph, NodeRecord, SimpleGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationOp {
    /// New vertex attached to a random existing vertex.
    InsertVertex,
    /// Removes a vertex of degree at most 2, joining its two neighbors.
    RemoveVertex,
    /// New edge between a random non-adjacent pair.
    InsertEdge,
    /// Removes a random edge that is not a bridge.
    RemoveEdge,
    /// Subdivides a random edge with a new vertex.
    SplitEdge,
}

impl MutationOp {
    pub const ALL: [MutationOp; 5] = [
        MutationOp::InsertVertex,
        MutationOp::RemoveVertex,
        MutationOp::InsertEdge,
        MutationOp::RemoveEdge,
        MutationOp::SplitEdge,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityFilter {
    pub require_connected: bool,
    pub density_bounds: (f64, f64),
    /// Upper bound on the L1 distance between the normalized degree
    /// histograms of candidate and seed (at most 2).
    pub max_degree_seq_distance: f64,
}

impl Default for SuitabilityFilter {
    fn default() -> Self {
        SuitabilityFilter {
            require_connected: true,
            density_bounds: (0.0, 1.0),
            max_degree_seq_distance: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MutationConfig {
    pub rounds: usize,
    pub ops_per_round: usize,
    /// Indexed like [`MutationOp::ALL`].
    pub op_probabilities: [f64; 5],
    /// Each probability moves by a uniform amount in `[-epsilon, epsilon]`
    /// after every round, then the vector is renormalized.
    pub epsilon: f64,
    pub size_bounds: (usize, usize),
    pub rng_seed: u64,
    pub filter: SuitabilityFilter,
    pub variants_per_round: usize,
    /// Candidates tried per output before giving up.
    pub max_attempts: usize,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            rounds: 10,
            ops_per_round: 8,
            op_probabilities: [0.25, 0.15, 0.25, 0.15, 0.2],
            epsilon: 0.05,
            size_bounds: (10, 100),
            rng_seed: 0,
            filter: SuitabilityFilter::default(),
            variants_per_round: 10,
            max_attempts: 1000,
        }
    }
}

impl MutationConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: &str| Err(GeneratorError::InvalidConfig(m.to_string()));
        let sum: f64 = self.op_probabilities.iter().sum();
        if self.op_probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return bad("operation probabilities must be non-negative and sum to 1");
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad("epsilon must be a non-negative number");
        }
        let (lo, hi) = self.size_bounds;
        if lo < 1 || lo > hi {
            return bad("size bounds must satisfy 1 <= min_n <= max_n");
        }
        let (dlo, dhi) = self.filter.density_bounds;
        if !(dlo <= dhi) {
            return bad("density bounds must satisfy low <= high");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

/// Simple undirected working graph with ordered adjacency sets.
#[derive(Debug, Clone, PartialEq)]
struct Work {
    adj: Vec<BTreeSet<usize>>,
}

impl Work {
    fn from_simple(g: &SimpleGraph) -> Self {
        Work {
            adj: (0..g.node_count()).map(|v| g.neighbors(v).iter().copied().collect()).collect(),
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    fn add_vertex(&mut self) -> usize {
        self.adj.push(BTreeSet::new());
        self.adj.len() - 1
    }

    /// Removes `v`; the last vertex takes its index.
    fn remove_vertex(&mut self, v: usize) {
        for w in std::mem::take(&mut self.adj[v]) {
            self.adj[w].remove(&v);
        }
        let last = self.adj.len() - 1;
        if v != last {
            for w in std::mem::take(&mut self.adj[last]) {
                self.adj[w].remove(&last);
                self.adj[w].insert(v);
                self.adj[v].insert(w);
            }
        }
        self.adj.pop();
    }

    fn simple(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.n(), self.edges())
    }

    fn non_adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !self.adj[u].contains(&v))
            .collect()
    }

    fn non_bridges(&self) -> Vec<(usize, usize)> {
        let (comps, _) = biconnected_components_simple(&self.simple());
        let mut out: Vec<(usize, usize)> = comps.into_iter().filter(|c| c.len() > 1).flatten().collect();
        out.sort_unstable();
        out
    }

    fn removable_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.adj[v].len() <= 2).collect()
    }

    fn applicable(&self, op: MutationOp, bounds: (usize, usize)) -> bool {
        let n = self.n();
        match op {
            MutationOp::InsertVertex => n < bounds.1,
            MutationOp::SplitEdge => n < bounds.1 && self.edge_count() > 0,
            MutationOp::RemoveVertex => n > bounds.0 && self.adj.iter().any(|a| a.len() <= 2),
            MutationOp::InsertEdge => self.edge_count() < n * n.saturating_sub(1) / 2,
            MutationOp::RemoveEdge => !self.non_bridges().is_empty(),
        }
    }

    fn apply(&mut self, op: MutationOp, rng: &mut ChaCha8Rng) {
        match op {
            MutationOp::InsertVertex => {
                let anchor = (self.n() > 0).then(|| rng.random_range(0..self.n()));
                let w = self.add_vertex();
                if let Some(a) = anchor {
                    self.add_edge(a, w);
                }
            }
            MutationOp::RemoveVertex => {
                let cands = self.removable_vertices();
                let v = cands[rng.random_range(0..cands.len())];
                let nb: Vec<usize> = self.adj[v].iter().copied().collect();
                if let [a, b] = nb[..] {
                    self.add_edge(a, b);
                }
                self.remove_vertex(v);
            }
            MutationOp::InsertEdge => {
                let pairs = self.non_adjacent_pairs();
                let (u, v) = pairs[rng.random_range(0..pairs.len())];
                self.add_edge(u, v);
            }
            MutationOp::RemoveEdge => {
                let cands = self.non_bridges();
                let (u, v) = cands[rng.random_range(0..cands.len())];
                self.remove_edge(u, v);
            }
            MutationOp::SplitEdge => {
                let edges = self.edges();
                let (u, v) = edges[rng.random_range(0..edges.len())];
                self.remove_edge(u, v);
                let w = self.add_vertex();
                self.add_edge(u, w);
                self.add_edge(w, v);
            }
        }
    }

    fn to_graph(&self) -> Graph {
        build_graph(
            false,
            (0..self.n()).map(|i| NodeRecord::new(i.to_string())).collect(),
            self.edges()
                .into_iter()
                .map(|(u, v)| EdgeRecord::new(u.to_string(), v.to_string()))
                .collect(),
        )
        .expect("working graph is well formed")
    }
}

fn degree_histogram(g: &SimpleGraph) -> Vec<f64> {
    let n = g.node_count();
    let max = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut h = vec![0.0; max + 1];
    for v in 0..n {
        h[g.degree(v)] += 1.0;
    }
    if n > 0 {
        h.iter_mut().for_each(|x| *x /= n as f64);
    }
    h
}

/// L1 distance between normalized degree histograms of the simple views.
pub fn degree_histogram_distance(a: &Graph, b: &Graph) -> f64 {
    histogram_distance(&degree_histogram(&a.simple_view()), &degree_histogram(&b.simple_view()))
}

fn histogram_distance(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs())
        .sum()
}

fn simple_density(g: &SimpleGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / (n * (n - 1)) as f64
    }
}

impl SuitabilityFilter {
    fn accepts_simple(&self, g: &SimpleGraph, seed_hist: &[f64]) -> bool {
        if self.require_connected {
            let n = g.node_count();
            let (_, count) = crate::analysis::components::component_labels(n, g.edges());
            if count != 1 {
                return false;
            }
        }
        let d = simple_density(g);
        let (lo, hi) = self.density_bounds;
        if d < lo - 1e-12 || d > hi + 1e-12 {
            return false;
        }
        histogram_distance(&degree_histogram(g), seed_hist) <= self.max_degree_seq_distance + 1e-12
    }

    /// Whether `candidate` passes this filter relative to `seed`.
    pub fn accepts(&self, candidate: &Graph, seed: &Graph) -> bool {
        self.accepts_simple(&candidate.simple_view(), &degree_histogram(&seed.simple_view()))
    }
}

fn pick_op(rng: &mut ChaCha8Rng, probs: &[f64; 5], work: &Work, bounds: (usize, usize)) -> Option<MutationOp> {
    let weights: Vec<f64> = MutationOp::ALL
        .iter()
        .zip(probs)
        .map(|(&op, &p)| if p > 0.0 && work.applicable(op, bounds) { p } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            if x < *w {
                return Some(MutationOp::ALL[i]);
            }
            x -= w;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).map(|i| MutationOp::ALL[i])
}

fn perturb(rng: &mut ChaCha8Rng, probs: &mut [f64; 5], epsilon: f64) {
    if epsilon == 0.0 {
        return;
    }
    for p in probs.iter_mut() {
        *p = (*p + rng.random_range(-epsilon..=epsilon)).max(0.0);
    }
    let sum: f64 = probs.iter().sum();
    if sum > 0.0 {
        probs.iter_mut().for_each(|p| *p /= sum);
    } else {
        *probs = [0.2; 5];
    }
}

/// Runs `rounds` rounds; each round derives `variants_per_round` outputs from
/// parents drawn out of the seed and the outputs so far. Every output lies
/// within the size bounds and passes the filter.
pub fn mutate_rome(seed_graph: &Graph, cfg: &MutationConfig) -> Result<Vec<Graph>, GeneratorError> {
    cfg.validate()?;
    if seed_graph.is_directed() {
        return Err(GeneratorError::NotUndirected);
    }
    let seed_simple = seed_graph.simple_view();
    let (_, count) = crate::analysis::components::component_labels(seed_simple.node_count(), seed_simple.edges());
    if count != 1 {
        return Err(GeneratorError::SeedDisconnected);
    }
    let seed_hist = degree_histogram(&seed_simple);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut probs = cfg.op_probabilities;
    // graphs are kept next to their working copies so unmutated candidates
    // come out identical to their parent
    let mut pool: Vec<(Work, Graph)> = vec![(Work::from_simple(&seed_simple), seed_graph.clone())];
    let mut outputs = Vec::with_capacity(cfg.rounds * cfg.variants_per_round);
    let (lo, hi) = cfg.size_bounds;

    for round in 0..cfg.rounds {
        for _ in 0..cfg.variants_per_round {
            let mut accepted = None;
            for _ in 0..cfg.max_attempts {
                let parent = rng.random_range(0..pool.len());
                let mut work = pool[parent].0.clone();
                let mut applied = 0;
                for _ in 0..cfg.ops_per_round {
                    match pick_op(&mut rng, &probs, &work, cfg.size_bounds) {
                        Some(op) => work.apply(op, &mut rng),
                        None => break,
                    }
                    applied += 1;
                }
                let n = work.n();
                if (lo..=hi).contains(&n) && cfg.filter.accepts_simple(&work.simple(), &seed_hist) {
                    let graph = if applied == 0 { pool[parent].1.clone() } else { work.to_graph() };
                    accepted = Some((work, graph));
                    break;
                }
            }
            let (work, graph) = accepted.ok_or(GeneratorError::FilterExhausted {
                round,
                attempts: cfg.max_attempts,
            })?;
            outputs.push(graph.clone());
            pool.push((work, graph));
        }
        perturb(&mut rng, &mut probs, cfg.epsilon);
    }
    Ok(outputs)
}
