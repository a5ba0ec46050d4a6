//! Canonical in-memory graph model shared by every parser, algorithm and
//! serializer in the archive.
//!
//! A [`Graph`] is an immutable, validated labeled multigraph. Node ids are
//! strings so any source format's id space embeds without renumbering, and
//! attribute values keep the lexical form they had in the source file.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Attribute map; keys are sorted so serialization is deterministic.
pub type Attrs = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate node id {0:?}")]
    DuplicateNodeId(String),
    #[error("edge {edge} references unknown node {endpoint:?}")]
    DanglingEdgeEndpoint { edge: usize, endpoint: String },
    #[error("node ids must be non-empty (node {0})")]
    EmptyNodeId(usize),
    #[error("invalid weight {0:?}: not a real number")]
    InvalidWeight(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: Attrs,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: None,
            attrs: Attrs::new(),
        }
    }

    pub fn labeled(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            label: Some(label.into()),
            ..Self::new(id)
        }
    }

    /// Label used for labeled comparisons; falls back to the id.
    pub fn effective_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

/// Edge weight kept in its original lexical form (`1`, `1.0`, `2.5e-3`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Weight(String);

impl Weight {
    pub fn new(lexical: impl Into<String>) -> Result<Self, ModelError> {
        let lexical = lexical.into();
        match lexical.trim().parse::<f64>() {
            Ok(v) if lexical.trim() == lexical && !v.is_nan() => Ok(Self(lexical)),
            _ => Err(ModelError::InvalidWeight(lexical)),
        }
    }

    pub fn from_f64(value: f64) -> Self {
        Self(format!("{value:?}"))
    }

    pub fn value(&self) -> f64 {
        // validated at construction
        self.0.parse().unwrap_or(f64::NAN)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the lexical form is an integer literal.
    pub fn is_integer(&self) -> bool {
        let s = self.0.strip_prefix(['-', '+']).unwrap_or(&self.0);
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    }
}

impl TryFrom<String> for Weight {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Weight::new(value)
    }
}

impl From<Weight> for String {
    fn from(w: Weight) -> Self {
        w.0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Weight>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: Attrs,
}

impl EdgeRecord {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            label: None,
            weight: None,
            attrs: Attrs::new(),
        }
    }

    pub fn weighted(source: impl Into<String>, target: impl Into<String>, weight: Weight) -> Self {
        Self {
            weight: Some(weight),
            ..Self::new(source, target)
        }
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// Owned, unvalidated graph contents. Used for (de)serialization and for
/// rebuilding a modified copy of a [`Graph`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParts {
    pub directed: bool,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub graph_attrs: Attrs,
}

impl GraphParts {
    pub fn build(self) -> Result<Graph, ModelError> {
        Graph::try_from(self)
    }
}

/// Validated labeled multigraph. Self-loops and parallel edges are allowed.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphParts", into = "GraphParts")]
pub struct Graph {
    parts: GraphParts,
    index: HashMap<String, usize>,
}

/// Builds a validated graph, preserving node and edge order.
pub fn build_graph(
    directed: bool,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
) -> Result<Graph, ModelError> {
    GraphParts {
        directed,
        nodes,
        edges,
        graph_attrs: Attrs::new(),
    }
    .build()
}

impl TryFrom<GraphParts> for Graph {
    type Error = ModelError;

    fn try_from(parts: GraphParts) -> Result<Self, Self::Error> {
        let mut index = HashMap::with_capacity(parts.nodes.len());
        for (i, node) in parts.nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(ModelError::EmptyNodeId(i));
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateNodeId(node.id.clone()));
            }
        }
        for (i, edge) in parts.edges.iter().enumerate() {
            for endpoint in [&edge.source, &edge.target] {
                if !index.contains_key(endpoint) {
                    return Err(ModelError::DanglingEdgeEndpoint {
                        edge: i,
                        endpoint: endpoint.clone(),
                    });
                }
            }
        }
        Ok(Self { parts, index })
    }
}

impl From<Graph> for GraphParts {
    fn from(g: Graph) -> Self {
        g.parts
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("directed", &self.parts.directed)
            .field("nodes", &self.parts.nodes)
            .field("edges", &self.parts.edges)
            .field("graph_attrs", &self.parts.graph_attrs)
            .finish()
    }
}

impl Graph {
    pub fn empty(directed: bool) -> Self {
        Self {
            parts: GraphParts {
                directed,
                ..GraphParts::default()
            },
            index: HashMap::new(),
        }
    }

    pub fn with_graph_attrs(mut self, attrs: Attrs) -> Self {
        self.parts.graph_attrs = attrs;
        self
    }

    pub fn is_directed(&self) -> bool {
        self.parts.directed
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.parts.nodes
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.parts.edges
    }

    pub fn graph_attrs(&self) -> &Attrs {
        &self.parts.graph_attrs
    }

    pub fn node_count(&self) -> usize {
        self.parts.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parts.edges.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&NodeRecord> {
        self.node_index(id).map(|i| &self.parts.nodes[i])
    }

    /// Edge endpoints as node indices, in edge order.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .edges
            .iter()
            .map(|e| (self.index[&e.source], self.index[&e.target]))
    }

    pub fn to_parts(&self) -> GraphParts {
        self.parts.clone()
    }

    pub fn into_parts(self) -> GraphParts {
        self.parts
    }

    /// Undirected simple view: loops dropped, parallel edges collapsed,
    /// direction ignored.
    pub fn simple_view(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.node_count(), self.edge_indices())
    }

    /// Equality where undirected edges compare as unordered endpoint pairs.
    pub fn equivalent(&self, other: &Graph) -> bool {
        if self.parts.directed != other.parts.directed
            || self.parts.nodes != other.parts.nodes
            || self.parts.graph_attrs != other.parts.graph_attrs
            || self.parts.edges.len() != other.parts.edges.len()
        {
            return false;
        }
        self.parts
            .edges
            .iter()
            .zip(&other.parts.edges)
            .all(|(a, b)| {
                let same_ends = (a.source == b.source && a.target == b.target)
                    || (!self.parts.directed && a.source == b.target && a.target == b.source);
                same_ends && a.label == b.label && a.weight == b.weight && a.attrs == b.attrs
            })
    }

    /// Degrees sorted ascending. Directed graphs count in + out; a self-loop
    /// contributes 2 either way.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.node_count()];
        for (s, t) in self.edge_indices() {
            deg[s] += 1;
            deg[t] += 1;
        }
        deg.sort_unstable();
        deg
    }

    /// Byte signature equal for two graphs iff they agree on directedness,
    /// the multiset of node labels and the multiset of labeled edge pairs.
    /// Unlabeled nodes use their id.
    pub fn labeled_signature(&self) -> Vec<u8> {
        let mut labels: Vec<&str> = self.parts.nodes.iter().map(|n| n.effective_label()).collect();
        labels.sort_unstable();
        let mut pairs: Vec<(&str, &str)> = self
            .edge_indices()
            .map(|(s, t)| {
                let a = self.parts.nodes[s].effective_label();
                let b = self.parts.nodes[t].effective_label();
                if !self.parts.directed && b < a {
                    (b, a)
                } else {
                    (a, b)
                }
            })
            .collect();
        pairs.sort_unstable();

        let mut out = Vec::new();
        out.push(u8::from(self.parts.directed));
        push_len(&mut out, labels.len());
        for l in labels {
            push_str(&mut out, l);
        }
        push_len(&mut out, pairs.len());
        for (a, b) in pairs {
            push_str(&mut out, a);
            push_str(&mut out, b);
        }
        out
    }
}

pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    g.degree_sequence()
}

pub fn labeled_signature(g: &Graph) -> Vec<u8> {
    g.labeled_signature()
}

fn push_len(out: &mut Vec<u8>, n: usize) {
    out.extend_from_slice(&(n as u64).to_le_bytes());
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    push_len(out, s.len());
    out.extend_from_slice(s.as_bytes());
}

/// Index-based undirected simple graph used by the analysis algorithms.
/// Adjacency lists are sorted and free of loops and duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Self {
            adj,
            edge_count: edge_count / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        n == 0 || self.edge_count == n * (n - 1) / 2
    }
}
