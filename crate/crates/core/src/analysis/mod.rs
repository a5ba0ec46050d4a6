//! Structural properties of archived graphs.

pub(crate) mod components;
mod connectivity;
mod planarity;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::Graph;

pub use components::{
    articulation_points, biconnected_components, biconnected_components_simple, connected_components, is_acyclic,
    is_bipartite,
};
pub use connectivity::{local_vertex_connectivity, vertex_connectivity, vertex_connectivity_simple};
pub use planarity::{is_planar, is_planar_simple};

pub const DEFAULT_VERTEX_THRESHOLD: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("analysis exceeded its time budget")]
    TimeBudgetExceeded { partial: Box<PropertySet> },
    #[error("vertex threshold must be positive")]
    InvalidConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisConfig {
    /// Graphs with at least this many nodes only get counts and degree statistics.
    pub vertex_threshold: usize,
    /// Wall-clock budget per graph. `None` disables the check.
    pub time_budget: Option<Duration>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            vertex_threshold: DEFAULT_VERTEX_THRESHOLD,
            time_budget: Some(Duration::from_secs(60)),
        }
    }
}

pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn none() -> Self {
        Deadline(None)
    }

    fn after(budget: Option<Duration>) -> Self {
        Deadline(budget.map(|b| Instant::now() + b))
    }

    pub(crate) fn check(&self) -> Result<(), connectivity::OutOfTime> {
        match self.0 {
            Some(end) if Instant::now() >= end => Err(connectivity::OutOfTime),
            _ => Ok(()),
        }
    }
}

/// Analysis results. Fields that were not computed (threshold or time budget)
/// are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PropertySet {
    pub node_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub density: Option<f64>,
    pub has_self_loops: Option<bool>,
    pub has_multi_edges: Option<bool>,
    pub is_connected: Option<bool>,
    pub is_bipartite: Option<bool>,
    pub is_acyclic: Option<bool>,
    pub connected_component_count: Option<usize>,
    pub biconnected_component_count: Option<usize>,
    pub vertex_connectivity: Option<usize>,
    pub is_planar: Option<bool>,
    /// Only ever supplied by users.
    pub crossing_number: Option<usize>,
    pub min_degree: f64,
    pub max_degree: f64,
    pub avg_degree: f64,
    pub analysis_skipped: bool,
    pub skip_reason: Option<String>,
}

/// Numeric property names accepted by search.
pub const NUMERIC_PROPERTIES: &[&str] = &[
    "node_count",
    "edge_count",
    "density",
    "connected_component_count",
    "biconnected_component_count",
    "vertex_connectivity",
    "crossing_number",
    "min_degree",
    "max_degree",
    "avg_degree",
];

/// Boolean property names accepted by search.
pub const BOOLEAN_PROPERTIES: &[&str] = &[
    "directed",
    "has_self_loops",
    "has_multi_edges",
    "is_connected",
    "is_bipartite",
    "is_acyclic",
    "is_planar",
];

/// Properties a user may supply; everything else is computed.
pub const USER_SETTABLE_PROPERTIES: &[&str] = &["crossing_number"];

impl PropertySet {
    /// `None` for unknown names and for properties not computed.
    pub fn numeric(&self, name: &str) -> Option<f64> {
        let f = |v: Option<usize>| v.map(|x| x as f64);
        match name {
            "node_count" => Some(self.node_count as f64),
            "edge_count" => Some(self.edge_count as f64),
            "density" => self.density,
            "connected_component_count" => f(self.connected_component_count),
            "biconnected_component_count" => f(self.biconnected_component_count),
            "vertex_connectivity" => f(self.vertex_connectivity),
            "crossing_number" => f(self.crossing_number),
            "min_degree" => Some(self.min_degree),
            "max_degree" => Some(self.max_degree),
            "avg_degree" => Some(self.avg_degree),
            _ => None,
        }
    }

    pub fn boolean(&self, name: &str) -> Option<bool> {
        match name {
            "directed" => Some(self.directed),
            "has_self_loops" => self.has_self_loops,
            "has_multi_edges" => self.has_multi_edges,
            "is_connected" => self.is_connected,
            "is_bipartite" => self.is_bipartite,
            "is_acyclic" => self.is_acyclic,
            "is_planar" => self.is_planar,
            _ => None,
        }
    }

    /// Counts, directedness and degree statistics only.
    pub fn basic(g: &Graph) -> Self {
        let degrees = g.degree_sequence();
        let n = degrees.len();
        let (min, max, avg) = if n == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                degrees[0] as f64,
                degrees[n - 1] as f64,
                degrees.iter().sum::<usize>() as f64 / n as f64,
            )
        };
        PropertySet {
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            directed: g.is_directed(),
            min_degree: min,
            max_degree: max,
            avg_degree: avg,
            ..PropertySet::default()
        }
    }
}

fn has_multi_edges(g: &Graph) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(g.edge_count());
    g.edge_indices().any(|(s, t)| {
        let key = if g.is_directed() { (s, t) } else { (s.min(t), s.max(t)) };
        !seen.insert(key)
    })
}

/// Computes every property for graphs below the vertex threshold; larger
/// graphs get only [`PropertySet::basic`] and `analysis_skipped`.
pub fn analyze(g: &Graph, cfg: &AnalysisConfig) -> Result<PropertySet, AnalysisError> {
    if cfg.vertex_threshold == 0 {
        return Err(AnalysisError::InvalidConfig);
    }
    let mut p = PropertySet::basic(g);
    if g.node_count() >= cfg.vertex_threshold {
        p.analysis_skipped = true;
        p.skip_reason = Some(format!(
            "{} nodes is at or above the analysis threshold of {}",
            g.node_count(),
            cfg.vertex_threshold
        ));
        return Ok(p);
    }
    let deadline = Deadline::after(cfg.time_budget);
    let out_of_time = |mut p: PropertySet| {
        p.analysis_skipped = true;
        p.skip_reason = Some("time budget exceeded".into());
        AnalysisError::TimeBudgetExceeded { partial: Box::new(p) }
    };

    let sg = g.simple_view();
    let n = sg.node_count();
    p.density = Some(if n < 2 {
        0.0
    } else {
        let pairs = (n * (n - 1)) as f64;
        let m = if g.is_directed() {
            let mut arcs: Vec<(usize, usize)> = g.edge_indices().filter(|(s, t)| s != t).collect();
            arcs.sort_unstable();
            arcs.dedup();
            arcs.len()
        } else {
            2 * sg.edge_count()
        };
        m as f64 / pairs
    });
    p.has_self_loops = Some(g.edges().iter().any(|e| e.is_loop()));
    p.has_multi_edges = Some(has_multi_edges(g));
    let components = connected_components(g).len();
    p.connected_component_count = Some(components);
    p.is_connected = Some(components == 1);
    p.is_bipartite = Some(is_bipartite(g));
    p.is_acyclic = Some(is_acyclic(g));
    if deadline.check().is_err() {
        return Err(out_of_time(p));
    }
    p.biconnected_component_count = Some(biconnected_components_simple(&sg).0.len());
    p.is_planar = Some(is_planar_simple(&sg));
    if deadline.check().is_err() {
        return Err(out_of_time(p));
    }
    match connectivity::vertex_connectivity_within(&sg, &deadline) {
        Ok(k) => p.vertex_connectivity = Some(k),
        Err(_) => return Err(out_of_time(p)),
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_graph, EdgeRecord, NodeRecord};

    fn graph(directed: bool, n: usize, edges: &[(usize, usize)]) -> Graph {
        build_graph(
            directed,
            (0..n).map(|i| NodeRecord::new(i.to_string())).collect(),
            edges
                .iter()
                .map(|&(u, v)| EdgeRecord::new(u.to_string(), v.to_string()))
                .collect(),
        )
        .unwrap()
    }

    fn unbounded() -> AnalysisConfig {
        AnalysisConfig {
            time_budget: None,
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn k4() {
        let p = analyze(&graph(false, 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), &unbounded()).unwrap();
        assert_eq!((p.node_count, p.edge_count), (4, 6));
        assert_eq!(p.density, Some(1.0));
        assert_eq!(p.is_connected, Some(true));
        assert_eq!(p.vertex_connectivity, Some(3));
        assert_eq!(p.is_planar, Some(true));
        assert_eq!(p.is_bipartite, Some(false));
        assert_eq!(p.avg_degree, 3.0);
        assert!(!p.analysis_skipped);
    }

    #[test]
    fn directed_triangle() {
        let p = analyze(&graph(true, 3, &[(0, 1), (1, 2), (2, 0)]), &unbounded()).unwrap();
        assert_eq!(p.is_acyclic, Some(false));
        assert_eq!(p.connected_component_count, Some(1));
        assert_eq!(p.vertex_connectivity, Some(2));
        assert_eq!(p.density, Some(0.5));
    }

    #[test]
    fn density_ignores_loops_and_parallel_edges() {
        let p = analyze(&graph(false, 2, &[(0, 1), (1, 0), (0, 0)]), &unbounded()).unwrap();
        assert_eq!(p.density, Some(1.0));
        assert_eq!(p.has_multi_edges, Some(true));
        assert_eq!(p.has_self_loops, Some(true));
        let one = analyze(&graph(false, 1, &[]), &unbounded()).unwrap();
        assert_eq!(one.density, Some(0.0));
        assert_eq!(one.is_connected, Some(true));
    }

    #[test]
    fn threshold_skips() {
        let cfg = AnalysisConfig {
            vertex_threshold: 5,
            time_budget: None,
        };
        let p = analyze(&graph(false, 5, &[]), &cfg).unwrap();
        assert!(p.analysis_skipped);
        assert_eq!(p.node_count, 5);
        assert_eq!(p.is_planar, None);
        let p = analyze(&graph(false, 4, &[]), &cfg).unwrap();
        assert!(!p.analysis_skipped);
    }

    #[test]
    fn zero_budget_reports_partial() {
        let cfg = AnalysisConfig {
            vertex_threshold: 10,
            time_budget: Some(Duration::ZERO),
        };
        match analyze(&graph(false, 3, &[(0, 1)]), &cfg) {
            Err(AnalysisError::TimeBudgetExceeded { partial }) => {
                assert_eq!(partial.node_count, 3);
                assert!(partial.analysis_skipped);
                assert_eq!(partial.vertex_connectivity, None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn property_lookup_covers_every_name() {
        let p = PropertySet::basic(&graph(false, 2, &[(0, 1)]));
        for name in ["node_count", "edge_count", "min_degree", "max_degree", "avg_degree"] {
            assert!(p.numeric(name).is_some(), "{name}");
        }
        assert!(NUMERIC_PROPERTIES.iter().all(|n| !BOOLEAN_PROPERTIES.contains(n)));
        assert_eq!(p.boolean("directed"), Some(false));
        assert_eq!(p.numeric("bogus"), None);
    }
}
