//! Independent accounting of what a format round trip changed, compared
//! against the writer's loss report, plus a random graph source with awkward
//! identifiers and attribute values.

use oga_core::formats::{LossKind, LossReport};
use oga_core::model::{build_graph, Attrs, EdgeRecord, Graph, NodeRecord, Weight};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const ALL_KINDS: [LossKind; 14] = [
    LossKind::NodeId,
    LossKind::NodeLabel,
    LossKind::NodeAttribute,
    LossKind::EdgeLabel,
    LossKind::EdgeWeight,
    LossKind::EdgeWeightDefaulted,
    LossKind::EdgeAttribute,
    LossKind::GraphAttribute,
    LossKind::Directedness,
    LossKind::NestedGraph,
    LossKind::Port,
    LossKind::Hyperedge,
    LossKind::MixedDirectedness,
    LossKind::ExtraGraph,
];

fn attr_drops(before: &Attrs, after: &Attrs, what: &str) -> Result<usize, String> {
    if let Some(k) = after.keys().find(|k| !before.contains_key(*k)) {
        return Err(format!("{what}: attribute {k:?} appeared"));
    }
    Ok(before.iter().filter(|(k, v)| after.get(*k) != Some(*v)).count())
}

fn label_drops(before: &Option<String>, after: &Option<String>, what: &str) -> Result<usize, String> {
    match (before, after) {
        (a, b) if a == b => Ok(0),
        (Some(_), None) => Ok(1),
        _ => Err(format!("{what}: label changed from {before:?} to {after:?}")),
    }
}

/// Counts every difference between `original` and `reparsed` by loss kind and
/// checks the counts against `report`. Any difference the report does not
/// account for, or any reported loss that did not happen, is an error.
pub fn check_round_trip(original: &Graph, reparsed: &Graph, report: &LossReport) -> Result<(), String> {
    let mut seen = std::collections::HashMap::<LossKind, usize>::new();
    let mut bump = |k: LossKind, c: usize| *seen.entry(k).or_default() += c;

    match (original.is_directed(), reparsed.is_directed()) {
        (a, b) if a == b => {}
        (true, false) => bump(LossKind::Directedness, original.edge_count()),
        _ => return Err("undirected graph came back directed".into()),
    }
    if original.node_count() != reparsed.node_count() {
        return Err(format!("node count {} -> {}", original.node_count(), reparsed.node_count()));
    }
    for (i, (a, b)) in original.nodes().iter().zip(reparsed.nodes()).enumerate() {
        let what = format!("node {i}");
        bump(LossKind::NodeId, usize::from(a.id != b.id));
        bump(LossKind::NodeLabel, label_drops(&a.label, &b.label, &what)?);
        bump(LossKind::NodeAttribute, attr_drops(&a.attrs, &b.attrs, &what)?);
    }
    if original.edge_count() != reparsed.edge_count() {
        return Err(format!("edge count {} -> {}", original.edge_count(), reparsed.edge_count()));
    }
    let ends_a: Vec<_> = original.edge_indices().collect();
    let ends_b: Vec<_> = reparsed.edge_indices().collect();
    for (i, (a, b)) in original.edges().iter().zip(reparsed.edges()).enumerate() {
        let what = format!("edge {i}");
        let ((s, t), (s2, t2)) = (ends_a[i], ends_b[i]);
        let same = (s, t) == (s2, t2) || (!reparsed.is_directed() && (s, t) == (t2, s2));
        if !same {
            return Err(format!("{what}: endpoints {:?} -> {:?}", (s, t), (s2, t2)));
        }
        bump(LossKind::EdgeLabel, label_drops(&a.label, &b.label, &what)?);
        match (&a.weight, &b.weight) {
            (x, y) if x == y => {}
            (Some(_), None) => bump(LossKind::EdgeWeight, 1),
            (None, Some(w)) if w.value() == 1.0 => bump(LossKind::EdgeWeightDefaulted, 1),
            (x, y) => return Err(format!("{what}: weight {x:?} -> {y:?}")),
        }
        bump(LossKind::EdgeAttribute, attr_drops(&a.attrs, &b.attrs, &what)?);
    }
    bump(
        LossKind::GraphAttribute,
        attr_drops(original.graph_attrs(), reparsed.graph_attrs(), "graph")?,
    );

    for kind in ALL_KINDS {
        let observed = seen.get(&kind).copied().unwrap_or(0);
        if observed != report.count(kind) {
            return Err(format!(
                "{kind:?}: observed {observed} differences, report declares {}",
                report.count(kind)
            ));
        }
    }
    Ok(())
}

const AWKWARD: &[&str] = &[
    "plain", "with space", "quote\"d", "apos'", "amp&er", "<tag>", "tab\tbed", "new\nline", "ünïcødé", "#hash",
    "[bracket]", "  padded ", "", "0", "-3.5e2", "1e400", "x,y", "%percent", "\\back", "c comment",
];

const KEYS: &[&str] = &["color", "x", "y", "kind", "value", "id", "label", "weight", "a.b", "UPPER", "with space", "_u", "9lives"];

fn text(rng: &mut impl Rng) -> String {
    if rng.random_bool(0.5) {
        AWKWARD.choose(rng).unwrap().to_string()
    } else {
        format!("v{}", rng.random_range(0..1000))
    }
}

fn attrs(rng: &mut impl Rng, p: f64) -> Attrs {
    let mut out = Attrs::new();
    while rng.random_bool(p) {
        out.insert(KEYS.choose(rng).unwrap().to_string(), text(rng));
    }
    out
}

fn weight(rng: &mut impl Rng) -> Weight {
    match rng.random_range(0..4) {
        0 => Weight::new(rng.random_range(-50i64..50).to_string()).unwrap(),
        1 => Weight::from_f64(rng.random_range(-10.0..10.0)),
        2 => Weight::new("2.50").unwrap(),
        _ => Weight::new("1e-3").unwrap(),
    }
}

/// Random multigraph with `n` nodes: mixed id styles, optional labels,
/// attributes, weights, loops and parallel edges.
pub fn random_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let directed = rng.random_bool(0.5);
    let id_style = rng.random_range(0..3);
    let rich = rng.random_bool(0.7);
    let nodes: Vec<NodeRecord> = (0..n)
        .map(|i| {
            let id = match id_style {
                0 => (i + 1).to_string(),
                1 => i.to_string(),
                _ => format!("{}#{i}", text(rng)),
            };
            let mut node = NodeRecord::new(id);
            if rich && rng.random_bool(0.5) {
                node.label = Some(text(rng));
            }
            if rich {
                node.attrs = attrs(rng, 0.3);
            }
            node
        })
        .collect();
    let m = rng.random_range(0..=(2 * n).min(400));
    let weighted = rng.random_range(0..3);
    let edges: Vec<EdgeRecord> = (0..m)
        .map(|_| {
            let s = rng.random_range(0..n);
            let t = if rng.random_bool(0.05) { s } else { rng.random_range(0..n) };
            let mut e = EdgeRecord::new(nodes[s].id.clone(), nodes[t].id.clone());
            if weighted == 1 || (weighted == 2 && rng.random_bool(0.5)) {
                e.weight = Some(weight(rng));
            }
            if rich && rng.random_bool(0.2) {
                e.label = Some(text(rng));
            }
            if rich {
                e.attrs = attrs(rng, 0.2);
            }
            e
        })
        .collect();
    let g = build_graph(directed, nodes, edges).expect("ids are unique");
    if rich {
        g.clone().with_graph_attrs(attrs(rng, 0.4))
    } else {
        g
    }
}
