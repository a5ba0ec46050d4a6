//! DIMACS edge format: `c` comments, one `p edge <n> <m>` problem line,
//! `e <u> <v> [<weight>]` edges over nodes `1..=n`, and optional
//! `n <id> <value>` lines kept as the node attribute `value`.

use super::{positional_id_changes, FormatError, LossKind, LossReport, TextPos};
use crate::model::{Attrs, EdgeRecord, Graph, GraphParts, NodeRecord, Weight};

pub(super) const HEADER_COMMENT: &str = "c generated by the open graph archive";

/// Whitespace-separated tokens with their 1-based character columns.
pub(super) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = 0;
    let mut start_col = 0;
    for (i, c) in line.char_indices() {
        col += 1;
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((start_col, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
            start_col = col;
        }
    }
    if let Some(s) = start {
        out.push((start_col, &line[s..]));
    }
    out
}

fn parse_index(tok: (usize, &str), line: usize, n: usize, what: &str) -> Result<usize, FormatError> {
    let (col, text) = tok;
    match text.parse::<usize>() {
        Ok(v) if (1..=n).contains(&v) => Ok(v),
        _ => Err(FormatError::syntax(
            TextPos::at(line, col),
            format!("{what} {text:?} is not a node in 1..={n}"),
        )),
    }
}

pub(super) fn parse(text: &str) -> Result<Graph, FormatError> {
    let mut node_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut values: Vec<(usize, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokens(raw);
        let Some(&(col, kind)) = toks.first() else {
            continue;
        };
        let pos = TextPos::at(line_no, col);
        match kind {
            "c" => {}
            "p" => {
                if node_count.is_some() {
                    return Err(FormatError::syntax(pos, "duplicate problem line"));
                }
                if toks.len() != 4 || !matches!(toks[1].1, "edge" | "col") {
                    return Err(FormatError::syntax(pos, "expected `p edge <nodes> <edges>`"));
                }
                let n = toks[2].1.parse::<usize>().map_err(|_| {
                    FormatError::syntax(TextPos::at(line_no, toks[2].0), "node count is not an integer")
                })?;
                toks[3].1.parse::<usize>().map_err(|_| {
                    FormatError::syntax(TextPos::at(line_no, toks[3].0), "edge count is not an integer")
                })?;
                node_count = Some(n);
            }
            "e" => {
                let n = node_count.ok_or_else(|| FormatError::syntax(pos, "edge before problem line"))?;
                if !(3..=4).contains(&toks.len()) {
                    return Err(FormatError::syntax(pos, "expected `e <u> <v> [<weight>]`"));
                }
                let u = parse_index(toks[1], line_no, n, "endpoint")?;
                let v = parse_index(toks[2], line_no, n, "endpoint")?;
                let mut edge = EdgeRecord::new(u.to_string(), v.to_string());
                if let Some(&(wcol, w)) = toks.get(3) {
                    edge.weight = Some(Weight::new(w).map_err(|_| {
                        FormatError::syntax(TextPos::at(line_no, wcol), format!("weight {w:?} is not a number"))
                    })?);
                }
                edges.push(edge);
            }
            "n" => {
                let n = node_count.ok_or_else(|| FormatError::syntax(pos, "node line before problem line"))?;
                if toks.len() < 3 {
                    return Err(FormatError::syntax(pos, "expected `n <id> <value>`"));
                }
                let id = parse_index(toks[1], line_no, n, "node")?;
                let value_col = toks[2].0;
                let start = raw.char_indices().nth(value_col - 1).map_or(raw.len(), |(b, _)| b);
                values.push((id, raw[start..].trim_end().to_string()));
            }
            other => {
                return Err(FormatError::syntax(pos, format!("unknown line type {other:?}")));
            }
        }
    }

    let n = node_count.ok_or_else(|| {
        FormatError::syntax(TextPos::from_offset(text, text.len()), "missing `p edge` problem line")
    })?;
    let mut nodes: Vec<NodeRecord> = (1..=n).map(|i| NodeRecord::new(i.to_string())).collect();
    for (id, value) in values {
        nodes[id - 1].attrs.insert("value".into(), value);
    }
    Ok(GraphParts {
        directed: false,
        nodes,
        edges,
        graph_attrs: Attrs::new(),
    }
    .build()?)
}

fn value_representable(v: &str) -> bool {
    !v.is_empty() && v.trim() == v && !v.contains(['\n', '\r'])
}

pub(super) fn serialize(g: &Graph) -> Result<(String, LossReport), FormatError> {
    use std::fmt::Write;

    let mut report = LossReport::default();
    if g.is_directed() {
        report.add(LossKind::Directedness, g.edge_count(), "directed edges written as undirected");
    }
    report.add(LossKind::NodeId, positional_id_changes(g), "node ids replaced by positions 1..n");
    report.add(
        LossKind::NodeLabel,
        g.nodes().iter().filter(|n| n.label.is_some()).count(),
        "node labels dropped",
    );
    let node_attrs_lost: usize = g
        .nodes()
        .iter()
        .map(|n| {
            n.attrs
                .iter()
                .filter(|(k, v)| k.as_str() != "value" || !value_representable(v))
                .count()
        })
        .sum();
    report.add(LossKind::NodeAttribute, node_attrs_lost, "node attributes dropped");
    report.add(
        LossKind::EdgeLabel,
        g.edges().iter().filter(|e| e.label.is_some()).count(),
        "edge labels dropped",
    );
    report.add(
        LossKind::EdgeAttribute,
        g.edges().iter().map(|e| e.attrs.len()).sum(),
        "edge attributes dropped",
    );
    report.add(LossKind::GraphAttribute, g.graph_attrs().len(), "graph attributes dropped");

    let mut out = String::new();
    out.push_str(HEADER_COMMENT);
    out.push('\n');
    let _ = writeln!(out, "p edge {} {}", g.node_count(), g.edge_count());
    for (i, node) in g.nodes().iter().enumerate() {
        if let Some(v) = node.attrs.get("value").filter(|v| value_representable(v)) {
            let _ = writeln!(out, "n {} {}", i + 1, v);
        }
    }
    for ((s, t), e) in g.edge_indices().zip(g.edges()) {
        let _ = write!(out, "e {} {}", s + 1, t + 1);
        if let Some(w) = &e.weight {
            let _ = write!(out, " {w}");
        }
        out.push('\n');
    }
    Ok((out, report))
}
