//! Matrix Market coordinate format with `real|integer|pattern` fields and
//! `general|symmetric` symmetry.
//!
//! Square `general` matrices become directed graphs over nodes `1..=n`,
//! `symmetric` ones undirected graphs. A rectangular matrix becomes a
//! directed bipartite graph from row nodes `r<i>` to column nodes `c<j>`.
//! Diagonal entries are self-loops; repeated entries are parallel edges.

use std::fmt::Write;

use super::dimacs::tokens;
use super::{positional_id_changes, FormatError, LossKind, LossReport, TextPos};
use crate::model::{Attrs, EdgeRecord, Graph, GraphParts, NodeRecord, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

impl Field {
    fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Integer => "integer",
            Field::Pattern => "pattern",
        }
    }
}

pub(super) fn parse(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().unwrap_or((1, ""));
    let head: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if head.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(FormatError::syntax(TextPos::at(1, 1), "missing %%MatrixMarket banner"));
    }
    if head.len() != 5 || head[1] != "matrix" {
        return Err(FormatError::syntax(
            TextPos::at(1, 1),
            "banner must read `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    if head[2] != "coordinate" {
        return Err(FormatError::UnsupportedConstruct(format!("matrix market format {:?}", head[2])));
    }
    let field = match head[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(FormatError::UnsupportedConstruct(format!("matrix market field {other:?}"))),
    };
    let symmetric = match head[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(FormatError::UnsupportedConstruct(format!("matrix market symmetry {other:?}"))),
    };

    let mut content = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });
    let Some((size_line, size_text)) = content.next() else {
        return Err(FormatError::syntax(TextPos::from_offset(text, text.len()), "missing size line"));
    };
    let size = tokens(size_text);
    if size.len() != 3 {
        return Err(FormatError::syntax(
            TextPos::at(size_line, size.first().map_or(1, |t| t.0)),
            "size line must be `<rows> <cols> <entries>`",
        ));
    }
    let mut dims = [0usize; 3];
    for (slot, (col, tok)) in dims.iter_mut().zip(&size) {
        *slot = tok
            .parse()
            .map_err(|_| FormatError::syntax(TextPos::at(size_line, *col), format!("{tok:?} is not a count")))?;
    }
    let [rows, cols, entries] = dims;
    if symmetric && rows != cols {
        return Err(FormatError::syntax(
            TextPos::at(size_line, size[0].0),
            "symmetric matrix must be square",
        ));
    }
    let square = rows == cols;
    let nodes: Vec<NodeRecord> = if square {
        (1..=rows).map(|i| NodeRecord::new(i.to_string())).collect()
    } else {
        (1..=rows)
            .map(|i| NodeRecord::new(format!("r{i}")))
            .chain((1..=cols).map(|j| NodeRecord::new(format!("c{j}"))))
            .collect()
    };

    let expected_tokens = if field == Field::Pattern { 2 } else { 3 };
    let mut edges = Vec::with_capacity(entries);
    for (line_no, line) in content {
        let toks = tokens(line);
        if edges.len() == entries {
            return Err(FormatError::syntax(
                TextPos::at(line_no, toks[0].0),
                format!("more entries than the declared {entries}"),
            ));
        }
        if toks.len() != expected_tokens {
            return Err(FormatError::syntax(
                TextPos::at(line_no, toks[0].0),
                format!("expected {expected_tokens} values for a {} entry", field.as_str()),
            ));
        }
        let index = |k: usize, bound: usize| -> Result<usize, FormatError> {
            let (col, tok) = toks[k];
            match tok.parse::<usize>() {
                Ok(v) if (1..=bound).contains(&v) => Ok(v),
                _ => Err(FormatError::syntax(
                    TextPos::at(line_no, col),
                    format!("index {tok:?} outside 1..={bound}"),
                )),
            }
        };
        let i = index(0, rows)?;
        let j = index(1, cols)?;
        let (source, target) = if square {
            (i.to_string(), j.to_string())
        } else {
            (format!("r{i}"), format!("c{j}"))
        };
        let mut edge = EdgeRecord::new(source, target);
        if field != Field::Pattern {
            let (col, tok) = toks[2];
            let w = Weight::new(tok)
                .ok()
                .filter(|w| field == Field::Real || w.is_integer())
                .ok_or_else(|| {
                    FormatError::syntax(
                        TextPos::at(line_no, col),
                        format!("{tok:?} is not a valid {} value", field.as_str()),
                    )
                })?;
            edge.weight = Some(w);
        }
        edges.push(edge);
    }
    if edges.len() != entries {
        return Err(FormatError::syntax(
            TextPos::from_offset(text, text.len()),
            format!("declared {entries} entries but found {}", edges.len()),
        ));
    }
    Ok(GraphParts {
        directed: !symmetric,
        nodes,
        edges,
        graph_attrs: Attrs::new(),
    }
    .build()?)
}

/// Row/column counts when the graph has exactly the rectangular bipartite
/// shape this codec produces.
fn rectangular_shape(g: &Graph) -> Option<(usize, usize)> {
    if !g.is_directed() {
        return None;
    }
    let rows = g
        .nodes()
        .iter()
        .take_while(|n| n.id.starts_with('r'))
        .count();
    let cols = g.node_count() - rows;
    if rows == 0 || cols == 0 || rows == cols {
        return None;
    }
    let ids_ok = g.nodes()[..rows]
        .iter()
        .enumerate()
        .all(|(i, n)| n.id == format!("r{}", i + 1))
        && g.nodes()[rows..]
            .iter()
            .enumerate()
            .all(|(j, n)| n.id == format!("c{}", j + 1));
    let edges_ok = g.edge_indices().all(|(s, t)| s < rows && t >= rows);
    (ids_ok && edges_ok).then_some((rows, cols))
}

pub(super) fn serialize(g: &Graph) -> Result<(String, LossReport), FormatError> {
    let mut report = LossReport::default();
    let shape = rectangular_shape(g);
    if shape.is_none() {
        report.add(LossKind::NodeId, positional_id_changes(g), "node ids replaced by positions 1..n");
    }
    report.add(
        LossKind::NodeLabel,
        g.nodes().iter().filter(|n| n.label.is_some()).count(),
        "node labels dropped",
    );
    report.add(
        LossKind::NodeAttribute,
        g.nodes().iter().map(|n| n.attrs.len()).sum(),
        "node attributes dropped",
    );
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

    let weighted = g.edges().iter().filter(|e| e.weight.is_some()).count();
    let field = if weighted == 0 {
        Field::Pattern
    } else if g
        .edges()
        .iter()
        .all(|e| e.weight.as_ref().is_none_or(Weight::is_integer))
    {
        Field::Integer
    } else {
        Field::Real
    };
    if field != Field::Pattern {
        report.add(
            LossKind::EdgeWeightDefaulted,
            g.edge_count() - weighted,
            "unweighted edges written with weight 1",
        );
    }

    let symmetry = if g.is_directed() { "general" } else { "symmetric" };
    let (rows, cols) = shape.unwrap_or((g.node_count(), g.node_count()));
    let mut out = String::new();
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {} {symmetry}", field.as_str());
    out.push_str("% generated by the open graph archive\n");
    let _ = writeln!(out, "{rows} {cols} {}", g.edge_count());
    for ((s, t), e) in g.edge_indices().zip(g.edges()) {
        let (i, j) = match shape {
            Some((rows, _)) => (s + 1, t - rows + 1),
            // symmetric storage uses the lower triangle
            None if !g.is_directed() && s < t => (t + 1, s + 1),
            None => (s + 1, t + 1),
        };
        let _ = write!(out, "{i} {j}");
        if field != Field::Pattern {
            let w = e.weight.as_ref().map_or("1", Weight::as_str);
            let _ = write!(out, " {w}");
        }
        out.push('\n');
    }
    Ok((out, report))
}
