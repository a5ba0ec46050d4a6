//! Force-directed layout and SVG rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use chrono::{DateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::Graph;

pub const DEFAULT_ITERATIONS: usize = 500;
pub const ALGORITHM: &str = "fruchterman-reingold";
const CANVAS: f64 = 1000.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("layout does not match the graph: {0}")]
    LayoutMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub graph_id: Option<String>,
    /// Node id to `[x, y]`, both in `[0, 1]`.
    pub coordinates: BTreeMap<String, [f64; 2]>,
    pub algorithm: String,
    pub iterations: usize,
    pub seed: u64,
    pub computed_at: Option<DateTime<Utc>>,
}

/// Fruchterman-Reingold spring embedding in the unit square, normalized so the
/// drawing is centered and its larger side spans `[0, 1]`.
pub fn layout_force_directed(g: &Graph, iterations: usize, rng_seed: u64) -> Result<Layout, LayoutError> {
    if iterations == 0 {
        return Err(LayoutError::ZeroIterations);
    }
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    let edges: Vec<(usize, usize)> = g.simple_view().edges().collect();

    if n > 1 {
        let k = (1.0 / n as f64).sqrt();
        let t0 = 0.1;
        let mut disp = vec![[0.0f64; 2]; n];
        for it in 0..iterations {
            let temp = t0 * (1.0 - it as f64 / iterations as f64);
            disp.iter_mut().for_each(|d| *d = [0.0, 0.0]);
            for u in 0..n {
                for v in u + 1..n {
                    let dx = pos[u][0] - pos[v][0];
                    let dy = pos[u][1] - pos[v][1];
                    let d2 = (dx * dx + dy * dy).max(1e-12);
                    let f = k * k / d2;
                    disp[u][0] += dx * f;
                    disp[u][1] += dy * f;
                    disp[v][0] -= dx * f;
                    disp[v][1] -= dy * f;
                }
            }
            for &(u, v) in &edges {
                let dx = pos[u][0] - pos[v][0];
                let dy = pos[u][1] - pos[v][1];
                let d = (dx * dx + dy * dy).sqrt();
                let f = d / k;
                disp[u][0] -= dx * f;
                disp[u][1] -= dy * f;
                disp[v][0] += dx * f;
                disp[v][1] += dy * f;
            }
            for (p, d) in pos.iter_mut().zip(&disp) {
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if len > 0.0 {
                    let step = len.min(temp);
                    p[0] += d[0] / len * step;
                    p[1] += d[1] / len * step;
                }
            }
        }
    }

    normalize(&mut pos);
    Ok(Layout {
        graph_id: None,
        coordinates: g.nodes().iter().map(|node| node.id.clone()).zip(pos).collect(),
        algorithm: ALGORITHM.into(),
        iterations,
        seed: rng_seed,
        computed_at: None,
    })
}

fn normalize(pos: &mut [[f64; 2]]) {
    if pos.is_empty() {
        return;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pos.iter() {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    for p in pos.iter_mut() {
        for a in 0..2 {
            let centered = p[a] - (lo[a] + hi[a]) / 2.0;
            p[a] = if span > 0.0 && span.is_finite() {
                (0.5 + centered / span).clamp(0.0, 1.0)
            } else {
                0.5
            };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub node_radius: f64,
    pub edge_width: f64,
    pub labels: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            node_radius: 8.0,
            edge_width: 1.5,
            labels: false,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn px(v: f64) -> f64 {
    ((MARGIN + v * (CANVAS - 2.0 * MARGIN)) * 100.0).round() / 100.0
}

/// One `<circle>` per node and one `<line>` per edge (`<path>` for
/// self-loops); directed graphs get an arrowhead marker.
pub fn render_svg(g: &Graph, layout: &Layout, style: &SvgStyle) -> Result<String, LayoutError> {
    if layout.coordinates.len() != g.node_count() {
        return Err(LayoutError::LayoutMismatch(format!(
            "{} coordinates for {} nodes",
            layout.coordinates.len(),
            g.node_count()
        )));
    }
    let mut points = Vec::with_capacity(g.node_count());
    for node in g.nodes() {
        let [x, y] = layout
            .coordinates
            .get(&node.id)
            .ok_or_else(|| LayoutError::LayoutMismatch(format!("no coordinate for node {:?}", node.id)))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(LayoutError::LayoutMismatch(format!("non-finite coordinate for node {:?}", node.id)));
        }
        points.push((px(*x), px(*y)));
    }

    let r = style.node_radius;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n",
    );
    if g.is_directed() {
        out.push_str(
            "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#444\"/></marker></defs>\n",
        );
    }
    let marker = if g.is_directed() { " marker-end=\"url(#arrow)\"" } else { "" };
    let _ = writeln!(
        out,
        "  <g class=\"edges\" stroke=\"#444\" stroke-width=\"{}\" fill=\"none\">",
        style.edge_width
    );
    for (s, t) in g.edge_indices() {
        let (x1, y1) = points[s];
        let (x2, y2) = points[t];
        if s == t {
            let _ = writeln!(
                out,
                "    <path class=\"edge\" d=\"M {x1} {y} C {a} {b} {c} {b} {x1} {y}\"{marker}/>",
                y = y1 - r,
                a = x1 - 3.0 * r,
                b = y1 - 4.0 * r,
                c = x1 + 3.0 * r
            );
            continue;
        }
        let (mut ex, mut ey) = (x2, y2);
        if g.is_directed() {
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt();
            if len > r {
                ex = ((x2 - dx / len * r) * 100.0).round() / 100.0;
                ey = ((y2 - dy / len * r) * 100.0).round() / 100.0;
            }
        }
        let _ = writeln!(out, "    <line class=\"edge\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{ex}\" y2=\"{ey}\"{marker}/>");
    }
    out.push_str("  </g>\n");
    out.push_str("  <g class=\"nodes\" fill=\"#3b6ea5\" stroke=\"#1d3a5a\">\n");
    for (node, (x, y)) in g.nodes().iter().zip(&points) {
        let _ = writeln!(
            out,
            "    <circle class=\"node\" cx=\"{x}\" cy=\"{y}\" r=\"{r}\"><title>{}</title></circle>",
            escape(&node.id)
        );
    }
    out.push_str("  </g>\n");
    if style.labels {
        out.push_str("  <g class=\"labels\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">\n");
        for (node, (x, y)) in g.nodes().iter().zip(&points) {
            let _ = writeln!(
                out,
                "    <text x=\"{x}\" y=\"{}\">{}</text>",
                y - r - 4.0,
                escape(node.effective_label())
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
