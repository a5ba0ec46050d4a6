//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every function takes graph text and returns text, with errors as plain
//! messages, so the same functions are tested natively.

use oga_core::analysis::{analyze, AnalysisConfig, AnalysisError};
use oga_core::formats::{self, FormatId};
use oga_core::layout::{layout_force_directed, render_svg, SvgStyle};
use oga_core::Graph;
use wasm_bindgen::prelude::*;

/// Largest graph the demo will draw.
pub const MAX_DRAWN_NODES: usize = 2000;

fn format_arg(raw: &str, input: &str) -> Result<FormatId, String> {
    match raw {
        "" | "auto" => formats::detect_format(input.as_bytes()).map_err(|e| e.to_string()),
        other => other.parse().map_err(|_| format!("unknown format {other:?}")),
    }
}

fn read(input: &str, format: &str) -> Result<Graph, String> {
    let format = format_arg(format, input)?;
    formats::parse(input.as_bytes(), format).map_err(|e| e.to_string())
}

/// Converts `input` and returns `{"output": text, "losses": [...]}` as JSON.
/// `from` may be `auto`.
#[wasm_bindgen]
pub fn convert(input: &str, from: &str, to: &str) -> Result<String, String> {
    let g = read(input, from)?;
    let to: FormatId = to.parse().map_err(|_| format!("unknown format {to:?}"))?;
    let (bytes, report) = formats::serialize(&g, to).map_err(|e| e.to_string())?;
    let output = String::from_utf8(bytes).map_err(|e| e.to_string())?;
    let json = serde_json::json!({ "output": output, "losses": report.dropped_items });
    Ok(json.to_string())
}

/// Structural properties as pretty JSON.
#[wasm_bindgen(js_name = analyzeGraph)]
pub fn analyze_graph(input: &str, format: &str) -> Result<String, String> {
    let g = read(input, format)?;
    // no wall clock in the browser sandbox
    let cfg = AnalysisConfig {
        time_budget: None,
        ..AnalysisConfig::default()
    };
    let props = match analyze(&g, &cfg) {
        Ok(p) => p,
        Err(AnalysisError::TimeBudgetExceeded { partial }) => *partial,
        Err(e) => return Err(e.to_string()),
    };
    serde_json::to_string_pretty(&props).map_err(|e| e.to_string())
}

/// Force-directed drawing as an SVG document.
#[wasm_bindgen]
pub fn draw(input: &str, format: &str, iterations: usize, seed: u32) -> Result<String, String> {
    let g = read(input, format)?;
    if g.node_count() > MAX_DRAWN_NODES {
        return Err(format!("{} nodes; the demo draws at most {MAX_DRAWN_NODES}", g.node_count()));
    }
    let layout = layout_force_directed(&g, iterations, u64::from(seed)).map_err(|e| e.to_string())?;
    render_svg(&g, &layout, &SvgStyle::default()).map_err(|e| e.to_string())
}
