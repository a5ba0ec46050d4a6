//! Parsers and serializers for GML, GraphML, DIMACS edge format and
//! Matrix Market coordinate files, plus format sniffing and conversion.
//!
//! Every parser produces the canonical [`Graph`]; every serializer returns
//! the bytes together with a [`LossReport`] naming exactly what the target
//! format could not carry.

mod dimacs;
mod gml;
mod graphml;
mod mtx;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Graph, ModelError};

pub use gml::is_gml_number;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("unknown or ambiguous format")]
    UnknownFormat,
    #[error("unrepresentable: {0}")]
    Unrepresentable(String),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid graph: {0}")]
    InvalidGraph(#[from] ModelError),
}

impl FormatError {
    pub(crate) fn syntax(pos: TextPos, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    /// Line/column of a syntax error, if positioned.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            FormatError::Syntax { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

/// 1-based line and column (column counted in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TextPos {
    pub line: usize,
    pub column: usize,
}

impl TextPos {
    pub fn at(line: usize, column: usize) -> Self {
        Self { line, column }
    }

    /// Position of byte offset `offset` within `text`.
    pub fn from_offset(text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let mut line = 1;
        let mut line_start = 0;
        for (i, b) in text.as_bytes()[..offset].iter().enumerate() {
            if *b == b'\n' {
                line += 1;
                line_start = i + 1;
            }
        }
        let prefix = &text.as_bytes()[line_start..offset];
        let column = String::from_utf8_lossy(prefix).chars().count() + 1;
        Self { line, column }
    }
}

pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str, FormatError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
        FormatError::syntax(
            TextPos::from_offset(valid, valid.len()),
            "input is not valid UTF-8",
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatId {
    Gml,
    #[serde(rename = "graphml")]
    GraphMl,
    Dimacs,
    MatrixMarket,
}

impl FormatId {
    pub const ALL: [FormatId; 4] = [
        FormatId::Gml,
        FormatId::GraphMl,
        FormatId::Dimacs,
        FormatId::MatrixMarket,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormatId::Gml => "gml",
            FormatId::GraphMl => "graphml",
            FormatId::Dimacs => "dimacs",
            FormatId::MatrixMarket => "matrix-market",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            FormatId::Gml => "gml",
            FormatId::GraphMl => "graphml",
            FormatId::Dimacs => "dimacs",
            FormatId::MatrixMarket => "mtx",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            FormatId::GraphMl => "application/xml",
            _ => "text/plain; charset=utf-8",
        }
    }

    /// Guess from a file name's extension.
    pub fn from_extension(name: &str) -> Option<FormatId> {
        let ext = name.rsplit_once('.')?.1.to_ascii_lowercase();
        match ext.as_str() {
            "gml" => Some(FormatId::Gml),
            "graphml" | "xml" => Some(FormatId::GraphMl),
            "dimacs" | "col" | "clq" => Some(FormatId::Dimacs),
            "mtx" | "mm" => Some(FormatId::MatrixMarket),
            _ => None,
        }
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormatId {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gml" => Ok(FormatId::Gml),
            "graphml" => Ok(FormatId::GraphMl),
            "dimacs" => Ok(FormatId::Dimacs),
            "matrix-market" | "matrixmarket" | "mtx" | "mm" => Ok(FormatId::MatrixMarket),
            _ => Err(FormatError::UnknownFormat),
        }
    }
}

/// Kind of information a conversion could not carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// Node ids were replaced by the format's positional ids.
    NodeId,
    NodeLabel,
    NodeAttribute,
    EdgeLabel,
    EdgeWeight,
    /// Unweighted edges were given weight `1` in a weighted matrix.
    EdgeWeightDefaulted,
    EdgeAttribute,
    GraphAttribute,
    /// Directed edges were written as undirected.
    Directedness,
    /// Parse-side: nested graphs flattened into the parent graph.
    NestedGraph,
    /// Parse-side: port references removed.
    Port,
    /// Parse-side: hyperedges removed.
    Hyperedge,
    /// Parse-side: per-edge direction overrides ignored.
    MixedDirectedness,
    /// Parse-side: additional graphs in the document ignored.
    ExtraGraph,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::NodeId => "node-id",
            LossKind::NodeLabel => "node-label",
            LossKind::NodeAttribute => "node-attribute",
            LossKind::EdgeLabel => "edge-label",
            LossKind::EdgeWeight => "edge-weight",
            LossKind::EdgeWeightDefaulted => "edge-weight-defaulted",
            LossKind::EdgeAttribute => "edge-attribute",
            LossKind::GraphAttribute => "graph-attribute",
            LossKind::Directedness => "directedness",
            LossKind::NestedGraph => "nested-graph",
            LossKind::Port => "port",
            LossKind::Hyperedge => "hyperedge",
            LossKind::MixedDirectedness => "mixed-directedness",
            LossKind::ExtraGraph => "extra-graph",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossItem {
    pub kind: LossKind,
    pub count: usize,
    pub message: String,
}

/// What a conversion dropped. Empty means lossless.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossReport {
    pub dropped_items: Vec<LossItem>,
}

impl LossReport {
    pub fn lossless(&self) -> bool {
        self.dropped_items.is_empty()
    }

    pub fn count(&self, kind: LossKind) -> usize {
        self.dropped_items
            .iter()
            .filter(|i| i.kind == kind)
            .map(|i| i.count)
            .sum()
    }

    pub fn contains(&self, kind: LossKind) -> bool {
        self.count(kind) > 0
    }

    /// Adds `count` items of `kind`, merging with an existing entry.
    pub(crate) fn add(&mut self, kind: LossKind, count: usize, what: &str) {
        if count == 0 {
            return;
        }
        if let Some(item) = self.dropped_items.iter_mut().find(|i| i.kind == kind) {
            item.count += count;
            item.message = format!("{} {what}", item.count);
        } else {
            self.dropped_items.push(LossItem {
                kind,
                count,
                message: format!("{count} {what}"),
            });
        }
    }

    pub fn merge(&mut self, other: LossReport) {
        for item in other.dropped_items {
            if let Some(existing) = self.dropped_items.iter_mut().find(|i| i.kind == item.kind) {
                existing.count += item.count;
            } else {
                self.dropped_items.push(item);
            }
        }
    }
}

impl fmt::Display for LossReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lossless() {
            return f.write_str("lossless");
        }
        for (i, item) in self.dropped_items.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", item.kind.as_str(), item.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject constructs outside the supported subset instead of flattening
    /// or dropping them.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { strict: true }
    }
}

impl ParseOptions {
    pub fn lenient() -> Self {
        Self { strict: false }
    }
}

/// Strict parse.
pub fn parse(bytes: &[u8], format: FormatId) -> Result<Graph, FormatError> {
    parse_with(bytes, format, ParseOptions::default()).map(|(g, _)| g)
}

/// Parse returning what lenient mode had to drop or flatten.
pub fn parse_with(
    bytes: &[u8],
    format: FormatId,
    options: ParseOptions,
) -> Result<(Graph, LossReport), FormatError> {
    if bytes.is_empty() {
        return Err(FormatError::EmptyInput);
    }
    let text = decode_utf8(bytes)?;
    match format {
        FormatId::Gml => gml::parse(text, options),
        FormatId::GraphMl => graphml::parse(text, options),
        FormatId::Dimacs => dimacs::parse(text).map(|g| (g, LossReport::default())),
        FormatId::MatrixMarket => mtx::parse(text).map(|g| (g, LossReport::default())),
    }
}

pub fn serialize(g: &Graph, format: FormatId) -> Result<(Vec<u8>, LossReport), FormatError> {
    let (text, report) = match format {
        FormatId::Gml => gml::serialize(g),
        FormatId::GraphMl => graphml::serialize(g),
        FormatId::Dimacs => dimacs::serialize(g),
        FormatId::MatrixMarket => mtx::serialize(g),
    }?;
    Ok((text.into_bytes(), report))
}

/// Identifies the format by its mandatory markers. Fails unless exactly
/// one format matches.
pub fn detect_format(bytes: &[u8]) -> Result<FormatId, FormatError> {
    if bytes.is_empty() {
        return Err(FormatError::UnknownFormat);
    }
    let head = &bytes[..bytes.len().min(64 * 1024)];
    let text = String::from_utf8_lossy(head);
    let text = text.trim_start_matches('\u{feff}');

    let mut matches = Vec::new();
    if text.trim_start().starts_with("%%MatrixMarket") {
        matches.push(FormatId::MatrixMarket);
    }
    if sniff_graphml(text) {
        matches.push(FormatId::GraphMl);
    }
    if text.lines().any(|l| l.trim_start().starts_with("p ")) && sniff_dimacs(text) {
        matches.push(FormatId::Dimacs);
    }
    if sniff_gml(text) {
        matches.push(FormatId::Gml);
    }
    match matches.as_slice() {
        [one] => Ok(*one),
        _ => Err(FormatError::UnknownFormat),
    }
}

fn sniff_graphml(text: &str) -> bool {
    let trimmed = text.trim_start();
    trimmed.starts_with('<') && text.contains("<graphml")
}

fn sniff_dimacs(text: &str) -> bool {
    // every non-blank line before the problem line must be a comment
    for line in text.lines() {
        let l = line.trim_start();
        if l.is_empty() || l.starts_with('c') {
            continue;
        }
        return l.starts_with("p ");
    }
    false
}

fn sniff_gml(text: &str) -> bool {
    let mut rest = text;
    // skip comments and scalar preamble keys such as `Creator "..."`
    loop {
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix('#') {
            rest = after.split_once('\n').map_or("", |(_, r)| r);
            continue;
        }
        if let Some(after) = rest.strip_prefix("graph") {
            return after.trim_start().starts_with('[');
        }
        let key_len = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        if key_len == 0 || !rest.as_bytes()[0].is_ascii_alphabetic() {
            return false;
        }
        let value = rest[key_len..].trim_start();
        if let Some(quoted) = value.strip_prefix('"') {
            match quoted.find('"') {
                Some(end) => rest = &quoted[end + 1..],
                None => return false,
            }
        } else {
            let len = value
                .bytes()
                .take_while(|b| !b.is_ascii_whitespace())
                .count();
            if len == 0 || !is_gml_number(&value[..len]) {
                return false;
            }
            rest = &value[len..];
        }
    }
}

/// `serialize(parse(bytes, from), to)`.
pub fn convert(
    bytes: &[u8],
    from: FormatId,
    to: FormatId,
) -> Result<(Vec<u8>, LossReport), FormatError> {
    let g = parse(bytes, from)?;
    serialize(&g, to)
}

/// Renames nodes to `1..=n` in order; used by the positional formats.
/// Returns the number of nodes whose id changed.
pub(crate) fn positional_id_changes(g: &Graph) -> usize {
    g.nodes()
        .iter()
        .enumerate()
        .filter(|(i, n)| n.id != (i + 1).to_string())
        .count()
}
