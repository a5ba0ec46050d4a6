//! GraphML without nested graphs, ports or hyperedges. In lenient mode
//! nested graphs are flattened into the top-level graph and ports,
//! hyperedges and per-edge direction overrides are dropped with a loss
//! report; strict mode rejects them.
//!
//! `<data>` values are attached by the key's `attr.name` (the key id when no
//! name is declared). `label` on nodes and edges and `weight` on edges map
//! to the model fields; key defaults are materialized on elements lacking a
//! value.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{FormatError, LossKind, LossReport, ParseOptions, TextPos};
use crate::model::{EdgeRecord, Graph, GraphParts, NodeRecord, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Node,
    Edge,
    Graph,
    All,
    Other,
}

#[derive(Debug)]
struct KeyDef {
    domain: Domain,
    name: String,
    default: Option<String>,
}

#[derive(Debug, Clone, Copy)]
enum Owner {
    Graph,
    Node(usize),
    Edge(usize),
}

#[derive(Debug)]
enum Ctx {
    Root,
    Key(String),
    KeyDefault(String, String),
    Graph { nested: bool },
    Node(usize),
    Edge(usize),
    Data { owner: Option<Owner>, key: String, text: String },
    Skip,
}

struct State<'a> {
    text: &'a str,
    strict: bool,
    report: LossReport,
    keys: HashMap<String, KeyDef>,
    key_order: Vec<String>,
    directed: Option<bool>,
    seen_graph: bool,
    parts: GraphParts,
}

fn attr_map(e: &BytesStart<'_>, text: &str, pos: usize) -> Result<HashMap<String, String>, FormatError> {
    let mut out = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| {
            FormatError::syntax(TextPos::from_offset(text, pos), format!("malformed attribute: {err}"))
        })?;
        let value = attr
            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .map_err(|err| FormatError::syntax(TextPos::from_offset(text, pos), err.to_string()))?;
        let key = attr.key.local_name().as_ref().to_string();
        out.insert(key, value.into_owned());
    }
    Ok(out)
}

impl State<'_> {
    fn err(&self, offset: usize, msg: impl Into<String>) -> FormatError {
        FormatError::syntax(TextPos::from_offset(self.text, offset), msg)
    }

    fn unsupported(&mut self, what: &str, kind: LossKind, note: &str) -> Result<(), FormatError> {
        if self.strict {
            return Err(FormatError::UnsupportedConstruct(what.to_string()));
        }
        self.report.add(kind, 1, note);
        Ok(())
    }

    fn start(&mut self, stack: &[Ctx], e: &BytesStart<'_>, pos: usize) -> Result<Ctx, FormatError> {
        let name = e.local_name();
        let name = name.as_ref();
        let top = stack.last();
        let ctx = match (top, name) {
            (None, "graphml") => Ctx::Root,
            (None, other) => return Err(self.err(pos, format!("root element must be <graphml>, found <{other}>"))),
            (Some(Ctx::Root), "key") => {
                let attrs = attr_map(e, self.text, pos)?;
                let id = attrs
                    .get("id")
                    .cloned()
                    .ok_or_else(|| self.err(pos, "<key> without id"))?;
                let domain = match attrs.get("for").map(String::as_str) {
                    Some("node") => Domain::Node,
                    Some("edge") => Domain::Edge,
                    Some("graph") => Domain::Graph,
                    Some("all") | None => Domain::All,
                    Some(_) => Domain::Other,
                };
                let name = attrs.get("attr.name").cloned().unwrap_or_else(|| id.clone());
                if !self.keys.contains_key(&id) {
                    self.key_order.push(id.clone());
                }
                self.keys.insert(id.clone(), KeyDef { domain, name, default: None });
                Ctx::Key(id)
            }
            (Some(Ctx::Key(id)), "default") => Ctx::KeyDefault(id.clone(), String::new()),
            (Some(Ctx::Root), "graph") => {
                if self.seen_graph {
                    self.unsupported("multiple graphs in one GraphML document", LossKind::ExtraGraph, "additional graphs ignored")?;
                    Ctx::Skip
                } else {
                    self.seen_graph = true;
                    let attrs = attr_map(e, self.text, pos)?;
                    self.directed = Some(match attrs.get("edgedefault").map(String::as_str) {
                        Some("directed") => true,
                        Some("undirected") | None => false,
                        Some(other) => return Err(self.err(pos, format!("invalid edgedefault {other:?}"))),
                    });
                    self.parts.directed = self.directed.unwrap_or(false);
                    Ctx::Graph { nested: false }
                }
            }
            (Some(Ctx::Graph { .. }), "node") => {
                let attrs = attr_map(e, self.text, pos)?;
                let id = attrs.get("id").cloned().ok_or_else(|| self.err(pos, "<node> without id"))?;
                self.parts.nodes.push(NodeRecord::new(id));
                Ctx::Node(self.parts.nodes.len() - 1)
            }
            (Some(Ctx::Graph { .. }), "edge") => {
                let mut attrs = attr_map(e, self.text, pos)?;
                let source = attrs.remove("source").ok_or_else(|| self.err(pos, "<edge> without source"))?;
                let target = attrs.remove("target").ok_or_else(|| self.err(pos, "<edge> without target"))?;
                if let Some(d) = attrs.get("directed") {
                    let d = match d.as_str() {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        other => return Err(self.err(pos, format!("invalid directed value {other:?}"))),
                    };
                    if Some(d) != self.directed {
                        self.unsupported(
                            "edge direction differing from edgedefault",
                            LossKind::MixedDirectedness,
                            "edge direction overrides ignored",
                        )?;
                    }
                }
                if attrs.contains_key("sourceport") || attrs.contains_key("targetport") {
                    self.unsupported("edge port references", LossKind::Port, "port references dropped")?;
                }
                let mut edge = EdgeRecord::new(source, target);
                if let Some(id) = attrs.remove("id") {
                    edge.attrs.insert("id".into(), id);
                }
                self.parts.edges.push(edge);
                Ctx::Edge(self.parts.edges.len() - 1)
            }
            (Some(Ctx::Graph { .. }), "hyperedge") => {
                self.unsupported("hyperedges", LossKind::Hyperedge, "hyperedges dropped")?;
                Ctx::Skip
            }
            (Some(Ctx::Node(_)), "graph") => {
                self.unsupported("nested graphs", LossKind::NestedGraph, "nested graphs flattened")?;
                Ctx::Graph { nested: true }
            }
            (Some(Ctx::Node(_)), "port") => {
                self.unsupported("ports", LossKind::Port, "ports dropped")?;
                Ctx::Skip
            }
            (Some(Ctx::Graph { nested }), "data") => {
                let owner = (!nested).then_some(Owner::Graph);
                if *nested {
                    self.report.add(LossKind::GraphAttribute, 1, "nested graph attributes dropped");
                }
                self.data_ctx(e, pos, owner)?
            }
            (Some(Ctx::Node(i)), "data") => self.data_ctx(e, pos, Some(Owner::Node(*i)))?,
            (Some(Ctx::Edge(i)), "data") => self.data_ctx(e, pos, Some(Owner::Edge(*i)))?,
            (Some(Ctx::Data { owner, .. }), _) => {
                let kind = match owner {
                    Some(Owner::Node(_)) => LossKind::NodeAttribute,
                    Some(Owner::Edge(_)) => LossKind::EdgeAttribute,
                    _ => LossKind::GraphAttribute,
                };
                self.unsupported("structured <data> content", kind, "markup inside data values dropped")?;
                Ctx::Skip
            }
            _ => Ctx::Skip,
        };
        Ok(ctx)
    }

    fn data_ctx(&self, e: &BytesStart<'_>, pos: usize, owner: Option<Owner>) -> Result<Ctx, FormatError> {
        let attrs = attr_map(e, self.text, pos)?;
        let key = attrs.get("key").cloned().ok_or_else(|| self.err(pos, "<data> without key"))?;
        Ok(Ctx::Data {
            owner,
            key,
            text: String::new(),
        })
    }

    fn key_name<'k>(&'k self, key: &'k str) -> &'k str {
        self.keys.get(key).map_or(key, |k| k.name.as_str())
    }

    fn assign(&mut self, owner: Owner, key: &str, value: String) {
        let name = self.key_name(key).to_string();
        match owner {
            Owner::Graph => {
                self.parts.graph_attrs.insert(name, value);
            }
            Owner::Node(i) => {
                let node = &mut self.parts.nodes[i];
                if name == "label" {
                    node.label = Some(value);
                } else {
                    node.attrs.insert(name, value);
                }
            }
            Owner::Edge(i) => {
                let edge = &mut self.parts.edges[i];
                match name.as_str() {
                    "label" => edge.label = Some(value),
                    "weight" => match Weight::new(value.clone()) {
                        Ok(w) => edge.weight = Some(w),
                        Err(_) => {
                            edge.attrs.insert(name, value);
                        }
                    },
                    _ => {
                        edge.attrs.insert(name, value);
                    }
                }
            }
        }
    }

    fn apply_defaults(&mut self) {
        for id in self.key_order.clone() {
            let key = &self.keys[&id];
            let Some(default) = key.default.clone() else {
                continue;
            };
            let name = key.name.clone();
            let domain = key.domain;
            if matches!(domain, Domain::Node | Domain::All) {
                for i in 0..self.parts.nodes.len() {
                    let n = &self.parts.nodes[i];
                    let missing = if name == "label" {
                        n.label.is_none()
                    } else {
                        !n.attrs.contains_key(&name)
                    };
                    if missing {
                        self.assign(Owner::Node(i), &id, default.clone());
                    }
                }
            }
            if matches!(domain, Domain::Edge | Domain::All) {
                for i in 0..self.parts.edges.len() {
                    let e = &self.parts.edges[i];
                    let missing = match name.as_str() {
                        "label" => e.label.is_none(),
                        "weight" => e.weight.is_none() && !e.attrs.contains_key("weight"),
                        _ => !e.attrs.contains_key(&name),
                    };
                    if missing {
                        self.assign(Owner::Edge(i), &id, default.clone());
                    }
                }
            }
            if matches!(domain, Domain::Graph | Domain::All) && !self.parts.graph_attrs.contains_key(&name) {
                self.assign(Owner::Graph, &id, default);
            }
        }
    }
}

pub(super) fn parse(text: &str, options: ParseOptions) -> Result<(Graph, LossReport), FormatError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().expand_empty_elements = true;
    let mut state = State {
        text,
        strict: options.strict,
        report: LossReport::default(),
        keys: HashMap::new(),
        key_order: Vec::new(),
        directed: None,
        seen_graph: false,
        parts: GraphParts::default(),
    };
    let mut stack: Vec<Ctx> = Vec::new();
    let mut finished_root = false;

    loop {
        let pos = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|err| state.err(reader.error_position() as usize, err.to_string()))?;
        match event {
            Event::Start(e) => {
                if finished_root {
                    return Err(state.err(pos, "content after the root element"));
                }
                let ctx = if matches!(stack.last(), Some(Ctx::Skip)) {
                    Ctx::Skip
                } else {
                    state.start(&stack, &e, pos)?
                };
                stack.push(ctx);
            }
            Event::End(_) => match stack.pop() {
                Some(Ctx::Data { owner, key, text }) => {
                    if let Some(owner) = owner {
                        state.assign(owner, &key, text);
                    }
                }
                Some(Ctx::KeyDefault(id, value)) => {
                    if let Some(k) = state.keys.get_mut(&id) {
                        k.default = Some(value);
                    }
                }
                Some(Ctx::Root) => finished_root = true,
                Some(_) => {}
                None => return Err(state.err(pos, "unexpected closing tag")),
            },
            Event::Text(t) => {
                let content = t.xml10_content();
                let allowed = content.trim().is_empty() || matches!(stack.last(), Some(Ctx::Skip));
                push_text(&mut stack, &content, allowed)
                .map_err(|_| state.err(pos, "unexpected text content"))?;
            }
            Event::CData(c) => {
                let content = c.into_inner();
                push_text(&mut stack, &content, true).map_err(|_| state.err(pos, "unexpected CDATA"))?;
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(ch)) => ch.to_string(),
                    Ok(None) => resolve_predefined_entity(&r)
                        .map(str::to_string)
                        .ok_or_else(|| state.err(pos, format!("unknown entity &{};", &*r)))?,
                    Err(err) => return Err(state.err(pos, err.to_string())),
                };
                push_text(&mut stack, &resolved, true).map_err(|_| state.err(pos, "unexpected entity"))?;
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() || !finished_root {
        return Err(state.err(text.len(), "unexpected end of document"));
    }
    if !state.seen_graph {
        return Err(state.err(text.len(), "document contains no <graph>"));
    }
    state.apply_defaults();
    let report = state.report;
    Ok((state.parts.build()?, report))
}

/// Appends character data to the innermost value being collected.
/// Non-whitespace text in structural elements is rejected.
fn push_text(stack: &mut [Ctx], content: &str, allowed: bool) -> Result<(), ()> {
    match stack.last_mut() {
        Some(Ctx::Data { text, .. }) | Some(Ctx::KeyDefault(_, text)) => {
            text.push_str(content);
            Ok(())
        }
        _ if allowed => Ok(()),
        _ => Err(()),
    }
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

pub(super) fn serialize(g: &Graph) -> Result<(String, LossReport), FormatError> {
    let mut report = LossReport::default();

    // (domain, attr.name) -> key id, assigned in sorted order
    let mut names: BTreeMap<(&str, &str), &str> = BTreeMap::new();
    let mut node_lost = 0;
    let mut edge_lost = 0;
    for (k, _) in g.graph_attrs() {
        names.insert(("graph", k.as_str()), "string");
    }
    for n in g.nodes() {
        if n.label.is_some() {
            names.insert(("node", "label"), "string");
        }
        for k in n.attrs.keys() {
            if k == "label" {
                node_lost += 1;
            } else {
                names.insert(("node", k.as_str()), "string");
            }
        }
    }
    for e in g.edges() {
        if e.label.is_some() {
            names.insert(("edge", "label"), "string");
        }
        if e.weight.is_some() {
            names.insert(("edge", "weight"), "double");
        }
        for (k, v) in &e.attrs {
            match k.as_str() {
                "id" => {}
                "label" => edge_lost += 1,
                "weight" if e.weight.is_some() || Weight::new(v.clone()).is_ok() => edge_lost += 1,
                "weight" => {
                    names.entry(("edge", "weight")).or_insert("string");
                }
                _ => {
                    names.insert(("edge", k.as_str()), "string");
                }
            }
        }
    }
    report.add(LossKind::NodeAttribute, node_lost, "node attributes clashing with the label field dropped");
    report.add(LossKind::EdgeAttribute, edge_lost, "edge attributes clashing with label/weight fields dropped");

    let key_ids: BTreeMap<(&str, &str), String> = names
        .keys()
        .enumerate()
        .map(|(i, k)| (*k, format!("d{i}")))
        .collect();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for ((domain, name), ty) in &names {
        let _ = writeln!(
            out,
            "  <key id=\"{}\" for=\"{domain}\" attr.name=\"{}\" attr.type=\"{ty}\"/>",
            key_ids[&(*domain, *name)],
            escape_attr(name)
        );
    }
    let edgedefault = if g.is_directed() { "directed" } else { "undirected" };
    let _ = writeln!(out, "  <graph id=\"G\" edgedefault=\"{edgedefault}\">");
    let data = |out: &mut String, indent: &str, domain: &str, name: &str, value: &str| {
        let _ = writeln!(
            out,
            "{indent}<data key=\"{}\">{}</data>",
            key_ids[&(domain, name)],
            escape_text(value)
        );
    };
    for (k, v) in g.graph_attrs() {
        data(&mut out, "    ", "graph", k, v);
    }
    for n in g.nodes() {
        let fields: Vec<(&str, &str)> = n
            .label
            .as_deref()
            .map(|l| ("label", l))
            .into_iter()
            .chain(
                n.attrs
                    .iter()
                    .filter(|(k, _)| k.as_str() != "label")
                    .map(|(k, v)| (k.as_str(), v.as_str())),
            )
            .collect();
        if fields.is_empty() {
            let _ = writeln!(out, "    <node id=\"{}\"/>", escape_attr(&n.id));
            continue;
        }
        let _ = writeln!(out, "    <node id=\"{}\">", escape_attr(&n.id));
        for (k, v) in fields {
            data(&mut out, "      ", "node", k, v);
        }
        out.push_str("    </node>\n");
    }
    for e in g.edges() {
        let mut fields: Vec<(&str, &str)> = Vec::new();
        if let Some(l) = &e.label {
            fields.push(("label", l));
        }
        if let Some(w) = &e.weight {
            fields.push(("weight", w.as_str()));
        }
        for (k, v) in &e.attrs {
            if key_ids.contains_key(&("edge", k.as_str())) && !matches!(k.as_str(), "label" | "weight") {
                fields.push((k, v));
            } else if k == "weight" && e.weight.is_none() && Weight::new(v.clone()).is_err() {
                fields.push((k, v));
            }
        }
        let id_attr = e
            .attrs
            .get("id")
            .map(|id| format!(" id=\"{}\"", escape_attr(id)))
            .unwrap_or_default();
        let open = format!(
            "    <edge{id_attr} source=\"{}\" target=\"{}\"",
            escape_attr(&e.source),
            escape_attr(&e.target)
        );
        if fields.is_empty() {
            let _ = writeln!(out, "{open}/>");
            continue;
        }
        let _ = writeln!(out, "{open}>");
        for (k, v) in fields {
            data(&mut out, "      ", "edge", k, v);
        }
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok((out, report))
}
