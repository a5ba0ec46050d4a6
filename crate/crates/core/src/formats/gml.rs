//! GML: the key/value list syntax with `graph`, `node`, `edge`, `id`,
//! `source`, `target`, `label`, `weight` and `directed` recognized. Every
//! other key is kept as an attribute; nested lists are flattened into dotted
//! keys (`graphics.x`) and repeated keys get an occurrence suffix
//! (`point#2`), which the writer undoes.

use std::collections::{BTreeMap, HashMap};

use super::{FormatError, LossKind, LossReport, ParseOptions, TextPos};
use crate::model::{Attrs, EdgeRecord, Graph, GraphParts, NodeRecord, Weight};

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(String),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: Value,
    pos: TextPos,
}

impl Value {
    fn scalar(&self) -> Option<&str> {
        match self {
            Value::Num(s) | Value::Str(s) => Some(s),
            Value::List(_) => None,
        }
    }
}

/// True for the lexical forms the tokenizer reads as a number:
/// `[+-]?(digits[.digits*]|.digits)([eE][+-]?digits)?`.
pub fn is_gml_number(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

fn is_key(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

#[derive(Debug, PartialEq)]
enum Token {
    Key(String),
    Num(String),
    Str(String),
    Open,
    Close,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn here(&self) -> TextPos {
        TextPos::at(self.line, self.column)
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Option<(Token, TextPos)>, FormatError> {
        loop {
            match self.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => self.bump(c),
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump(c);
                    }
                }
                Some(_) => break,
            }
        }
        let start = self.here();
        let c = self.peek().expect("checked above");
        let tok = match c {
            '[' => {
                self.bump(c);
                Token::Open
            }
            ']' => {
                self.bump(c);
                Token::Close
            }
            '"' => {
                self.bump(c);
                let begin = self.pos;
                loop {
                    match self.peek() {
                        None => return Err(FormatError::syntax(start, "unterminated string")),
                        Some('"') => break,
                        Some(c) => self.bump(c),
                    }
                }
                let raw = &self.text[begin..self.pos];
                self.bump('"');
                Token::Str(decode_entities(raw))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let begin = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Token::Key(self.text[begin..self.pos].to_string())
            }
            c if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                let begin = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.') {
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                let word = &self.text[begin..self.pos];
                if !is_gml_number(word) {
                    return Err(FormatError::syntax(start, format!("malformed number {word:?}")));
                }
                Token::Num(word.to_string())
            }
            other => {
                return Err(FormatError::syntax(start, format!("unexpected character {other:?}")))
            }
        };
        Ok(Some((tok, start)))
    }
}

fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return raw.to_string();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').and_then(|semi| {
            let name = &rest[1..semi];
            let ch = match name {
                "amp" => Some('&'),
                "quot" => Some('"'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "apos" => Some('\''),
                _ => {
                    let num = name.strip_prefix('#')?;
                    let code = match num.strip_prefix(['x', 'X']) {
                        Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                        None => num.parse().ok()?,
                    };
                    char::from_u32(code)
                }
            }?;
            Some((ch, semi + 1))
        });
        match decoded {
            Some((ch, len)) => {
                out.push(ch);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn encode_entities(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;")
}

fn parse_entries(text: &str) -> Result<Vec<Entry>, FormatError> {
    let mut lexer = Lexer::new(text);
    // (entries of the open list, key and position of the list itself)
    let mut stack: Vec<(Vec<Entry>, Option<(String, TextPos)>)> = vec![(Vec::new(), None)];
    loop {
        let Some((tok, pos)) = lexer.next_token()? else {
            break;
        };
        match tok {
            Token::Key(key) => {
                let Some((value_tok, vpos)) = lexer.next_token()? else {
                    return Err(FormatError::syntax(lexer.here(), format!("missing value for key {key:?}")));
                };
                let value = match value_tok {
                    Token::Num(n) => Value::Num(n),
                    Token::Str(s) => Value::Str(s),
                    Token::Open => {
                        if stack.len() > MAX_DEPTH {
                            return Err(FormatError::syntax(vpos, "lists nested too deeply"));
                        }
                        stack.push((Vec::new(), Some((key, pos))));
                        continue;
                    }
                    Token::Close | Token::Key(_) => {
                        return Err(FormatError::syntax(vpos, format!("missing value for key {key:?}")))
                    }
                };
                stack.last_mut().expect("root").0.push(Entry { key, value, pos });
            }
            Token::Close => {
                if stack.len() == 1 {
                    return Err(FormatError::syntax(pos, "unbalanced ']'"));
                }
                let (entries, opener) = stack.pop().expect("len > 1");
                let (key, kpos) = opener.expect("non-root list has a key");
                stack.last_mut().expect("root").0.push(Entry {
                    key,
                    value: Value::List(entries),
                    pos: kpos,
                });
            }
            Token::Num(_) | Token::Str(_) | Token::Open => {
                return Err(FormatError::syntax(pos, "expected a key"));
            }
        }
    }
    if stack.len() > 1 {
        let (_, opener) = stack.pop().expect("len > 1");
        let pos = opener.map_or(lexer.here(), |(_, p)| p);
        return Err(FormatError::syntax(pos, "unterminated list"));
    }
    Ok(stack.pop().expect("root").0)
}

/// Flattens entries into dotted keys; the k-th repeat of a key (k >= 2)
/// becomes `key#k`. Entries with keys in `skip` are ignored.
fn flatten(entries: &[Entry], prefix: &str, skip: &[&str], out: &mut Attrs) {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for e in entries {
        if prefix.is_empty() && skip.contains(&e.key.as_str()) {
            continue;
        }
        let n = seen.entry(&e.key).or_insert(0);
        *n += 1;
        let seg = if *n == 1 {
            e.key.clone()
        } else {
            format!("{}#{}", e.key, n)
        };
        let path = format!("{prefix}{seg}");
        match &e.value {
            Value::Num(s) | Value::Str(s) => {
                out.insert(path, s.clone());
            }
            Value::List(inner) => flatten(inner, &format!("{path}."), &[], out),
        }
    }
}

fn scalar_of<'e>(e: &'e Entry, what: &str) -> Result<&'e str, FormatError> {
    e.value
        .scalar()
        .ok_or_else(|| FormatError::syntax(e.pos, format!("{what} must be a scalar")))
}

pub(super) fn parse(text: &str, options: ParseOptions) -> Result<(Graph, LossReport), FormatError> {
    let top = parse_entries(text)?;
    let mut report = LossReport::default();
    let mut graphs = top.iter().filter(|e| e.key == "graph");
    let Some(graph_entry) = graphs.next() else {
        return Err(FormatError::syntax(
            TextPos::from_offset(text, text.len()),
            "no `graph [ ... ]` list found",
        ));
    };
    let extra = graphs.count();
    if extra > 0 {
        if options.strict {
            return Err(FormatError::UnsupportedConstruct("multiple graphs in one GML document".into()));
        }
        report.add(LossKind::ExtraGraph, extra, "additional graphs ignored");
    }
    let Value::List(body) = &graph_entry.value else {
        return Err(FormatError::syntax(graph_entry.pos, "`graph` must be a list"));
    };

    let mut parts = GraphParts::default();
    for e in body {
        match e.key.as_str() {
            "directed" => {
                parts.directed = match scalar_of(e, "directed")? {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(FormatError::syntax(e.pos, format!("directed must be 0 or 1, got {other:?}")))
                    }
                }
            }
            "node" => parts.nodes.push(parse_node(e)?),
            "edge" => parts.edges.push(parse_edge(e)?),
            _ => {}
        }
    }
    flatten(body, "", &["directed", "node", "edge"], &mut parts.graph_attrs);
    let graph = parts.build()?;
    Ok((graph, report))
}

fn list_of<'e>(e: &'e Entry) -> Result<&'e [Entry], FormatError> {
    match &e.value {
        Value::List(items) => Ok(items),
        _ => Err(FormatError::syntax(e.pos, format!("`{}` must be a list", e.key))),
    }
}

fn parse_node(e: &Entry) -> Result<NodeRecord, FormatError> {
    let items = list_of(e)?;
    let mut id = None;
    let mut label = None;
    for item in items {
        match item.key.as_str() {
            "id" => id = Some(scalar_of(item, "id")?.to_string()),
            "label" => label = Some(scalar_of(item, "label")?.to_string()),
            _ => {}
        }
    }
    let id = id.ok_or_else(|| FormatError::syntax(e.pos, "node without id"))?;
    let mut attrs = Attrs::new();
    flatten(items, "", &["id", "label"], &mut attrs);
    Ok(NodeRecord { id, label, attrs })
}

fn parse_edge(e: &Entry) -> Result<EdgeRecord, FormatError> {
    let items = list_of(e)?;
    let (mut source, mut target, mut label, mut weight) = (None, None, None, None);
    for item in items {
        match item.key.as_str() {
            "source" => source = Some(scalar_of(item, "source")?.to_string()),
            "target" => target = Some(scalar_of(item, "target")?.to_string()),
            "label" => label = Some(scalar_of(item, "label")?.to_string()),
            "weight" => {
                let raw = scalar_of(item, "weight")?;
                weight = Some(
                    Weight::new(raw)
                        .map_err(|_| FormatError::syntax(item.pos, format!("weight {raw:?} is not a number")))?,
                );
            }
            _ => {}
        }
    }
    let source = source.ok_or_else(|| FormatError::syntax(e.pos, "edge without source"))?;
    let target = target.ok_or_else(|| FormatError::syntax(e.pos, "edge without target"))?;
    let mut attrs = Attrs::new();
    flatten(items, "", &["source", "target", "label", "weight"], &mut attrs);
    Ok(EdgeRecord {
        source,
        target,
        label,
        weight,
        attrs,
    })
}

// ---- writer ----

enum Tree {
    Leaf(String),
    Branch(BTreeMap<(String, u32), Tree>),
}

/// Splits `name#k` into (`name`, k); plain names get k = 1.
fn split_segment(seg: &str) -> Option<(String, u32)> {
    let (base, idx) = match seg.split_once('#') {
        Some((base, k)) => {
            let idx: u32 = k.parse().ok()?;
            if idx < 2 || idx.to_string() != k {
                return None;
            }
            (base, idx)
        }
        None => (seg, 1),
    };
    is_key(base).then(|| (base.to_string(), idx))
}

fn insert_path(tree: &mut BTreeMap<(String, u32), Tree>, segs: &[(String, u32)], value: &str) -> bool {
    let (head, rest) = segs.split_first().expect("non-empty path");
    if rest.is_empty() {
        if tree.contains_key(head) {
            return false;
        }
        tree.insert(head.clone(), Tree::Leaf(value.to_string()));
        return true;
    }
    match tree
        .entry(head.clone())
        .or_insert_with(|| Tree::Branch(BTreeMap::new()))
    {
        Tree::Branch(inner) => insert_path(inner, rest, value),
        Tree::Leaf(_) => false,
    }
}

fn tree_entries(tree: &BTreeMap<(String, u32), Tree>) -> Vec<Entry> {
    tree.iter()
        .map(|((base, _), t)| Entry {
            key: base.clone(),
            value: match t {
                Tree::Leaf(v) => scalar_value(v),
                Tree::Branch(inner) => Value::List(tree_entries(inner)),
            },
            pos: TextPos::at(0, 0),
        })
        .collect()
}

fn scalar_value(v: &str) -> Value {
    if is_gml_number(v) {
        Value::Num(v.to_string())
    } else {
        Value::Str(v.to_string())
    }
}

/// Turns an attribute map back into GML entries. Keys that cannot be
/// reproduced exactly by a later parse are dropped and counted.
fn attrs_to_entries(attrs: &Attrs, reserved: &[&str]) -> (Vec<Entry>, usize) {
    let mut keep: Attrs = attrs.clone();
    let mut dropped = 0;
    loop {
        let mut tree = BTreeMap::new();
        let mut bad = Vec::new();
        for (k, v) in &keep {
            let segs: Option<Vec<_>> = k.split('.').map(split_segment).collect();
            let ok = match segs {
                Some(segs) if !reserved.contains(&segs[0].0.as_str()) => insert_path(&mut tree, &segs, v),
                _ => false,
            };
            if !ok {
                bad.push(k.clone());
            }
        }
        let entries = tree_entries(&tree);
        if bad.is_empty() {
            let mut reparsed = Attrs::new();
            flatten(&entries, "", &[], &mut reparsed);
            bad = keep
                .iter()
                .filter(|(k, v)| reparsed.get(*k) != Some(*v))
                .map(|(k, _)| k.clone())
                .collect();
            if bad.is_empty() {
                return (entries, dropped);
            }
        }
        dropped += bad.len();
        for k in bad {
            keep.remove(&k);
        }
    }
}

fn write_scalar(out: &mut String, v: &Value) {
    match v {
        Value::Num(n) => out.push_str(n),
        Value::Str(s) => {
            out.push('"');
            out.push_str(&encode_entities(s));
            out.push('"');
        }
        Value::List(_) => unreachable!("lists handled by write_entries"),
    }
}

fn write_entries(out: &mut String, entries: &[Entry], depth: usize) {
    for e in entries {
        indent(out, depth);
        out.push_str(&e.key);
        match &e.value {
            Value::List(inner) => {
                out.push_str(" [\n");
                write_entries(out, inner, depth + 1);
                indent(out, depth);
                out.push_str("]\n");
            }
            scalar => {
                out.push(' ');
                write_scalar(out, scalar);
                out.push('\n');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn id_value(id: &str) -> Value {
    scalar_value(id)
}

fn entry(key: &str, value: Value) -> Entry {
    Entry {
        key: key.to_string(),
        value,
        pos: TextPos::at(0, 0),
    }
}

pub(super) fn serialize(g: &Graph) -> Result<(String, LossReport), FormatError> {
    let mut report = LossReport::default();
    let mut body = vec![entry("directed", Value::Num(if g.is_directed() { "1" } else { "0" }.into()))];

    let (graph_entries, lost) = attrs_to_entries(g.graph_attrs(), &["directed", "node", "edge"]);
    report.add(LossKind::GraphAttribute, lost, "graph attributes with keys GML cannot express");
    body.extend(graph_entries);

    let mut node_lost = 0;
    for n in g.nodes() {
        let mut items = vec![entry("id", id_value(&n.id))];
        if let Some(label) = &n.label {
            items.push(entry("label", Value::Str(label.clone())));
        }
        let (attrs, lost) = attrs_to_entries(&n.attrs, &["id", "label"]);
        node_lost += lost;
        items.extend(attrs);
        body.push(entry("node", Value::List(items)));
    }
    report.add(LossKind::NodeAttribute, node_lost, "node attributes with keys GML cannot express");

    let mut edge_lost = 0;
    for e in g.edges() {
        let mut items = vec![
            entry("source", id_value(&e.source)),
            entry("target", id_value(&e.target)),
        ];
        if let Some(label) = &e.label {
            items.push(entry("label", Value::Str(label.clone())));
        }
        if let Some(w) = &e.weight {
            items.push(entry("weight", scalar_value(w.as_str())));
        }
        let (attrs, lost) = attrs_to_entries(&e.attrs, &["source", "target", "label", "weight"]);
        edge_lost += lost;
        items.extend(attrs);
        body.push(entry("edge", Value::List(items)));
    }
    report.add(LossKind::EdgeAttribute, edge_lost, "edge attributes with keys GML cannot express");

    let mut out = String::new();
    write_entries(&mut out, &[entry("graph", Value::List(body))], 0);
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse, serialize as ser, FormatId};

    const MINIMAL: &str =
        r#"graph [ directed 0 node [ id 0 label "a" ] node [ id 1 label "b" ] edge [ source 0 target 1 ] ]"#;

    #[test]
    fn minimal_document() {
        let g = parse(MINIMAL.as_bytes(), FormatId::Gml).unwrap();
        assert!(!g.is_directed());
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(g.nodes()[0].label.as_deref(), Some("a"));
        assert_eq!(g.nodes()[1].label.as_deref(), Some("b"));
    }

    #[test]
    fn writer_layout_is_fixed() {
        let g = parse(MINIMAL.as_bytes(), FormatId::Gml).unwrap();
        let (bytes, report) = ser(&g, FormatId::Gml).unwrap();
        assert!(report.lossless());
        let expected = "graph [\n  directed 0\n  node [\n    id 0\n    label \"a\"\n  ]\n  node [\n    id 1\n    label \"b\"\n  ]\n  edge [\n    source 0\n    target 1\n  ]\n]\n";
        assert_eq!(String::from_utf8(bytes).unwrap(), expected);
    }

    #[test]
    fn nested_and_repeated_keys_survive() {
        let text = r#"
Creator "yEd"
graph [
  directed 1
  label "demo"
  node [ id 1 graphics [ x 1.5 y -2 ] ]
  node [ id "n2" ]
  edge [ source 1 target "n2" weight 2.5
         graphics [ Line [ point [ x 0 ] point [ x 1 ] ] ] ]
]"#;
        let g = parse(text.as_bytes(), FormatId::Gml).unwrap();
        assert_eq!(g.graph_attrs()["label"], "demo");
        assert_eq!(g.nodes()[0].attrs["graphics.x"], "1.5");
        assert_eq!(g.nodes()[1].id, "n2");
        let e = &g.edges()[0];
        assert_eq!(e.weight.as_ref().unwrap().as_str(), "2.5");
        assert_eq!(e.attrs["graphics.Line.point.x"], "0");
        assert_eq!(e.attrs["graphics.Line.point#2.x"], "1");

        let (bytes, report) = ser(&g, FormatId::Gml).unwrap();
        assert!(report.lossless(), "{report}");
        assert_eq!(parse(&bytes, FormatId::Gml).unwrap(), g);
    }

    #[test]
    fn strings_with_quotes_and_entities() {
        let mut parts = parse(MINIMAL.as_bytes(), FormatId::Gml).unwrap().into_parts();
        parts.nodes[0].label = Some("say \"hi\" & <bye> &amp;".into());
        parts.nodes[1].attrs.insert("note".into(), "multi\nline ü".into());
        let g = parts.build().unwrap();
        let (bytes, _) = ser(&g, FormatId::Gml).unwrap();
        assert_eq!(parse(&bytes, FormatId::Gml).unwrap(), g);
        assert_eq!(decode_entities("&#65;&#x42;&bogus;&"), "AB&bogus;&");
    }

    #[test]
    fn unrepresentable_keys_are_reported() {
        let mut parts = parse(MINIMAL.as_bytes(), FormatId::Gml).unwrap().into_parts();
        parts.nodes[0].attrs.insert("has space".into(), "1".into());
        parts.nodes[0].attrs.insert("label".into(), "clash".into());
        parts.nodes[0].attrs.insert("ok_key".into(), "v".into());
        parts.edges[0].attrs.insert("weight".into(), "heavy".into());
        let g = parts.build().unwrap();
        let (bytes, report) = ser(&g, FormatId::Gml).unwrap();
        assert_eq!(report.count(LossKind::NodeAttribute), 2);
        assert_eq!(report.count(LossKind::EdgeAttribute), 1);
        let back = parse(&bytes, FormatId::Gml).unwrap();
        assert_eq!(back.nodes()[0].attrs.len(), 1);
    }

    #[test]
    fn scalar_and_list_with_same_key_conflict() {
        let mut attrs = Attrs::new();
        attrs.insert("a".into(), "v".into());
        attrs.insert("a.b".into(), "w".into());
        let (_, lost) = attrs_to_entries(&attrs, &[]);
        assert_eq!(lost, 1);
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let cases: &[(&str, (usize, usize))] = &[
            ("graph [\n  node [ id 1 ]\n", (1, 1)),
            ("graph [\n  node [ id 1 ] ]\n]", (3, 1)),
            ("graph [ directed 2 ]", (1, 9)),
            ("graph [\n node [ label \"x\" ] ]", (2, 2)),
            ("graph [ edge [ source 1 target 2 weight \"abc\" ] ]", (1, 34)),
            ("graph [ label \"open ]", (1, 15)),
            ("graph [ x 1.2.3 ]", (1, 11)),
            ("graph [ 5 ]", (1, 9)),
            ("nothing 1", (1, 10)),
        ];
        for (text, pos) in cases {
            let err = parse(text.as_bytes(), FormatId::Gml).unwrap_err();
            assert_eq!(err.position(), Some(*pos), "{text:?}: {err}");
        }
        assert!(matches!(
            parse(b"graph [ node [ id 1 ] node [ id 1 ] ]", FormatId::Gml),
            Err(FormatError::InvalidGraph(_))
        ));
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let text = format!("graph [ {} ]", "a [ ".repeat(10_000));
        assert!(parse(text.as_bytes(), FormatId::Gml).is_err());
    }

    #[test]
    fn multiple_graphs() {
        let text = "graph [ node [ id 1 ] ] graph [ ]";
        assert!(matches!(
            parse(text.as_bytes(), FormatId::Gml),
            Err(FormatError::UnsupportedConstruct(_))
        ));
        let (g, report) = super::parse(text, ParseOptions::lenient()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(report.count(LossKind::ExtraGraph), 1);
    }

    #[test]
    fn number_lexer() {
        for ok in ["1", "-2", "+3.", ".5", "1.5e-3", "7E+2"] {
            assert!(is_gml_number(ok), "{ok}");
        }
        for bad in ["", "-", ".", "1e", "1.2.3", "inf", "0x1"] {
            assert!(!is_gml_number(bad), "{bad}");
        }
    }
}
