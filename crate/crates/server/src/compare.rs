//! Side-by-side property table for a handful of graphs.

use oga_core::analysis::{PropertySet, BOOLEAN_PROPERTIES, NUMERIC_PROPERTIES};
use serde::Serialize;

pub const MIN_COMPARED: usize = 2;
pub const MAX_COMPARED: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tally {
    None,
    Some,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Row {
    Numeric {
        property: &'static str,
        values: Vec<Option<f64>>,
    },
    Boolean {
        property: &'static str,
        values: Vec<Option<bool>>,
        tally: Tally,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonView {
    pub ids: Vec<String>,
    pub names: Vec<String>,
    pub rows: Vec<Row>,
}

/// A graph "has" a boolean property only when it is known to be true.
pub fn tally(values: &[Option<bool>]) -> Tally {
    let yes = values.iter().filter(|v| **v == Some(true)).count();
    match yes {
        0 => Tally::None,
        n if n == values.len() => Tally::All,
        _ => Tally::Some,
    }
}

/// `graphs` holds `(id, name, properties)`; missing properties become nulls.
pub fn compare(graphs: &[(String, String, Option<PropertySet>)]) -> ComparisonView {
    let mut rows = Vec::new();
    for &property in BOOLEAN_PROPERTIES {
        let values: Vec<Option<bool>> = graphs
            .iter()
            .map(|(_, _, p)| p.as_ref().and_then(|p| p.boolean(property)))
            .collect();
        rows.push(Row::Boolean {
            property,
            tally: tally(&values),
            values,
        });
    }
    for &property in NUMERIC_PROPERTIES {
        rows.push(Row::Numeric {
            property,
            values: graphs
                .iter()
                .map(|(_, _, p)| p.as_ref().and_then(|p| p.numeric(property)))
                .collect(),
        });
    }
    ComparisonView {
        ids: graphs.iter().map(|(id, _, _)| id.clone()).collect(),
        names: graphs.iter().map(|(_, name, _)| name.clone()).collect(),
        rows,
    }
}
