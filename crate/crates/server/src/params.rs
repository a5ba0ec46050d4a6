//! URL query parameters to search criteria.
//!
//! | parameter | criterion |
//! |---|---|
//! | `tag=t` (repeatable) | tag equals `t` |
//! | `q=s` | name, creator or description contains `s` |
//! | `name=`, `creator=`, `description=` | that field contains the value |
//! | `min_nodes=`, `max_nodes=`, `min_edges=`, `max_edges=` | node/edge count range |
//! | `min_<p>=`, `max_<p>=` | range over numeric property `p` |
//! | `planar=`, `connected=`, `bipartite=`, `acyclic=`, `directed=`, `<p>=` | boolean property equals |
//! | `from=`, `to=` | upload time window; RFC 3339 or `YYYY-MM-DD` |
//! | `all=true` | allow a query without criteria |
//! | `page=`, `page_size=` | zero-based page, at most 500 per page |

use chrono::{DateTime, NaiveDate, Utc};
use oga_archive::{Criterion, SearchQuery, StoreError, TextField, MAX_PAGE_SIZE};
use oga_core::analysis::{BOOLEAN_PROPERTIES, NUMERIC_PROPERTIES};

use crate::error::ApiError;

pub const DEFAULT_PAGE_SIZE: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRequest {
    pub query: SearchQuery,
    pub page: usize,
    pub page_size: usize,
}

fn invalid(name: &str, value: &str, expected: &str) -> ApiError {
    ApiError::bad_request("invalid-parameter", format!("{name}={value:?}: expected {expected}"))
        .with("parameter", name)
}

pub fn parse_bool(name: &str, value: &str) -> Result<bool, ApiError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(invalid(name, value, "true or false")),
    }
}

fn parse_number(name: &str, value: &str) -> Result<f64, ApiError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(invalid(name, value, "a number")),
    }
}

fn parse_usize(name: &str, value: &str) -> Result<usize, ApiError> {
    value.parse().map_err(|_| invalid(name, value, "a non-negative integer"))
}

/// Dates without a time cover the whole day.
fn parse_time(name: &str, value: &str, end_of_day: bool) -> Result<DateTime<Utc>, ApiError> {
    if let Ok(t) = DateTime::parse_from_rfc3339(value) {
        return Ok(t.with_timezone(&Utc));
    }
    let day = NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| invalid(name, value, "an RFC 3339 timestamp or YYYY-MM-DD"))?;
    let t = if end_of_day {
        day.and_hms_micro_opt(23, 59, 59, 999_999)
    } else {
        day.and_hms_opt(0, 0, 0)
    };
    Ok(t.expect("valid time of day").and_utc())
}

fn numeric_name(alias: &str) -> &str {
    match alias {
        "nodes" => "node_count",
        "edges" => "edge_count",
        other => other,
    }
}

fn boolean_name(alias: &str) -> Option<&'static str> {
    let full = match alias {
        "planar" => "is_planar",
        "connected" => "is_connected",
        "bipartite" => "is_bipartite",
        "acyclic" => "is_acyclic",
        other => other,
    };
    BOOLEAN_PROPERTIES.iter().copied().find(|p| *p == full)
}

fn range(property: &str, low: Option<f64>, high: Option<f64>) -> Result<Criterion, ApiError> {
    if !NUMERIC_PROPERTIES.contains(&property) {
        return Err(StoreError::UnknownProperty(property.to_string()).into());
    }
    Ok(Criterion::NumericRange {
        property: property.to_string(),
        low,
        high,
    })
}

pub fn search_request(params: &[(String, String)]) -> Result<SearchRequest, ApiError> {
    let mut criteria = Vec::new();
    let mut all = false;
    let mut page = 0;
    let mut page_size = DEFAULT_PAGE_SIZE;
    for (key, value) in params {
        let (k, v) = (key.as_str(), value.as_str());
        let text = |field| Criterion::TextContains {
            field,
            needle: v.to_string(),
        };
        match k {
            "tag" => criteria.push(Criterion::TagEquals { tag: v.to_string() }),
            "q" => criteria.push(text(TextField::Any)),
            "name" => criteria.push(text(TextField::Name)),
            "creator" => criteria.push(text(TextField::Creator)),
            "description" => criteria.push(text(TextField::Description)),
            "from" => criteria.push(Criterion::UploadedBetween {
                from: Some(parse_time(k, v, false)?),
                to: None,
            }),
            "to" => criteria.push(Criterion::UploadedBetween {
                from: None,
                to: Some(parse_time(k, v, true)?),
            }),
            "all" => all = parse_bool(k, v)?,
            "page" => page = parse_usize(k, v)?,
            "page_size" => {
                page_size = parse_usize(k, v)?;
                if page_size == 0 || page_size > MAX_PAGE_SIZE {
                    return Err(invalid(k, v, &format!("1 to {MAX_PAGE_SIZE}")));
                }
            }
            _ => {
                if let Some(p) = k.strip_prefix("min_") {
                    criteria.push(range(numeric_name(p), Some(parse_number(k, v)?), None)?);
                } else if let Some(p) = k.strip_prefix("max_") {
                    criteria.push(range(numeric_name(p), None, Some(parse_number(k, v)?))?);
                } else if let Some(p) = boolean_name(k) {
                    criteria.push(Criterion::BooleanEquals {
                        property: p.to_string(),
                        value: parse_bool(k, v)?,
                    });
                } else {
                    return Err(StoreError::UnknownProperty(k.to_string()).into());
                }
            }
        }
    }
    let query = if all {
        criteria.into_iter().fold(SearchQuery::all(), SearchQuery::refine)
    } else if criteria.is_empty() {
        return Err(ApiError::bad_request(
            "invalid-query",
            "add at least one criterion, or all=true to list everything",
        ));
    } else {
        SearchQuery::new(criteria)
    };
    Ok(SearchRequest {
        query,
        page,
        page_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: &[(&str, &str)]) -> Vec<(String, String)> {
        s.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn maps_documented_parameters() {
        let r = search_request(&params(&[
            ("tag", "biology"),
            ("tag", "small"),
            ("min_nodes", "10"),
            ("max_nodes", "100"),
            ("planar", "true"),
            ("q", "rome"),
            ("from", "2024-01-01"),
            ("to", "2024-01-31"),
            ("page_size", "20"),
        ]))
        .unwrap();
        let c = r.query.criteria();
        assert_eq!(c.len(), 8);
        assert_eq!(c[0], Criterion::TagEquals { tag: "biology".into() });
        assert_eq!(
            c[2],
            Criterion::NumericRange {
                property: "node_count".into(),
                low: Some(10.0),
                high: None
            }
        );
        assert_eq!(
            c[4],
            Criterion::BooleanEquals {
                property: "is_planar".into(),
                value: true
            }
        );
        match &c[7] {
            Criterion::UploadedBetween { to: Some(t), .. } => assert_eq!(t.to_rfc3339(), "2024-01-31T23:59:59.999999+00:00"),
            other => panic!("{other:?}"),
        }
        assert_eq!(r.page_size, 20);
    }

    #[test]
    fn rejects_bad_input() {
        let code = |p: &[(&str, &str)]| search_request(&params(p)).unwrap_err().code;
        assert_eq!(code(&[("planar", "maybe")]), "invalid-parameter");
        assert_eq!(code(&[]), "invalid-query");
        assert_eq!(code(&[("min_girth", "3")]), "unknown-property");
        assert_eq!(code(&[("colour", "red")]), "unknown-property");
        assert_eq!(code(&[("min_nodes", "ten")]), "invalid-parameter");
        assert_eq!(code(&[("all", "true"), ("page_size", "501")]), "invalid-parameter");
        assert_eq!(code(&[("from", "yesterday")]), "invalid-parameter");
    }

    #[test]
    fn explicit_listing() {
        let r = search_request(&params(&[("all", "true")])).unwrap();
        assert!(r.query.criteria().is_empty());
        assert!(r.query.validate().is_ok());
        let r = search_request(&params(&[("all", "true"), ("is_bipartite", "false"), ("min_density", "0.5")])).unwrap();
        assert_eq!(r.query.criteria().len(), 2);
    }
}
