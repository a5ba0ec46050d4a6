//! Conjunctive multi-criterion queries.

use chrono::{DateTime, Utc};
use oga_core::analysis::{PropertySet, BOOLEAN_PROPERTIES, NUMERIC_PROPERTIES};
use oga_core::Metadata;
use serde::{Deserialize, Serialize};

use crate::{GraphId, RecordStatus, Result, StoreError};

pub const MAX_PAGE_SIZE: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TextField {
    Name,
    Creator,
    Description,
    /// Any of the three.
    Any,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Criterion {
    /// Inclusive on both ends; a missing bound is open.
    NumericRange {
        property: String,
        low: Option<f64>,
        high: Option<f64>,
    },
    TagEquals {
        tag: String,
    },
    /// Case-insensitive substring match.
    TextContains {
        field: TextField,
        needle: String,
    },
    BooleanEquals {
        property: String,
        value: bool,
    },
    /// Inclusive on both ends.
    UploadedBetween {
        from: Option<DateTime<Utc>>,
        to: Option<DateTime<Utc>>,
    },
}

impl Criterion {
    pub fn validate(&self) -> Result<()> {
        match self {
            Criterion::NumericRange { property, low, high } => {
                if !NUMERIC_PROPERTIES.contains(&property.as_str()) {
                    return Err(StoreError::UnknownProperty(property.clone()));
                }
                if low.is_some_and(f64::is_nan) || high.is_some_and(f64::is_nan) {
                    return Err(StoreError::InvalidQuery(format!("NaN bound on {property}")));
                }
                Ok(())
            }
            Criterion::BooleanEquals { property, .. } => {
                if BOOLEAN_PROPERTIES.contains(&property.as_str()) {
                    Ok(())
                } else {
                    Err(StoreError::UnknownProperty(property.clone()))
                }
            }
            Criterion::TagEquals { .. } | Criterion::TextContains { .. } | Criterion::UploadedBetween { .. } => Ok(()),
        }
    }

    /// `properties` is `None` while analysis is pending or after it failed;
    /// such records never satisfy property criteria.
    pub(crate) fn matches(&self, meta: &Metadata, properties: Option<&PropertySet>) -> bool {
        match self {
            Criterion::NumericRange { property, low, high } => {
                let Some(v) = properties.and_then(|p| p.numeric(property)) else {
                    return false;
                };
                low.is_none_or(|l| v >= l) && high.is_none_or(|h| v <= h)
            }
            Criterion::BooleanEquals { property, value } => {
                properties.and_then(|p| p.boolean(property)) == Some(*value)
            }
            Criterion::TagEquals { tag } => meta.has_tag(&tag.trim().to_lowercase()),
            Criterion::TextContains { field, needle } => {
                let needle = needle.to_lowercase();
                let hit = |s: &str| s.to_lowercase().contains(&needle);
                let description = meta.description.as_deref().unwrap_or("");
                match field {
                    TextField::Name => hit(&meta.name),
                    TextField::Creator => hit(&meta.creator),
                    TextField::Description => hit(description),
                    TextField::Any => hit(&meta.name) || hit(&meta.creator) || hit(description),
                }
            }
            Criterion::UploadedBetween { from, to } => {
                from.is_none_or(|f| meta.uploaded_at >= f) && to.is_none_or(|t| meta.uploaded_at <= t)
            }
        }
    }
}

/// Conjunction of criteria. An empty query only runs when built with
/// [`SearchQuery::all`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    criteria: Vec<Criterion>,
    #[serde(default)]
    match_all: bool,
}

impl SearchQuery {
    pub fn new(criteria: Vec<Criterion>) -> Self {
        SearchQuery {
            criteria,
            match_all: false,
        }
    }

    /// Explicit unbounded listing.
    pub fn all() -> Self {
        SearchQuery {
            criteria: Vec::new(),
            match_all: true,
        }
    }

    /// Refinement: the result is always a subset of `self`'s.
    pub fn refine(mut self, c: Criterion) -> Self {
        self.criteria.push(c);
        self
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn validate(&self) -> Result<()> {
        if self.criteria.is_empty() && !self.match_all {
            return Err(StoreError::InvalidQuery(
                "at least one criterion is required for a search".into(),
            ));
        }
        self.criteria.iter().try_for_each(Criterion::validate)
    }

    pub(crate) fn matches(&self, meta: &Metadata, status: RecordStatus, properties: Option<&PropertySet>) -> bool {
        let properties = if status.is_pending() { None } else { properties };
        self.criteria.iter().all(|c| c.matches(meta, properties))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchPage {
    /// Number of matches over all pages.
    pub total: usize,
    pub ids: Vec<GraphId>,
}
