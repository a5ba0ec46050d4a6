//! Annotation entities attached to archived graphs.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetadataError {
    #[error("invalid tag {0:?}: tags are 1-64 chars of [a-z0-9_-] starting with a letter or digit")]
    InvalidTag(String),
    #[error("field {0} must not be empty")]
    EmptyField(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagKind {
    ApplicationDomain,
    Structural,
    Freeform,
}

/// Categorization tag. Values are normalized (trimmed, lowercased) and must
/// match `[a-z0-9][a-z0-9_-]{0,63}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tag {
    value: String,
    kind: TagKind,
}

impl Tag {
    pub fn new(raw: &str, kind: TagKind) -> Result<Self, MetadataError> {
        let value = raw.trim().to_lowercase();
        if !is_valid_tag(&value) {
            return Err(MetadataError::InvalidTag(raw.to_string()));
        }
        Ok(Self { value, kind })
    }

    pub fn freeform(raw: &str) -> Result<Self, MetadataError> {
        Self::new(raw, TagKind::Freeform)
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn kind(&self) -> TagKind {
        self.kind
    }
}

pub fn is_valid_tag(value: &str) -> bool {
    let bytes = value.as_bytes();
    match bytes.first() {
        Some(b) if b.is_ascii_lowercase() || b.is_ascii_digit() => {}
        _ => return false,
    }
    bytes.len() <= 64
        && bytes[1..]
            .iter()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_' || *b == b'-')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Publication,
    Website,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub kind: ReferenceKind,
    pub citation_or_url: String,
}

impl Reference {
    pub fn new(kind: ReferenceKind, citation_or_url: impl Into<String>) -> Result<Self, MetadataError> {
        let citation_or_url = citation_or_url.into();
        if citation_or_url.trim().is_empty() {
            return Err(MetadataError::EmptyField("citation_or_url"));
        }
        Ok(Self { kind, citation_or_url })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    pub creator: String,
    pub uploaded_at: DateTime<Utc>,
    #[serde(default)]
    pub description: Option<String>,
    /// How the graph was created; generators store their provenance here.
    #[serde(default)]
    pub creation_method: Option<String>,
    #[serde(default)]
    pub license: Option<String>,
    #[serde(default)]
    pub tags: Vec<Tag>,
    #[serde(default)]
    pub comments: Vec<Comment>,
    #[serde(default)]
    pub references: Vec<Reference>,
}

impl Metadata {
    /// Name and creator are the only mandatory fields.
    pub fn new(
        name: impl Into<String>,
        creator: impl Into<String>,
        uploaded_at: DateTime<Utc>,
    ) -> Result<Self, MetadataError> {
        let name = name.into();
        let creator = creator.into();
        if name.trim().is_empty() {
            return Err(MetadataError::EmptyField("name"));
        }
        if creator.trim().is_empty() {
            return Err(MetadataError::EmptyField("creator"));
        }
        Ok(Self {
            name,
            creator,
            uploaded_at,
            description: None,
            creation_method: None,
            license: None,
            tags: Vec::new(),
            comments: Vec::new(),
            references: Vec::new(),
        })
    }

    /// Replaces the tag set. Duplicates by value keep the first kind seen;
    /// the stored list is sorted by value.
    pub fn set_tags(&mut self, tags: impl IntoIterator<Item = Tag>) {
        let mut out: Vec<Tag> = Vec::new();
        for tag in tags {
            if !out.iter().any(|t| t.value == tag.value) {
                out.push(tag);
            }
        }
        out.sort_by(|a, b| a.value.cmp(&b.value));
        self.tags = out;
    }

    pub fn has_tag(&self, value: &str) -> bool {
        self.tags.iter().any(|t| t.value == value)
    }

    pub fn validate(&self) -> Result<(), MetadataError> {
        if self.name.trim().is_empty() {
            return Err(MetadataError::EmptyField("name"));
        }
        if self.creator.trim().is_empty() {
            return Err(MetadataError::EmptyField("creator"));
        }
        for tag in &self.tags {
            if !is_valid_tag(&tag.value) {
                return Err(MetadataError::InvalidTag(tag.value.clone()));
            }
        }
        Ok(())
    }
}

/// Named, ordered group of archived graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub id: String,
    pub name: String,
    pub description: String,
    pub member_graph_ids: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_normalization() {
        assert_eq!(Tag::freeform("  Biology ").unwrap().value(), "biology");
        assert!(Tag::freeform("Bad Tag!").is_err());
        assert!(Tag::freeform("").is_err());
        assert!(Tag::freeform("-lead").is_err());
        assert!(Tag::freeform("a_b-c9").is_ok());
        assert!(Tag::freeform(&"x".repeat(64)).is_ok());
        assert!(Tag::freeform(&"x".repeat(65)).is_err());
    }

    #[test]
    fn tags_unique_and_sorted() {
        let mut md = Metadata::new("g", "me", DateTime::UNIX_EPOCH).unwrap();
        md.set_tags([
            Tag::freeform("zeta").unwrap(),
            Tag::new("biology", TagKind::ApplicationDomain).unwrap(),
            Tag::freeform("Zeta").unwrap(),
        ]);
        let values: Vec<_> = md.tags.iter().map(Tag::value).collect();
        assert_eq!(values, ["biology", "zeta"]);
        assert!(md.has_tag("biology"));
    }

    #[test]
    fn mandatory_fields() {
        assert_eq!(
            Metadata::new(" ", "me", DateTime::UNIX_EPOCH).unwrap_err(),
            MetadataError::EmptyField("name")
        );
        assert!(Metadata::new("g", "", DateTime::UNIX_EPOCH).is_err());
        assert!(Reference::new(ReferenceKind::Website, "").is_err());
    }
}
