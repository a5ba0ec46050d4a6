//! Persistent archive of graphs: original submissions, canonical models,
//! metadata, analysis results, collections, search and zip bulk transfer.
//!
//! Records live in a single SQLite file (`archive.db`) next to a blob
//! directory holding the exact uploaded bytes under `blobs/<first2>/<id>`.

mod search;
mod store;
mod transfer;

use std::fmt;
use std::str::FromStr;

use oga_core::metadata::MetadataError;
use oga_core::FormatError;
use serde::{Deserialize, Serialize};

pub use search::{Criterion, SearchPage, SearchQuery, TextField, MAX_PAGE_SIZE};
pub use store::{
    ApiTokenRecord, AuditIssue, GraphRecord, GraphSummary, JobResult, MetadataPatch, Store, StoreConfig, SuppliedBy,
    UserProperties,
};
pub use transfer::{ImportEntry, ImportOptions, MANIFEST_NAME};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("parse failed: {0}")]
    ParseFailed(#[from] FormatError),
    #[error("no record with id {0}")]
    NotFound(String),
    #[error("record {0} has been deleted")]
    Gone(String),
    #[error("storage limit of {limit} bytes would be exceeded")]
    StorageFull { limit: u64 },
    #[error(transparent)]
    Metadata(#[from] MetadataError),
    #[error("{0} cannot be supplied by users")]
    FieldNotUserSettable(String),
    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: String, reason: String },
    #[error("graph {0} is already a member of this collection")]
    DuplicateMember(String),
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("corrupt archive: {0}")]
    CorruptArchive(String),
    #[error("database error: {0}")]
    Database(#[from] rusqlite::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("stored data is unreadable: {0}")]
    Corrupt(String),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

/// 26-character ULID; sorts by creation time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GraphId(String);

/// Collections use the same identifier scheme as graphs.
pub type CollectionId = GraphId;

impl GraphId {
    pub(crate) fn from_ulid(u: ulid::Ulid) -> Self {
        GraphId(u.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for GraphId {
    type Err = StoreError;

    /// Anything that is not a well-formed ULID cannot name a record.
    fn from_str(s: &str) -> Result<Self> {
        match ulid::Ulid::from_string(s) {
            Ok(u) if s.len() == 26 => Ok(GraphId(u.to_string())),
            _ => Err(StoreError::NotFound(s.to_string())),
        }
    }
}

impl TryFrom<String> for GraphId {
    type Error = StoreError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphId> for String {
    fn from(id: GraphId) -> String {
        id.0
    }
}

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    PendingAnalysis,
    Analyzed,
    AnalysisSkipped,
    AnalysisFailed,
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::PendingAnalysis => "pending-analysis",
            RecordStatus::Analyzed => "analyzed",
            RecordStatus::AnalysisSkipped => "analysis-skipped",
            RecordStatus::AnalysisFailed => "analysis-failed",
        }
    }

    pub fn is_pending(self) -> bool {
        self == RecordStatus::PendingAnalysis
    }
}

impl FromStr for RecordStatus {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pending-analysis" => Ok(RecordStatus::PendingAnalysis),
            "analyzed" => Ok(RecordStatus::Analyzed),
            "analysis-skipped" => Ok(RecordStatus::AnalysisSkipped),
            "analysis-failed" => Ok(RecordStatus::AnalysisFailed),
            other => Err(StoreError::Corrupt(format!("unknown status {other:?}"))),
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        let id = GraphId::from_ulid(ulid::Ulid::generate());
        assert_eq!(id.as_str().len(), 26);
        assert_eq!(id.as_str().parse::<GraphId>().unwrap(), id);
        assert!(matches!("nope".parse::<GraphId>(), Err(StoreError::NotFound(_))));
        assert!("01ARZ3NDEKTSV4RRFFQ69G5FAVX".parse::<GraphId>().is_err());
        let json = serde_json::to_string(&id).unwrap();
        assert_eq!(serde_json::from_str::<GraphId>(&json).unwrap(), id);
    }

    #[test]
    fn status_names() {
        for s in [
            RecordStatus::PendingAnalysis,
            RecordStatus::Analyzed,
            RecordStatus::AnalysisSkipped,
            RecordStatus::AnalysisFailed,
        ] {
            assert_eq!(s.as_str().parse::<RecordStatus>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), s.as_str());
        }
    }
}
