use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard};

use chrono::{DateTime, SecondsFormat, Utc};
use oga_core::analysis::{PropertySet, BOOLEAN_PROPERTIES, NUMERIC_PROPERTIES, USER_SETTABLE_PROPERTIES};
use oga_core::formats::{self, FormatId};
use oga_core::layout::Layout;
use oga_core::metadata::{Collection, Comment, MetadataError, Reference, Tag};
use oga_core::{Graph, Metadata};
use rusqlite::{params, Connection, OptionalExtension};
use serde::{Deserialize, Serialize};

use crate::search::{SearchPage, SearchQuery, MAX_PAGE_SIZE};
use crate::{CollectionId, GraphId, RecordStatus, Result, StoreError};

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS graphs (
    id TEXT PRIMARY KEY,
    format TEXT NOT NULL,
    byte_len INTEGER NOT NULL,
    node_count INTEGER NOT NULL,
    edge_count INTEGER NOT NULL,
    directed INTEGER NOT NULL,
    canonical TEXT NOT NULL,
    metadata TEXT NOT NULL,
    uploaded_at TEXT NOT NULL,
    status TEXT NOT NULL,
    status_message TEXT,
    properties TEXT,
    user_properties TEXT NOT NULL DEFAULT '{}',
    layout TEXT,
    svg TEXT,
    deleted_at TEXT
);
CREATE INDEX IF NOT EXISTS graphs_status ON graphs(status);
CREATE TABLE IF NOT EXISTS collections (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    description TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS collection_members (
    collection_id TEXT NOT NULL REFERENCES collections(id),
    graph_id TEXT NOT NULL REFERENCES graphs(id),
    position INTEGER NOT NULL,
    PRIMARY KEY (collection_id, graph_id)
);
CREATE TABLE IF NOT EXISTS tokens (
    token TEXT PRIMARY KEY,
    owner TEXT NOT NULL,
    created_at TEXT NOT NULL
);
";

#[derive(Debug, Clone, Default)]
pub struct StoreConfig {
    /// Upper bound on the summed size of all stored originals.
    pub max_total_bytes: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuppliedBy {
    System,
    User,
}

/// Values users may attach on top of the computed analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProperties {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_number: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRecord {
    pub id: GraphId,
    pub original_format: FormatId,
    pub original_size: u64,
    pub canonical: Graph,
    pub metadata: Metadata,
    /// Computed properties merged with user-supplied ones. `None` while
    /// pending and after a failed analysis.
    pub properties: Option<PropertySet>,
    pub user_properties: UserProperties,
    pub layout: Option<Layout>,
    pub status: RecordStatus,
    /// Skip reason or failure message.
    pub status_message: Option<String>,
}

/// Search listing entry; cheap to load without the canonical graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub id: GraphId,
    pub name: String,
    pub tags: Vec<String>,
    pub status: RecordStatus,
    pub node_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub is_planar: Option<bool>,
    pub is_connected: Option<bool>,
    pub uploaded_at: DateTime<Utc>,
}

/// Outcome of one background analysis job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    /// `Err` carries the failure message recorded on the record.
    pub analysis: std::result::Result<PropertySet, String>,
    /// Layout together with its rendered SVG.
    pub layout: Option<(Layout, String)>,
}

/// Partial metadata update. Empty strings clear optional fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetadataPatch {
    pub name: Option<String>,
    pub creator: Option<String>,
    pub description: Option<String>,
    pub creation_method: Option<String>,
    pub license: Option<String>,
    pub tags: Option<Vec<Tag>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiTokenRecord {
    pub token: String,
    pub owner: String,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditIssue {
    pub id: GraphId,
    pub problem: String,
}

pub struct Store {
    root: PathBuf,
    conn: Mutex<Connection>,
    ids: Mutex<ulid::Generator>,
    config: StoreConfig,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("root", &self.root).finish_non_exhaustive()
    }
}

fn corrupt(e: impl std::fmt::Display) -> StoreError {
    StoreError::Corrupt(e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(corrupt)
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(corrupt)
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Micros, true)
}

fn merge_user(properties: Option<PropertySet>, user: &UserProperties) -> Option<PropertySet> {
    properties.map(|mut p| {
        p.crossing_number = user.crossing_number;
        p
    })
}

/// Writes via a synced temporary file so a crash never leaves a torn blob.
fn write_durably(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().expect("blob paths have a parent");
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    fs::File::open(dir)?.sync_all()
}

/// Columns needed to decide liveness.
struct Head {
    status: RecordStatus,
    deleted: bool,
}

impl Store {
    /// Opens or creates an archive rooted at `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        Self::open_with(dir, StoreConfig::default())
    }

    pub fn open_with(dir: impl AsRef<Path>, config: StoreConfig) -> Result<Self> {
        let root = dir.as_ref().to_path_buf();
        fs::create_dir_all(root.join("blobs"))?;
        let conn = Connection::open(root.join("archive.db"))?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.pragma_update(None, "synchronous", "FULL")?;
        conn.pragma_update(None, "foreign_keys", "ON")?;
        conn.execute_batch(SCHEMA)?;
        Ok(Store {
            root,
            conn: Mutex::new(conn),
            ids: Mutex::new(ulid::Generator::new()),
            config,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn lock(&self) -> MutexGuard<'_, Connection> {
        self.conn.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn next_id(&self) -> GraphId {
        let mut generator = self.ids.lock().unwrap_or_else(|e| e.into_inner());
        GraphId::from_ulid(generator.generate().unwrap_or_else(|_| ulid::Ulid::generate()))
    }

    fn blob_path(&self, id: &GraphId) -> PathBuf {
        let s = id.as_str();
        self.root.join("blobs").join(&s[..2]).join(s)
    }

    fn head(conn: &Connection, id: &GraphId) -> Result<Head> {
        let row = conn
            .query_row(
                "SELECT status, deleted_at IS NOT NULL FROM graphs WHERE id = ?1",
                [id.as_str()],
                |r| Ok((r.get::<_, String>(0)?, r.get::<_, bool>(1)?)),
            )
            .optional()?;
        let (status, deleted) = row.ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        Ok(Head {
            status: status.parse()?,
            deleted,
        })
    }

    /// Fails with `NotFound` or `Gone` unless `id` names a live record.
    fn live(conn: &Connection, id: &GraphId) -> Result<Head> {
        let head = Self::head(conn, id)?;
        if head.deleted {
            return Err(StoreError::Gone(id.to_string()));
        }
        Ok(head)
    }

    /// Parses and persists a submission. Nothing is stored if parsing or
    /// metadata validation fails.
    pub fn put_graph(&self, bytes: &[u8], format: FormatId, metadata: Metadata) -> Result<GraphId> {
        let graph = formats::parse(bytes, format)?;
        self.put_parsed(bytes, format, &graph, metadata)
    }

    pub(crate) fn put_parsed(&self, bytes: &[u8], format: FormatId, graph: &Graph, metadata: Metadata) -> Result<GraphId> {
        metadata.validate()?;
        let canonical = to_json(graph)?;
        let meta_json = to_json(&metadata)?;
        let id = self.next_id();
        let conn = self.lock();
        if let Some(limit) = self.config.max_total_bytes {
            let used: i64 = conn.query_row("SELECT COALESCE(SUM(byte_len), 0) FROM graphs", [], |r| r.get(0))?;
            if used as u64 + bytes.len() as u64 > limit {
                return Err(StoreError::StorageFull { limit });
            }
        }
        let path = self.blob_path(&id);
        write_durably(&path, bytes)?;
        let inserted = conn.execute(
            "INSERT INTO graphs (id, format, byte_len, node_count, edge_count, directed, canonical, metadata,
                                 uploaded_at, status)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10)",
            params![
                id.as_str(),
                format.as_str(),
                bytes.len() as i64,
                graph.node_count() as i64,
                graph.edge_count() as i64,
                graph.is_directed(),
                canonical,
                meta_json,
                timestamp(metadata.uploaded_at),
                RecordStatus::PendingAnalysis.as_str(),
            ],
        );
        if let Err(e) = inserted {
            let _ = fs::remove_file(&path);
            return Err(e.into());
        }
        Ok(id)
    }

    pub fn get_record(&self, id: &GraphId) -> Result<GraphRecord> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        let row = conn.query_row(
            "SELECT format, byte_len, canonical, metadata, status, status_message, properties, user_properties, layout
             FROM graphs WHERE id = ?1",
            [id.as_str()],
            |r| {
                Ok((
                    r.get::<_, String>(0)?,
                    r.get::<_, i64>(1)?,
                    r.get::<_, String>(2)?,
                    r.get::<_, String>(3)?,
                    r.get::<_, String>(4)?,
                    r.get::<_, Option<String>>(5)?,
                    r.get::<_, Option<String>>(6)?,
                    r.get::<_, String>(7)?,
                    r.get::<_, Option<String>>(8)?,
                ))
            },
        )?;
        drop(conn);
        let (format, len, canonical, meta, status, message, props, user, layout) = row;
        let user: UserProperties = from_json(&user)?;
        let props: Option<PropertySet> = props.as_deref().map(from_json).transpose()?;
        Ok(GraphRecord {
            id: id.clone(),
            original_format: format.parse().map_err(corrupt)?,
            original_size: len as u64,
            canonical: from_json(&canonical)?,
            metadata: from_json(&meta)?,
            properties: merge_user(props, &user),
            user_properties: user,
            layout: layout.as_deref().map(from_json).transpose()?,
            status: status.parse()?,
            status_message: message,
        })
    }

    /// The exact bytes submitted, with their declared format.
    pub fn get_original_bytes(&self, id: &GraphId) -> Result<(Vec<u8>, FormatId)> {
        let format: String = {
            let conn = self.lock();
            Self::live(&conn, id)?;
            conn.query_row("SELECT format FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?
        };
        let bytes = fs::read(self.blob_path(id))?;
        Ok((bytes, format.parse().map_err(corrupt)?))
    }

    pub fn canonical(&self, id: &GraphId) -> Result<Graph> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        let json: String = conn.query_row("SELECT canonical FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?;
        drop(conn);
        from_json(&json)
    }

    pub fn status(&self, id: &GraphId) -> Result<RecordStatus> {
        Ok(Self::live(&self.lock(), id)?.status)
    }

    /// Rendered drawing, if layout has run.
    pub fn svg(&self, id: &GraphId) -> Result<Option<String>> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        Ok(conn.query_row("SELECT svg FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?)
    }

    /// Tombstones the record: its id keeps resolving, to `Gone`.
    pub fn delete_graph(&self, id: &GraphId) -> Result<()> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        conn.execute(
            "UPDATE graphs SET deleted_at = ?2 WHERE id = ?1",
            params![id.as_str(), timestamp(Utc::now())],
        )?;
        Ok(())
    }

    fn modify_metadata<T>(&self, id: &GraphId, f: impl FnOnce(&mut Metadata) -> Result<T>) -> Result<T> {
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        Self::live(&tx, id)?;
        let json: String = tx.query_row("SELECT metadata FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?;
        let mut meta: Metadata = from_json(&json)?;
        let out = f(&mut meta)?;
        meta.validate()?;
        tx.execute(
            "UPDATE graphs SET metadata = ?2, uploaded_at = ?3 WHERE id = ?1",
            params![id.as_str(), to_json(&meta)?, timestamp(meta.uploaded_at)],
        )?;
        tx.commit()?;
        Ok(out)
    }

    pub fn update_metadata(&self, id: &GraphId, patch: MetadataPatch) -> Result<Metadata> {
        self.modify_metadata(id, |m| {
            if let Some(name) = patch.name {
                m.name = name;
            }
            if let Some(creator) = patch.creator {
                m.creator = creator;
            }
            let optional = |v: String| if v.trim().is_empty() { None } else { Some(v) };
            if let Some(v) = patch.description {
                m.description = optional(v);
            }
            if let Some(v) = patch.creation_method {
                m.creation_method = optional(v);
            }
            if let Some(v) = patch.license {
                m.license = optional(v);
            }
            if let Some(tags) = patch.tags {
                m.set_tags(tags);
            }
            Ok(m.clone())
        })
    }

    /// Appends a comment stamped with the current time.
    pub fn add_comment(&self, id: &GraphId, author: &str, text: &str) -> Result<Comment> {
        if author.trim().is_empty() {
            return Err(MetadataError::EmptyField("author").into());
        }
        if text.trim().is_empty() {
            return Err(MetadataError::EmptyField("text").into());
        }
        self.modify_metadata(id, |m| {
            let c = Comment {
                author: author.to_string(),
                timestamp: Utc::now(),
                text: text.to_string(),
            };
            m.comments.push(c.clone());
            Ok(c)
        })
    }

    pub fn add_reference(&self, id: &GraphId, reference: Reference) -> Result<()> {
        self.modify_metadata(id, |m| {
            m.references.push(reference);
            Ok(())
        })
    }

    /// Replaces the tag set; raw strings are normalized as free-form tags.
    pub fn set_tags(&self, id: &GraphId, tags: &[&str]) -> Result<()> {
        let tags = tags.iter().map(|t| Tag::freeform(t)).collect::<Result<Vec<_>, _>>()?;
        self.modify_metadata(id, |m| {
            m.set_tags(tags);
            Ok(())
        })
    }

    /// System-supplied sets are analysis results and finish a pending record.
    /// User-supplied sets may only carry user-settable fields; every other
    /// field must be left at its default.
    pub fn set_properties(&self, id: &GraphId, props: PropertySet, supplied_by: SuppliedBy) -> Result<()> {
        match supplied_by {
            SuppliedBy::System => self
                .complete_job(
                    id,
                    JobResult {
                        analysis: Ok(props),
                        layout: None,
                    },
                )
                .map(|_| ()),
            SuppliedBy::User => {
                let given = serde_json::to_value(&props).map_err(corrupt)?;
                let blank = serde_json::to_value(PropertySet::default()).map_err(corrupt)?;
                let (Some(given), Some(blank)) = (given.as_object(), blank.as_object()) else {
                    return Err(StoreError::Corrupt("property set is not an object".into()));
                };
                if let Some((name, _)) = given
                    .iter()
                    .find(|(k, v)| !USER_SETTABLE_PROPERTIES.contains(&k.as_str()) && blank.get(*k) != Some(v))
                {
                    return Err(StoreError::FieldNotUserSettable(name.clone()));
                }
                self.write_user_properties(id, |u| u.crossing_number = props.crossing_number)
            }
        }
    }

    /// Sets one user-supplied property; `null` clears it.
    pub fn set_user_property(&self, id: &GraphId, name: &str, value: &serde_json::Value) -> Result<()> {
        if !NUMERIC_PROPERTIES.contains(&name) && !BOOLEAN_PROPERTIES.contains(&name) {
            return Err(StoreError::UnknownProperty(name.to_string()));
        }
        if !USER_SETTABLE_PROPERTIES.contains(&name) {
            return Err(StoreError::FieldNotUserSettable(name.to_string()));
        }
        let v = match value {
            serde_json::Value::Null => None,
            other => Some(other.as_u64().ok_or_else(|| StoreError::InvalidValue {
                field: name.to_string(),
                reason: "expected a non-negative integer".into(),
            })? as usize),
        };
        self.write_user_properties(id, |u| u.crossing_number = v)
    }

    fn write_user_properties(&self, id: &GraphId, f: impl FnOnce(&mut UserProperties)) -> Result<()> {
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        Self::live(&tx, id)?;
        let json: String =
            tx.query_row("SELECT user_properties FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?;
        let mut user: UserProperties = from_json(&json)?;
        f(&mut user);
        tx.execute(
            "UPDATE graphs SET user_properties = ?2 WHERE id = ?1",
            params![id.as_str(), to_json(&user)?],
        )?;
        tx.commit()?;
        Ok(())
    }

    /// Records a finished job. Only pending records change; for any other
    /// status this is a no-op returning `false`, which makes redelivered
    /// jobs harmless.
    pub fn complete_job(&self, id: &GraphId, result: JobResult) -> Result<bool> {
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        if !Self::live(&tx, id)?.status.is_pending() {
            return Ok(false);
        }
        let (status, message, props) = match result.analysis {
            Ok(mut p) => {
                p.crossing_number = None;
                let status = if p.analysis_skipped {
                    RecordStatus::AnalysisSkipped
                } else {
                    RecordStatus::Analyzed
                };
                (status, p.skip_reason.clone(), Some(to_json(&p)?))
            }
            Err(msg) => (RecordStatus::AnalysisFailed, Some(msg), None),
        };
        let (layout, svg) = match result.layout {
            Some((layout, svg)) => (Some(to_json(&layout)?), Some(svg)),
            None => (None, None),
        };
        tx.execute(
            "UPDATE graphs SET status = ?2, status_message = ?3, properties = ?4,
                               layout = COALESCE(?5, layout), svg = COALESCE(?6, svg)
             WHERE id = ?1",
            params![id.as_str(), status.as_str(), message, props, layout, svg],
        )?;
        tx.commit()?;
        Ok(true)
    }

    /// Replaces the stored drawing, e.g. after re-running layout with a new seed.
    pub fn set_layout(&self, id: &GraphId, layout: &Layout, svg: &str) -> Result<()> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        conn.execute(
            "UPDATE graphs SET layout = ?2, svg = ?3 WHERE id = ?1",
            params![id.as_str(), to_json(layout)?, svg],
        )?;
        Ok(())
    }

    /// Live records still waiting for analysis, oldest first.
    pub fn pending_ids(&self) -> Result<Vec<GraphId>> {
        let conn = self.lock();
        let mut stmt = conn.prepare(
            "SELECT id FROM graphs WHERE status = ?1 AND deleted_at IS NULL ORDER BY id",
        )?;
        let ids = stmt
            .query_map([RecordStatus::PendingAnalysis.as_str()], |r| r.get::<_, String>(0))?
            .collect::<rusqlite::Result<Vec<_>>>()?;
        ids.into_iter().map(|s| s.parse()).collect()
    }

    /// Runs `q` against a consistent snapshot. Results are ordered newest
    /// upload first, ties broken by descending id. `page` is zero-based.
    pub fn search(&self, q: &SearchQuery, page: usize, page_size: usize) -> Result<SearchPage> {
        q.validate()?;
        if page_size == 0 || page_size > MAX_PAGE_SIZE {
            return Err(StoreError::InvalidQuery(format!(
                "page size must be between 1 and {MAX_PAGE_SIZE}"
            )));
        }
        let rows: Vec<(String, String, String, Option<String>, String)> = {
            let conn = self.lock();
            let mut stmt = conn.prepare(
                "SELECT id, metadata, status, properties, user_properties FROM graphs WHERE deleted_at IS NULL",
            )?;
            let rows = stmt
                .query_map([], |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?, r.get(4)?)))?
                .collect::<rusqlite::Result<_>>()?;
            rows
        };
        let mut hits = Vec::new();
        for (id, meta, status, props, user) in rows {
            let meta: Metadata = from_json(&meta)?;
            let status: RecordStatus = status.parse()?;
            let props = merge_user(props.as_deref().map(from_json).transpose()?, &from_json(&user)?);
            if q.matches(&meta, status, props.as_ref()) {
                hits.push((meta.uploaded_at, id));
            }
        }
        hits.sort_unstable_by(|a, b| b.cmp(a));
        let total = hits.len();
        let ids = hits
            .into_iter()
            .skip(page.saturating_mul(page_size))
            .take(page_size)
            .map(|(_, id)| id.parse())
            .collect::<Result<_>>()?;
        Ok(SearchPage { total, ids })
    }

    pub fn summary(&self, id: &GraphId) -> Result<GraphSummary> {
        let conn = self.lock();
        Self::live(&conn, id)?;
        let (meta, status, node_count, edge_count, directed, props): (String, String, i64, i64, bool, Option<String>) =
            conn.query_row(
                "SELECT metadata, status, node_count, edge_count, directed, properties FROM graphs WHERE id = ?1",
                [id.as_str()],
                |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?, r.get(4)?, r.get(5)?)),
            )?;
        drop(conn);
        let meta: Metadata = from_json(&meta)?;
        let props: Option<PropertySet> = props.as_deref().map(from_json).transpose()?;
        Ok(GraphSummary {
            id: id.clone(),
            name: meta.name,
            tags: meta.tags.iter().map(|t| t.value().to_string()).collect(),
            status: status.parse()?,
            node_count: node_count as usize,
            edge_count: edge_count as usize,
            directed,
            is_planar: props.as_ref().and_then(|p| p.is_planar),
            is_connected: props.as_ref().and_then(|p| p.is_connected),
            uploaded_at: meta.uploaded_at,
        })
    }

    pub fn create_collection(&self, name: &str, description: &str) -> Result<CollectionId> {
        if name.trim().is_empty() {
            return Err(MetadataError::EmptyField("name").into());
        }
        let id = self.next_id();
        self.lock().execute(
            "INSERT INTO collections (id, name, description, created_at) VALUES (?1, ?2, ?3, ?4)",
            params![id.as_str(), name, description, timestamp(Utc::now())],
        )?;
        Ok(id)
    }

    /// Appends `graph` to the collection's ordered membership.
    pub fn add_to_collection(&self, cid: &CollectionId, graph: &GraphId) -> Result<()> {
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        Self::collection_exists(&tx, cid)?;
        Self::live(&tx, graph)?;
        let present: bool = tx.query_row(
            "SELECT EXISTS(SELECT 1 FROM collection_members WHERE collection_id = ?1 AND graph_id = ?2)",
            [cid.as_str(), graph.as_str()],
            |r| r.get(0),
        )?;
        if present {
            return Err(StoreError::DuplicateMember(graph.to_string()));
        }
        tx.execute(
            "INSERT INTO collection_members (collection_id, graph_id, position)
             SELECT ?1, ?2, COALESCE(MAX(position) + 1, 0) FROM collection_members WHERE collection_id = ?1",
            [cid.as_str(), graph.as_str()],
        )?;
        tx.commit()?;
        Ok(())
    }

    fn collection_exists(conn: &Connection, cid: &CollectionId) -> Result<()> {
        let found: bool = conn.query_row(
            "SELECT EXISTS(SELECT 1 FROM collections WHERE id = ?1)",
            [cid.as_str()],
            |r| r.get(0),
        )?;
        if found {
            Ok(())
        } else {
            Err(StoreError::NotFound(cid.to_string()))
        }
    }

    pub fn list_collection(&self, cid: &CollectionId) -> Result<Collection> {
        let conn = self.lock();
        let (name, description): (String, String) = conn
            .query_row(
                "SELECT name, description FROM collections WHERE id = ?1",
                [cid.as_str()],
                |r| Ok((r.get(0)?, r.get(1)?)),
            )
            .optional()?
            .ok_or_else(|| StoreError::NotFound(cid.to_string()))?;
        let mut stmt =
            conn.prepare("SELECT graph_id FROM collection_members WHERE collection_id = ?1 ORDER BY position")?;
        let members = stmt
            .query_map([cid.as_str()], |r| r.get(0))?
            .collect::<rusqlite::Result<Vec<String>>>()?;
        Ok(Collection {
            id: cid.to_string(),
            name,
            description,
            member_graph_ids: members,
        })
    }

    pub fn list_collections(&self) -> Result<Vec<Collection>> {
        let ids: Vec<String> = {
            let conn = self.lock();
            let mut stmt = conn.prepare("SELECT id FROM collections ORDER BY id")?;
            let ids = stmt.query_map([], |r| r.get(0))?.collect::<rusqlite::Result<_>>()?;
            ids
        };
        ids.iter().map(|id| self.list_collection(&id.parse()?)).collect()
    }

    pub fn insert_token(&self, token: &str, owner: &str) -> Result<ApiTokenRecord> {
        let rec = ApiTokenRecord {
            token: token.to_string(),
            owner: owner.to_string(),
            created_at: Utc::now(),
        };
        self.lock().execute(
            "INSERT INTO tokens (token, owner, created_at) VALUES (?1, ?2, ?3)",
            params![rec.token, rec.owner, timestamp(rec.created_at)],
        )?;
        Ok(rec)
    }

    pub fn token_owner(&self, token: &str) -> Result<Option<String>> {
        Ok(self
            .lock()
            .query_row("SELECT owner FROM tokens WHERE token = ?1", [token], |r| r.get(0))
            .optional()?)
    }

    /// Re-derives every live record's canonical graph from its original
    /// bytes and reports records where the two disagree.
    pub fn audit(&self) -> Result<Vec<AuditIssue>> {
        let rows: Vec<(String, String, i64, String)> = {
            let conn = self.lock();
            let mut stmt =
                conn.prepare("SELECT id, format, byte_len, canonical FROM graphs WHERE deleted_at IS NULL ORDER BY id")?;
            let rows = stmt
                .query_map([], |r| Ok((r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?)))?
                .collect::<rusqlite::Result<_>>()?;
            rows
        };
        let mut issues = Vec::new();
        for (id, format, len, canonical) in rows {
            let id: GraphId = id.parse()?;
            let problem = match fs::read(self.blob_path(&id)) {
                Err(e) => Some(format!("original unreadable: {e}")),
                Ok(bytes) if bytes.len() as i64 != len => {
                    Some(format!("original is {} bytes, expected {len}", bytes.len()))
                }
                Ok(bytes) => {
                    let format: FormatId = format.parse().map_err(corrupt)?;
                    match formats::parse(&bytes, format) {
                        Err(e) => Some(format!("original no longer parses: {e}")),
                        Ok(g) => match from_json::<Graph>(&canonical) {
                            Err(e) => Some(format!("canonical unreadable: {e}")),
                            Ok(c) if c != g => Some("canonical differs from the parsed original".into()),
                            Ok(_) => None,
                        },
                    }
                }
            };
            if let Some(problem) = problem {
                issues.push(AuditIssue { id, problem });
            }
        }
        Ok(issues)
    }

    pub(crate) fn names(&self, ids: &[GraphId]) -> Result<Vec<String>> {
        let conn = self.lock();
        ids.iter()
            .map(|id| {
                Self::live(&conn, id)?;
                let json: String =
                    conn.query_row("SELECT metadata FROM graphs WHERE id = ?1", [id.as_str()], |r| r.get(0))?;
                Ok(from_json::<Metadata>(&json)?.name)
            })
            .collect()
    }
}
