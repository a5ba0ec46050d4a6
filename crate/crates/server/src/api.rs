//! HTTP handlers. Reads are public; writes need a bearer token unless the
//! server runs in open mode.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use chrono::Utc;
use oga_archive::{
    CollectionId, GraphId, GraphRecord, ImportOptions, MetadataPatch, RecordStatus, Store, StoreError,
};
use oga_core::formats::{self, FormatId, LossReport};
use oga_core::metadata::{Reference, ReferenceKind, Tag, TagKind};
use oga_core::Metadata;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tokio::sync::Notify;

use crate::compare::{compare, MAX_COMPARED, MIN_COMPARED};
use crate::config::ServerConfig;
use crate::error::ApiError;
use crate::params::{parse_bool, search_request};

/// Header carrying the JSON loss report of a converted download.
pub const LOSS_REPORT_HEADER: &str = "x-loss-report";
/// Owner recorded for unauthenticated writes in open mode.
pub const GUEST: &str = "guest";

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub config: Arc<ServerConfig>,
    /// Wakes the analysis worker.
    pub jobs: Arc<Notify>,
}

pub fn router(state: AppState) -> Router {
    let limit = state.config.max_upload_bytes;
    Router::new()
        .route("/healthz", get(healthz))
        .route("/graphs", post(upload))
        .route("/graphs/{id}", get(get_graph).delete(delete_graph))
        .route("/graphs/{id}/download", get(download))
        .route("/graphs/{id}/image.svg", get(image))
        .route("/graphs/{id}/metadata", patch(patch_metadata))
        .route("/graphs/{id}/comments", post(add_comment))
        .route("/graphs/{id}/references", post(add_reference))
        .route("/graphs/{id}/properties", post(set_properties))
        .route("/search", get(search))
        .route("/compare", get(compare_graphs))
        .route("/collections", post(create_collection).get(list_collections))
        .route("/collections/{cid}", get(get_collection))
        .route("/collections/{cid}/members", post(add_member))
        .route("/import", post(import))
        .route("/export", get(export))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

async fn blocking<T, E>(state: &AppState, f: impl FnOnce(&Store) -> Result<T, E> + Send + 'static) -> Result<T, ApiError>
where
    T: Send + 'static,
    E: Into<ApiError> + Send + 'static,
{
    let store = Arc::clone(&state.store);
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(Into::into)
}

/// Owner of the presented token, or [`GUEST`] in open mode. An invalid token
/// is rejected even in open mode.
async fn writer(state: &AppState, headers: &HeaderMap) -> Result<String, ApiError> {
    let token = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(|t| t.trim().to_string());
    match token {
        Some(t) => blocking(state, move |s| s.token_owner(&t))
            .await?
            .ok_or_else(ApiError::unauthorized),
        None if state.config.open_mode => Ok(GUEST.to_string()),
        None => Err(ApiError::unauthorized()),
    }
}

fn graph_id(raw: &str) -> Result<GraphId, ApiError> {
    Ok(raw.parse::<GraphId>()?)
}

fn graph_uri(id: &GraphId) -> String {
    format!("/graphs/{id}")
}

fn format_param(raw: &str) -> Result<FormatId, ApiError> {
    raw.parse::<FormatId>().map_err(|_| {
        ApiError::bad_request(
            "unknown-format",
            format!("unknown format {raw:?}; use gml, graphml, dimacs or matrix-market"),
        )
    })
}

fn split_list(params: &[(String, String)], key: &str) -> Vec<String> {
    params
        .iter()
        .filter(|(k, _)| k == key)
        .flat_map(|(_, v)| v.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse_tags(raw: &[String]) -> Result<Vec<Tag>, ApiError> {
    raw.iter()
        .map(|t| Tag::freeform(t).map_err(|e| StoreError::from(e).into()))
        .collect()
}

fn attachment(name: &str) -> HeaderValue {
    HeaderValue::from_str(&format!("attachment; filename=\"{name}\"")).expect("ids and extensions are header-safe")
}

fn loss_header(report: &LossReport) -> HeaderValue {
    let json = serde_json::to_string(report).unwrap_or_default();
    HeaderValue::from_str(&json).unwrap_or_else(|_| HeaderValue::from_static("{\"unencodable\":true}"))
}

pub fn record_json(rec: &GraphRecord) -> Value {
    let id = &rec.id;
    json!({
        "id": id,
        "uri": graph_uri(id),
        "status": rec.status,
        "status_message": rec.status_message,
        "original_format": rec.original_format,
        "original_size": rec.original_size,
        "node_count": rec.canonical.node_count(),
        "edge_count": rec.canonical.edge_count(),
        "directed": rec.canonical.is_directed(),
        "metadata": rec.metadata,
        "properties": rec.properties,
        "user_properties": rec.user_properties,
        "layout": rec.layout.as_ref().map(|l| json!({
            "algorithm": l.algorithm,
            "iterations": l.iterations,
            "seed": l.seed,
            "computed_at": l.computed_at,
        })),
        "image": rec.layout.as_ref().map(|_| format!("/graphs/{id}/image.svg")),
        "downloads": FormatId::ALL
            .iter()
            .map(|f| (f.as_str().to_string(), json!(format!("/graphs/{id}/download?format={f}"))))
            .collect::<Map<_, _>>(),
    })
}

async fn healthz(State(state): State<AppState>) -> Result<Json<Value>, ApiError> {
    let pending = blocking(&state, |s| s.pending_ids()).await?.len();
    Ok(Json(json!({ "status": "ok", "pending": pending })))
}

#[derive(Debug, Default, Deserialize)]
struct UploadParams {
    format: Option<String>,
    name: Option<String>,
    creator: Option<String>,
    description: Option<String>,
    creation_method: Option<String>,
    license: Option<String>,
    /// Comma separated.
    tags: Option<String>,
    license_ack: Option<String>,
}

async fn upload(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(p): Query<UploadParams>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let owner = writer(&state, &headers).await?;
    if state.config.require_license_ack && !p.license_ack.as_deref().map(|v| parse_bool("license_ack", v)).transpose()?.unwrap_or(false) {
        return Err(ApiError::bad_request(
            "license-ack-required",
            "confirm the right to publish this graph with license_ack=true",
        ));
    }
    let name = p
        .name
        .filter(|n| !n.trim().is_empty())
        .ok_or_else(|| ApiError::bad_request("invalid-metadata", "name is required"))?;
    let creator = match p.creator.filter(|c| !c.trim().is_empty()) {
        Some(c) => c,
        None if owner != GUEST => owner,
        None => return Err(ApiError::bad_request("invalid-metadata", "creator is required")),
    };
    let format = match p.format {
        Some(f) => format_param(&f)?,
        None => formats::detect_format(&body)?,
    };
    let mut meta = Metadata::new(name, creator, Utc::now()).map_err(StoreError::from)?;
    meta.description = p.description.filter(|s| !s.trim().is_empty());
    meta.creation_method = p.creation_method.filter(|s| !s.trim().is_empty());
    meta.license = p.license.filter(|s| !s.trim().is_empty());
    let tags: Vec<String> = p.tags.iter().flat_map(|t| t.split(',')).map(str::trim).filter(|t| !t.is_empty()).map(str::to_string).collect();
    meta.set_tags(parse_tags(&tags)?);
    let id = blocking(&state, move |s| s.put_graph(&body, format, meta)).await?;
    state.jobs.notify_one();
    let uri = graph_uri(&id);
    let mut resp = (
        StatusCode::CREATED,
        Json(json!({ "id": id, "uri": uri, "status": RecordStatus::PendingAnalysis })),
    )
        .into_response();
    resp.headers_mut()
        .insert(header::LOCATION, HeaderValue::from_str(&uri).expect("uri is ascii"));
    Ok(resp)
}

async fn get_graph(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let id = graph_id(&id)?;
    let rec = blocking(&state, move |s| s.get_record(&id)).await?;
    Ok(Json(record_json(&rec)))
}

async fn delete_graph(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    writer(&state, &headers).await?;
    let id = graph_id(&id)?;
    blocking(&state, move |s| s.delete_graph(&id)).await?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
struct DownloadParams {
    format: Option<String>,
}

/// Without `format` the original submission is returned byte for byte.
async fn download(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(p): Query<DownloadParams>,
) -> Result<Response, ApiError> {
    let id = graph_id(&id)?;
    let target = p.format.as_deref().map(format_param).transpose()?;
    let (bytes, format, report) = {
        let id = id.clone();
        blocking(&state, move |s| -> Result<_, ApiError> {
            match target {
                None => {
                    let (bytes, format) = s.get_original_bytes(&id)?;
                    Ok((bytes, format, LossReport::default()))
                }
                Some(f) => {
                    let (bytes, report) = formats::serialize(&s.canonical(&id)?, f)?;
                    Ok((bytes, f, report))
                }
            }
        })
        .await?
    };
    let mut resp = bytes.into_response();
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static(format.media_type()));
    h.insert(header::CONTENT_DISPOSITION, attachment(&format!("{id}.{}", format.extension())));
    h.insert(LOSS_REPORT_HEADER, loss_header(&report));
    Ok(resp)
}

async fn image(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let id = graph_id(&id)?;
    let (svg, status) = blocking(&state, move |s| Ok::<_, StoreError>((s.svg(&id)?, s.status(&id)?))).await?;
    match svg {
        Some(svg) => Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response()),
        None if status.is_pending() => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "not-rendered",
            "the drawing has not been computed yet",
        )),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "not-rendered",
            "no drawing is available for this graph",
        )),
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TagInput {
    Plain(String),
    Kinded { value: String, kind: TagKind },
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct MetadataBody {
    name: Option<String>,
    creator: Option<String>,
    description: Option<String>,
    creation_method: Option<String>,
    license: Option<String>,
    tags: Option<Vec<TagInput>>,
}

async fn patch_metadata(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Json(body): Json<MetadataBody>,
) -> Result<Json<Value>, ApiError> {
    writer(&state, &headers).await?;
    let id = graph_id(&id)?;
    let tags = body
        .tags
        .map(|tags| {
            tags.into_iter()
                .map(|t| match t {
                    TagInput::Plain(v) => Tag::freeform(&v),
                    TagInput::Kinded { value, kind } => Tag::new(&value, kind),
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(StoreError::from)
        })
        .transpose()?;
    let patch = MetadataPatch {
        name: body.name,
        creator: body.creator,
        description: body.description,
        creation_method: body.creation_method,
        license: body.license,
        tags,
    };
    let meta = blocking(&state, move |s| s.update_metadata(&id, patch)).await?;
    Ok(Json(json!(meta)))
}

#[derive(Debug, Deserialize)]
struct CommentBody {
    author: Option<String>,
    text: String,
}

async fn add_comment(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Json(body): Json<CommentBody>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let owner = writer(&state, &headers).await?;
    let id = graph_id(&id)?;
    let author = body.author.filter(|a| !a.trim().is_empty()).unwrap_or(owner);
    let comment = blocking(&state, move |s| s.add_comment(&id, &author, &body.text)).await?;
    Ok((StatusCode::CREATED, Json(json!(comment))))
}

#[derive(Debug, Deserialize)]
struct ReferenceBody {
    kind: ReferenceKind,
    citation_or_url: String,
}

async fn add_reference(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Json(body): Json<ReferenceBody>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    writer(&state, &headers).await?;
    let id = graph_id(&id)?;
    let reference = Reference::new(body.kind, body.citation_or_url).map_err(StoreError::from)?;
    let stored = reference.clone();
    blocking(&state, move |s| s.add_reference(&id, stored)).await?;
    Ok((StatusCode::CREATED, Json(json!(reference))))
}

/// Body: `{"crossing_number": 1}`; only user-settable properties are accepted.
async fn set_properties(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Json(body): Json<Map<String, Value>>,
) -> Result<Json<Value>, ApiError> {
    writer(&state, &headers).await?;
    let id = graph_id(&id)?;
    let user = blocking(&state, move |s| {
        for (name, value) in &body {
            s.set_user_property(&id, name, value)?;
        }
        s.get_record(&id).map(|r| r.user_properties)
    })
    .await?;
    Ok(Json(json!(user)))
}

async fn search(
    State(state): State<AppState>,
    Query(params): Query<Vec<(String, String)>>,
) -> Result<Json<Value>, ApiError> {
    let req = search_request(&params)?;
    let (page, page_size) = (req.page, req.page_size);
    let (total, summaries) = blocking(&state, move |s| {
        let found = s.search(&req.query, req.page, req.page_size)?;
        let summaries = found.ids.iter().map(|id| s.summary(id)).collect::<Result<Vec<_>, _>>()?;
        Ok::<_, StoreError>((found.total, summaries))
    })
    .await?;
    let results: Vec<Value> = summaries
        .into_iter()
        .map(|sm| {
            let mut v = json!(sm);
            v["uri"] = json!(graph_uri(&sm.id));
            v["thumbnail"] = json!(format!("/graphs/{}/image.svg", sm.id));
            v
        })
        .collect();
    Ok(Json(json!({
        "total": total,
        "page": page,
        "page_size": page_size,
        "results": results,
    })))
}

async fn compare_graphs(
    State(state): State<AppState>,
    Query(params): Query<Vec<(String, String)>>,
) -> Result<Json<Value>, ApiError> {
    let raw = split_list(&params, "ids");
    if !(MIN_COMPARED..=MAX_COMPARED).contains(&raw.len()) {
        return Err(ApiError::bad_request(
            "invalid-parameter",
            format!("compare takes {MIN_COMPARED} to {MAX_COMPARED} ids, got {}", raw.len()),
        ));
    }
    let ids = raw.iter().map(|r| graph_id(r)).collect::<Result<Vec<_>, _>>()?;
    let records = blocking(&state, move |s| ids.iter().map(|id| s.get_record(id)).collect::<Result<Vec<_>, _>>()).await?;
    if let Some(pending) = records.iter().find(|r| r.status.is_pending()) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "analysis-pending",
            format!("graph {} has not been analyzed yet", pending.id),
        ));
    }
    let rows: Vec<_> = records
        .into_iter()
        .map(|r| (r.id.to_string(), r.metadata.name, r.properties))
        .collect();
    Ok(Json(json!(compare(&rows))))
}

#[derive(Debug, Deserialize)]
struct CollectionBody {
    name: String,
    #[serde(default)]
    description: String,
}

fn collection_json(c: &oga_core::metadata::Collection) -> Value {
    json!({
        "id": c.id,
        "uri": format!("/collections/{}", c.id),
        "name": c.name,
        "description": c.description,
        "member_graph_ids": c.member_graph_ids,
    })
}

async fn create_collection(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(body): Json<CollectionBody>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    writer(&state, &headers).await?;
    let c = blocking(&state, move |s| {
        let id = s.create_collection(&body.name, &body.description)?;
        s.list_collection(&id)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(collection_json(&c))))
}

async fn list_collections(State(state): State<AppState>) -> Result<Json<Value>, ApiError> {
    let all = blocking(&state, |s| s.list_collections()).await?;
    Ok(Json(json!({ "collections": all.iter().map(collection_json).collect::<Vec<_>>() })))
}

async fn get_collection(State(state): State<AppState>, Path(cid): Path<String>) -> Result<Json<Value>, ApiError> {
    let cid: CollectionId = graph_id(&cid)?;
    let c = blocking(&state, move |s| s.list_collection(&cid)).await?;
    Ok(Json(collection_json(&c)))
}

#[derive(Debug, Deserialize)]
struct MemberBody {
    graph_id: String,
}

async fn add_member(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(cid): Path<String>,
    Json(body): Json<MemberBody>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    writer(&state, &headers).await?;
    let cid: CollectionId = graph_id(&cid)?;
    let gid = graph_id(&body.graph_id)?;
    let c = blocking(&state, move |s| {
        s.add_to_collection(&cid, &gid)?;
        s.list_collection(&cid)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(collection_json(&c))))
}

/// Query: `creator=`, `tags=a,b`, and repeatable `format=<entry name>:<format>`.
async fn import(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<Vec<(String, String)>>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let owner = writer(&state, &headers).await?;
    let mut options = ImportOptions {
        creator: owner,
        ..ImportOptions::default()
    };
    for (k, v) in &params {
        match k.as_str() {
            "creator" if !v.trim().is_empty() => options.creator = v.clone(),
            "creator" | "tags" => {}
            "format" => {
                let (file, f) = v
                    .rsplit_once(':')
                    .ok_or_else(|| ApiError::bad_request("invalid-parameter", "format expects <entry name>:<format>"))?;
                options.formats.insert(file.to_string(), format_param(f)?);
            }
            other => {
                return Err(ApiError::bad_request("invalid-parameter", format!("unknown parameter {other}")))
            }
        }
    }
    options.tags = parse_tags(&split_list(&params, "tags"))?;
    let entries = blocking(&state, move |s| s.import_zip(&body, &options)).await?;
    let committed = entries.iter().filter(|e| e.result.is_ok()).count();
    if committed > 0 {
        state.jobs.notify_one();
    }
    let results: Vec<Value> = entries
        .into_iter()
        .map(|e| match e.result {
            Ok(id) => json!({ "filename": e.filename, "id": id, "uri": graph_uri(&id) }),
            Err(err) => {
                let err = ApiError::from(err);
                let mut detail = err.details;
                detail.insert("error".into(), json!(err.code));
                detail.insert("message".into(), json!(err.message));
                json!({ "filename": e.filename, "error": detail })
            }
        })
        .collect();
    Ok(Json(json!({ "committed": committed, "results": results })))
}

async fn export(
    State(state): State<AppState>,
    Query(params): Query<Vec<(String, String)>>,
) -> Result<Response, ApiError> {
    let ids = split_list(&params, "ids")
        .iter()
        .map(|r| graph_id(r))
        .collect::<Result<Vec<_>, _>>()?;
    if ids.is_empty() {
        return Err(ApiError::bad_request("invalid-parameter", "ids is required"));
    }
    let format = match params.iter().find(|(k, _)| k == "format") {
        Some((_, f)) => format_param(f)?,
        None => return Err(ApiError::bad_request("invalid-parameter", "format is required")),
    };
    let zip = blocking(&state, move |s| s.export_zip(&ids, format)).await?;
    let mut resp = zip.into_response();
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/zip"));
    h.insert(header::CONTENT_DISPOSITION, attachment("export.zip"));
    Ok(resp)
}
