#![allow(dead_code)]

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use oga_archive::Store;
use oga_server::{issue_token, open_store, router, AppState, ServerConfig, Worker, WorkerConfig};
use serde_json::Value;
use tokio::sync::Notify;
use tower::ServiceExt;

pub fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn cycle(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

pub fn k33() -> Vec<(usize, usize)> {
    (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect()
}

pub fn path(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn gml(directed: bool, n: usize, edges: &[(usize, usize)]) -> Vec<u8> {
    let mut s = format!("graph [\n  directed {}\n", u8::from(directed));
    for i in 0..n {
        s.push_str(&format!("  node [ id {i} label \"v{i}\" ]\n"));
    }
    for (u, v) in edges {
        s.push_str(&format!("  edge [ source {u} target {v} ]\n"));
    }
    s.push_str("]\n");
    s.into_bytes()
}

pub fn zip_of(files: &[(&str, &[u8])]) -> Vec<u8> {
    use std::io::Write;
    use zip::write::SimpleFileOptions;
    let mut w = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
    for (name, data) in files {
        w.start_file(*name, SimpleFileOptions::default()).unwrap();
        w.write_all(data).unwrap();
    }
    w.finish().unwrap().into_inner()
}

pub fn unzip(bytes: &[u8]) -> Vec<(String, Vec<u8>)> {
    use std::io::Read;
    let mut a = zip::ZipArchive::new(std::io::Cursor::new(bytes)).unwrap();
    (0..a.len())
        .map(|i| {
            let mut f = a.by_index(i).unwrap();
            let mut data = Vec::new();
            f.read_to_end(&mut data).unwrap();
            (f.name().unwrap().to_string(), data)
        })
        .collect()
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{}: {e}: {}", self.status, String::from_utf8_lossy(&self.body)))
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).and_then(|v| v.to_str().ok())
    }
}

/// In-process API. The job notifier is not attached to a worker, so records
/// stay pending until `drain` is called.
pub struct TestApi {
    pub store: Arc<Store>,
    pub state: AppState,
    pub router: Router,
    pub token: String,
    _dir: Option<tempfile::TempDir>,
}

impl TestApi {
    pub fn new(tweak: impl FnOnce(&mut ServerConfig)) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut api = Self::at(dir.path(), tweak);
        api._dir = Some(dir);
        api
    }

    pub fn at(path: &std::path::Path, tweak: impl FnOnce(&mut ServerConfig)) -> Self {
        let mut config = ServerConfig::new(path);
        tweak(&mut config);
        let store = Arc::new(open_store(&config).unwrap());
        let token = issue_token(&store, "alice").unwrap().token;
        let state = AppState {
            store: Arc::clone(&store),
            config: Arc::new(config),
            jobs: Arc::new(Notify::new()),
        };
        TestApi {
            store,
            router: router(state.clone()),
            state,
            token,
            _dir: None,
        }
    }

    /// Starts a background worker and routes upload notifications to it.
    /// Must be called inside a Tokio runtime.
    pub fn attach_worker(&mut self, cfg: WorkerConfig) -> Worker {
        let worker = Worker::spawn(Arc::clone(&self.store), cfg);
        self.state.jobs = worker.notifier();
        self.router = router(self.state.clone());
        worker
    }

    pub async fn send(&self, method: Method, uri: &str, token: Option<&str>, body: Vec<u8>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        if body.first() == Some(&b'{') {
            req = req.header(header::CONTENT_TYPE, "application/json");
        }
        let resp = self.router.clone().oneshot(req.body(Body::from(body)).unwrap()).await.unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, headers, body }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, None, Vec::new()).await
    }

    pub async fn post(&self, uri: &str, body: impl Into<Vec<u8>>) -> Reply {
        self.send(Method::POST, uri, Some(&self.token.clone()), body.into()).await
    }

    pub async fn patch(&self, uri: &str, body: impl Into<Vec<u8>>) -> Reply {
        self.send(Method::PATCH, uri, Some(&self.token.clone()), body.into()).await
    }

    /// Uploads GML and returns the new id.
    pub async fn upload(&self, name: &str, query: &str, body: Vec<u8>) -> String {
        let r = self.post(&format!("/graphs?format=gml&name={name}&{query}"), body).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.body));
        r.json()["id"].as_str().unwrap().to_string()
    }

    pub async fn drain(&self) -> usize {
        let store = Arc::clone(&self.store);
        let cfg = self.state.config.worker.clone();
        tokio::task::spawn_blocking(move || oga_server::worker::drain(&store, &cfg))
            .await
            .unwrap()
            .unwrap()
    }

    /// Polls the record until it leaves the pending state.
    pub async fn wait_done(&self, id: &str, limit: Duration) -> Value {
        let start = Instant::now();
        loop {
            let v = self.get(&format!("/graphs/{id}")).await.json();
            if v["status"] != "pending-analysis" {
                return v;
            }
            assert!(start.elapsed() < limit, "{id} still pending after {limit:?}");
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }
}
