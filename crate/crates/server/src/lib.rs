//! Web service for the open graph archive: HTTP API, background analysis
//! worker and the pieces of the `oga` command-line tool.

pub mod api;
pub mod compare;
pub mod config;
pub mod error;
pub mod params;
pub mod worker;

use std::sync::Arc;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use oga_archive::{ApiTokenRecord, Store, StoreConfig, StoreError};
use rand::RngCore;

pub use api::{router, AppState};
pub use config::{ServerConfig, WorkerConfig};
pub use worker::Worker;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

pub fn open_store(config: &ServerConfig) -> Result<Store, StoreError> {
    Store::open_with(
        &config.data_dir,
        StoreConfig {
            max_total_bytes: config.max_archive_bytes,
        },
    )
}

/// Issues a random 32-byte token, URL-safe base64 encoded.
pub fn issue_token(store: &Store, owner: &str) -> Result<ApiTokenRecord, StoreError> {
    let mut bytes = [0u8; 32];
    rand::rng().fill_bytes(&mut bytes);
    store.insert_token(&URL_SAFE_NO_PAD.encode(bytes), owner)
}

/// A running service: shared state plus its worker. Needs a Tokio runtime.
pub struct Service {
    pub state: AppState,
    pub worker: Worker,
}

impl Service {
    pub fn start(config: ServerConfig) -> Result<Self, StoreError> {
        let store = Arc::new(open_store(&config)?);
        let worker = Worker::spawn(Arc::clone(&store), config.worker.clone());
        let state = AppState {
            store,
            config: Arc::new(config),
            jobs: worker.notifier(),
        };
        Ok(Service { state, worker })
    }

    pub fn router(&self) -> axum::Router {
        router(self.state.clone())
    }

    pub async fn stop(self) {
        self.worker.shutdown().await;
    }
}

/// Serves until Ctrl-C, then stops the worker.
pub async fn serve(config: ServerConfig) -> Result<(), ServeError> {
    let addr = config.listen_addr.clone();
    let service = Service::start(config)?;
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind { addr: addr.clone(), source })?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, service.router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    service.stop().await;
    Ok(())
}
