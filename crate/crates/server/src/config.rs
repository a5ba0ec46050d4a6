use std::path::PathBuf;
use std::time::Duration;

use oga_core::analysis::AnalysisConfig;

pub const DEFAULT_LISTEN_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;
/// Graphs above this size get no drawing.
pub const DEFAULT_LAYOUT_NODE_LIMIT: usize = 1000;

#[derive(Debug, Clone)]
pub struct WorkerConfig {
    pub analysis: AnalysisConfig,
    pub layout_node_limit: usize,
    pub layout_seed: u64,
    /// How often the queue is re-scanned when nobody signals new work.
    pub poll_interval: Duration,
}

impl Default for WorkerConfig {
    fn default() -> Self {
        WorkerConfig {
            analysis: AnalysisConfig::default(),
            layout_node_limit: DEFAULT_LAYOUT_NODE_LIMIT,
            layout_seed: 0,
            poll_interval: Duration::from_secs(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub data_dir: PathBuf,
    pub listen_addr: String,
    /// Accept writes without a token.
    pub open_mode: bool,
    /// Reject uploads that do not set `license_ack=true`.
    pub require_license_ack: bool,
    pub max_upload_bytes: usize,
    /// Caps the summed size of stored originals.
    pub max_archive_bytes: Option<u64>,
    pub worker: WorkerConfig,
}

impl ServerConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServerConfig {
            data_dir: data_dir.into(),
            listen_addr: DEFAULT_LISTEN_ADDR.to_string(),
            open_mode: false,
            require_license_ack: false,
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            max_archive_bytes: None,
            worker: WorkerConfig::default(),
        }
    }
}
