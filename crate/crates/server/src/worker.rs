//! Background analysis and layout.
//!
//! The queue is the set of records whose status is still pending, so work
//! left over from a crash is picked up on the next start. Jobs are
//! idempotent: completing an already finished record is a no-op.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use oga_archive::{GraphId, JobResult, Store, StoreError};
use oga_core::analysis::{analyze, AnalysisError};
use oga_core::layout::{layout_force_directed, render_svg, SvgStyle, DEFAULT_ITERATIONS};
use oga_core::Graph;
use tokio::sync::{watch, Notify};
use tokio::task::JoinHandle;

use crate::config::WorkerConfig;

/// Fewer iterations for larger graphs keeps layout time roughly flat.
pub fn layout_iterations(n: usize) -> usize {
    if n <= 200 {
        DEFAULT_ITERATIONS
    } else {
        (DEFAULT_ITERATIONS * 200 / n).max(50)
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

fn compute(g: &Graph, cfg: &WorkerConfig) -> JobResult {
    let analysis = match catch_unwind(AssertUnwindSafe(|| analyze(g, &cfg.analysis))) {
        Ok(Ok(p)) => Ok(p),
        Ok(Err(AnalysisError::TimeBudgetExceeded { partial })) => Ok(*partial),
        Ok(Err(e)) => Err(e.to_string()),
        Err(p) => Err(format!("analysis crashed: {}", panic_message(p))),
    };
    let layout = if g.node_count() <= cfg.layout_node_limit {
        catch_unwind(AssertUnwindSafe(|| {
            let layout = layout_force_directed(g, layout_iterations(g.node_count()), cfg.layout_seed).ok()?;
            let svg = render_svg(g, &layout, &SvgStyle::default()).ok()?;
            Some((layout, svg))
        }))
        .ok()
        .flatten()
    } else {
        None
    };
    JobResult { analysis, layout }
}

/// Analyzes and lays out one record. Returns whether the record changed.
pub fn run_job(store: &Store, id: &GraphId, cfg: &WorkerConfig) -> Result<bool, StoreError> {
    let g = store.canonical(id)?;
    let mut result = compute(&g, cfg);
    if let Some((layout, _)) = &mut result.layout {
        layout.graph_id = Some(id.to_string());
        layout.computed_at = Some(chrono::Utc::now());
    }
    store.complete_job(id, result)
}

/// Processes every pending record in id order. Returns how many changed.
pub fn drain(store: &Store, cfg: &WorkerConfig) -> Result<usize, StoreError> {
    let mut done = 0;
    for id in store.pending_ids()? {
        match run_job(store, &id, cfg) {
            Ok(changed) => done += usize::from(changed),
            Err(StoreError::Gone(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(done)
}

/// The single worker consuming the queue.
pub struct Worker {
    notify: Arc<Notify>,
    shutdown: watch::Sender<bool>,
    handle: JoinHandle<()>,
}

impl Worker {
    pub fn spawn(store: Arc<Store>, cfg: WorkerConfig) -> Self {
        let notify = Arc::new(Notify::new());
        let (shutdown, mut stop) = watch::channel(false);
        let wake = Arc::clone(&notify);
        let handle = tokio::spawn(async move {
            loop {
                let (s, c) = (Arc::clone(&store), cfg.clone());
                let pending = tokio::task::spawn_blocking(move || s.pending_ids()).await;
                let pending = match pending {
                    Ok(Ok(ids)) => ids,
                    Ok(Err(e)) => {
                        tracing::error!("cannot read job queue: {e}");
                        Vec::new()
                    }
                    Err(e) => {
                        tracing::error!("queue scan crashed: {e}");
                        Vec::new()
                    }
                };
                let mut progressed = false;
                for id in pending {
                    if *stop.borrow() {
                        return;
                    }
                    let (s, c) = (Arc::clone(&store), c.clone());
                    let job_id = id.clone();
                    match tokio::task::spawn_blocking(move || run_job(&s, &job_id, &c)).await {
                        Ok(Ok(changed)) => progressed |= changed,
                        Ok(Err(StoreError::Gone(_))) => {}
                        Ok(Err(e)) => tracing::warn!(%id, "job failed: {e}"),
                        Err(e) => tracing::warn!(%id, "job crashed: {e}"),
                    }
                }
                if progressed {
                    continue;
                }
                tokio::select! {
                    _ = wake.notified() => {}
                    _ = tokio::time::sleep(cfg.poll_interval) => {}
                    _ = stop.changed() => return,
                }
                if *stop.borrow() {
                    return;
                }
            }
        });
        Worker {
            notify,
            shutdown,
            handle,
        }
    }

    /// Handle used to signal new work.
    pub fn notifier(&self) -> Arc<Notify> {
        Arc::clone(&self.notify)
    }

    /// Stops after the job in progress, if any.
    pub async fn shutdown(self) {
        let _ = self.shutdown.send(true);
        let _ = self.handle.await;
    }
}
