//! Reproducible collection generators. Every generator is a deterministic
//! function of its inputs and seed.

mod north;
mod rome;

pub use north::{
    connect_randomly, dedup_labeled, eliminate_cycles, feedback_ordering, sanitize_north, CycleElimination,
};
pub use rome::{degree_histogram_distance, mutate_rome, MutationConfig, MutationOp, SuitabilityFilter};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("seed graph must be undirected")]
    NotUndirected,
    #[error("seed graph must be connected")]
    SeedDisconnected,
    #[error("graph must be directed")]
    NotDirected,
    #[error("input graph {0} is not directed")]
    NotDirectedAt(usize),
    #[error("no candidate passed the suitability filter in round {round} after {attempts} attempts")]
    FilterExhausted { round: usize, attempts: usize },
}

/// Creation-method text for graphs produced by [`mutate_rome`].
pub fn rome_provenance(cfg: &MutationConfig, seed_name: &str) -> String {
    let p = &cfg.op_probabilities;
    format!(
        "generator: rome-mutation\n\
         seed graph: {seed_name}\n\
         rng seed: {}\n\
         rounds: {}, variants per round: {}, operations per round: {}\n\
         operations: insert-vertex {:.4}, remove-vertex {:.4}, insert-edge {:.4}, remove-edge {:.4}, split-edge {:.4}\n\
         per-round perturbation: {}\n\
         size bounds: {}..={}\n\
         filter: connected={}, density {}..={}, degree histogram distance <= {}\n",
        cfg.rng_seed,
        cfg.rounds,
        cfg.variants_per_round,
        cfg.ops_per_round,
        p[0],
        p[1],
        p[2],
        p[3],
        p[4],
        cfg.epsilon,
        cfg.size_bounds.0,
        cfg.size_bounds.1,
        cfg.filter.require_connected,
        cfg.filter.density_bounds.0,
        cfg.filter.density_bounds.1,
        cfg.filter.max_degree_seq_distance,
    )
}

/// Creation-method text for graphs produced by [`sanitize_north`].
pub fn north_provenance(rng_seed: u64, inputs: usize, outputs: usize) -> String {
    format!(
        "generator: north-dag-sanitization\n\
         rng seed: {rng_seed}\n\
         steps: labeled deduplication, random minimal connection, greedy feedback-arc inversion, final deduplication\n\
         inputs: {inputs}, outputs: {outputs}\n"
    )
}
