mod oracles;

use oga_core::analysis::{connected_components, is_acyclic};
use oga_core::generators::{eliminate_cycles, north_provenance, rome_provenance, sanitize_north, MutationConfig};
use oga_core::model::{build_graph, EdgeRecord, Graph, NodeRecord};
use oracles::brute_min_inversions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn digraph(n: usize, arcs: &[(usize, usize)]) -> Graph {
    build_graph(
        true,
        (0..n).map(|i| NodeRecord::new(i.to_string())).collect(),
        arcs.iter()
            .map(|&(u, v)| EdgeRecord::new(u.to_string(), v.to_string()))
            .collect(),
    )
    .unwrap()
}

#[test]
fn inversion_counts_match_brute_force_minimum() {
    let tri = [(0, 1), (1, 2), (2, 0)];
    let two = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
    assert_eq!(brute_min_inversions(3, &tri), 1);
    assert_eq!(brute_min_inversions(6, &two), 2);
    assert_eq!(eliminate_cycles(&digraph(3, &tri)).unwrap().inverted.len(), 1);
    assert_eq!(eliminate_cycles(&digraph(6, &two)).unwrap().inverted.len(), 2);
}

#[test]
fn heuristic_is_never_below_the_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let arcs: Vec<(usize, usize)> = (0..rng.random_range(1..=12))
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .filter(|(u, v)| u != v)
            .collect();
        let out = eliminate_cycles(&digraph(n, &arcs)).unwrap();
        assert!(is_acyclic(&out.graph));
        assert!(out.inverted.len() >= brute_min_inversions(n, &arcs));
    }
}

#[test]
fn north_pipeline_on_random_digraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inputs: Vec<Graph> = (0..100)
        .map(|_| {
            let n = rng.random_range(10..=100);
            let m = rng.random_range(0..2 * n);
            let arcs: Vec<_> = (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            digraph(n, &arcs)
        })
        .collect();
    let out = sanitize_north(&inputs, 3).unwrap();
    assert!(!out.is_empty());
    for g in &out {
        assert!(is_acyclic(g));
        assert_eq!(connected_components(g).len(), 1);
    }
    assert_eq!(out, sanitize_north(&inputs, 3).unwrap());
}

#[test]
fn provenance_text_names_the_procedure() {
    let text = rome_provenance(&MutationConfig::default(), "C10");
    assert!(text.starts_with("generator: rome-mutation\n"));
    assert!(text.contains("seed graph: C10"));
    assert!(north_provenance(1, 5, 4).contains("inputs: 5, outputs: 4"));
}
