//! Brute-force reference implementations used to cross-check the fast
//! algorithms. Graphs are given as adjacency bitmasks over at most 16 nodes.
#![allow(dead_code)]

pub type Adj = Vec<u16>;

pub fn adj_from_edges(n: usize, edges: &[(usize, usize)]) -> Adj {
    let mut adj = vec![0u16; n];
    for &(u, v) in edges {
        if u != v {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
    }
    adj
}

fn connected_without(adj: &Adj, removed: u16) -> (bool, usize) {
    let n = adj.len();
    let alive: u16 = ((1u32 << n) - 1) as u16 & !removed;
    let count = alive.count_ones() as usize;
    if count == 0 {
        return (true, 0);
    }
    let start = alive.trailing_zeros() as usize;
    let mut seen: u16 = 1 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = adj[v] & alive & !seen;
        seen |= next;
        frontier |= next;
    }
    (seen == alive, count)
}

/// Smallest vertex set whose removal leaves a disconnected graph on at least
/// two vertices; `n - 1` when no such set exists.
pub fn brute_vertex_connectivity(adj: &Adj) -> usize {
    let n = adj.len();
    if n <= 1 {
        return 0;
    }
    let mut best = n - 1;
    for removed in 0u32..(1 << n) {
        let removed = removed as u16;
        let k = removed.count_ones() as usize;
        if k >= best {
            continue;
        }
        let (connected, alive) = connected_without(adj, removed);
        if alive >= 2 && !connected {
            best = k;
        }
    }
    best
}

fn has_edge(adj: &Adj, u: usize, v: usize) -> bool {
    adj[u] & (1 << v) != 0
}

/// Whether `a - order... - b` can be made a path using all vertices of `inner`
/// in some order.
fn path_through(adj: &Adj, a: usize, b: usize, inner: &mut Vec<usize>, k: usize) -> bool {
    if k == inner.len() {
        let mut prev = a;
        for &x in inner.iter() {
            if !has_edge(adj, prev, x) {
                return false;
            }
            prev = x;
        }
        return has_edge(adj, prev, b);
    }
    for i in k..inner.len() {
        inner.swap(k, i);
        let prev = if k == 0 { a } else { inner[k - 1] };
        if has_edge(adj, prev, inner[k]) && path_through(adj, a, b, inner, k + 1) {
            inner.swap(k, i);
            return true;
        }
        inner.swap(k, i);
    }
    false
}

/// Every extra vertex is either unused or subdivides exactly one pair.
fn assign(adj: &Adj, pairs: &[(usize, usize)], extras: &[usize], slots: &mut Vec<Vec<usize>>) -> bool {
    if let Some((&x, rest)) = extras.split_first() {
        if assign(adj, pairs, rest, slots) {
            return true;
        }
        for p in 0..pairs.len() {
            slots[p].push(x);
            let ok = assign(adj, pairs, rest, slots);
            slots[p].pop();
            if ok {
                return true;
            }
        }
        return false;
    }
    pairs
        .iter()
        .zip(slots.iter())
        .all(|(&(a, b), inner)| path_through(adj, a, b, &mut inner.clone(), 0))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

/// Searches exhaustively for a subdivision of K5 or K3,3.
pub fn brute_is_planar(adj: &Adj) -> bool {
    let n = adj.len();
    for branch in subsets(n, 5) {
        let pairs: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .map(|(i, j)| (branch[i], branch[j]))
            .collect();
        let extras: Vec<usize> = (0..n).filter(|v| !branch.contains(v)).collect();
        if assign(adj, &pairs, &extras, &mut vec![Vec::new(); pairs.len()]) {
            return false;
        }
    }
    for six in subsets(n, 6) {
        // fix six[0] on the left side to avoid mirrored duplicates
        for rest in subsets(5, 2) {
            let left = [six[0], six[rest[0] + 1], six[rest[1] + 1]];
            let right: Vec<usize> = six.iter().copied().filter(|v| !left.contains(v)).collect();
            let pairs: Vec<(usize, usize)> = left
                .iter()
                .flat_map(|&l| right.iter().map(move |&r| (l, r)))
                .collect();
            let extras: Vec<usize> = (0..n).filter(|v| !six.contains(v)).collect();
            if assign(adj, &pairs, &extras, &mut vec![Vec::new(); pairs.len()]) {
                return false;
            }
        }
    }
    true
}

/// Minimum number of edges whose inversion makes a digraph acyclic.
pub fn brute_min_inversions(n: usize, arcs: &[(usize, usize)]) -> usize {
    let m = arcs.len();
    assert!(m <= 20);
    (0u32..(1 << m))
        .filter(|mask| {
            let flipped: Vec<(usize, usize)> = arcs
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| if mask & (1 << i) != 0 { (v, u) } else { (u, v) })
                .collect();
            is_dag(n, &flipped)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .expect("inverting along any order gives a DAG")
}

pub fn is_dag(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0; n];
    for &(_, v) in arcs {
        indeg[v] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut done = 0;
    while let Some(v) = ready.pop() {
        done += 1;
        for &(a, b) in arcs {
            if a == v {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
    }
    done == n
}


pub mod roundtrip;
