use crate::model::{Graph, SimpleGraph};

/// Component index per node (weak connectivity) and the component count.
pub(crate) fn component_labels(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    (out, next)
}

/// Node-id sets of the (weakly) connected components, ordered by first node.
pub fn connected_components(g: &Graph) -> Vec<Vec<String>> {
    let (labels, count) = component_labels(g.node_count(), g.edge_indices());
    let mut out = vec![Vec::new(); count];
    for (node, c) in g.nodes().iter().zip(labels) {
        out[c].push(node.id.clone());
    }
    out
}

/// Biconnected components of a simple graph as edge lists `(u, v)` with `u < v`,
/// together with the articulation points in ascending order.
pub fn biconnected_components_simple(g: &SimpleGraph) -> (Vec<Vec<(usize, usize)>>, Vec<usize>) {
    let n = g.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut components = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut time = 0;

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbor position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(frame) = stack.last_mut() {
            let (v, parent, pos) = *frame;
            if let Some(&w) = g.neighbors(v).get(pos) {
                frame.2 += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            if parent == usize::MAX {
                continue;
            }
            low[parent] = low[parent].min(low[v]);
            if low[v] >= disc[parent] {
                if parent != root {
                    is_cut[parent] = true;
                }
                let mut comp = Vec::new();
                while let Some((a, b)) = edge_stack.pop() {
                    comp.push((a.min(b), a.max(b)));
                    if (a, b) == (parent, v) {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    let cuts = (0..n).filter(|&v| is_cut[v]).collect();
    (components, cuts)
}

/// Biconnected components of the simple undirected view, as edge lists
/// over node ids.
pub fn biconnected_components(g: &Graph) -> Vec<Vec<(String, String)>> {
    let (comps, _) = biconnected_components_simple(&g.simple_view());
    let id = |i: usize| g.nodes()[i].id.clone();
    comps
        .into_iter()
        .map(|c| c.into_iter().map(|(u, v)| (id(u), id(v))).collect())
        .collect()
}

/// Articulation points of the simple undirected view.
pub fn articulation_points(g: &Graph) -> Vec<String> {
    let (_, cuts) = biconnected_components_simple(&g.simple_view());
    cuts.into_iter().map(|i| g.nodes()[i].id.clone()).collect()
}

/// Two-colorability of the undirected view; a self-loop is an odd cycle.
pub fn is_bipartite(g: &Graph) -> bool {
    if g.edges().iter().any(|e| e.is_loop()) {
        return false;
    }
    is_bipartite_simple(&g.simple_view())
}

pub(crate) fn is_bipartite_simple(g: &SimpleGraph) -> bool {
    let n = g.node_count();
    let mut color = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Directed graphs: no directed cycle (self-loops count). Undirected graphs:
/// the multigraph is a forest.
pub fn is_acyclic(g: &Graph) -> bool {
    let n = g.node_count();
    if g.is_directed() {
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, t) in g.edge_indices() {
            out[s].push(t);
            indeg[t] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        seen == n
    } else {
        let (_, count) = component_labels(n, g.edge_indices());
        g.edges().iter().all(|e| !e.is_loop()) && g.edge_count() + count == n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_graph, EdgeRecord, NodeRecord};

    fn graph(directed: bool, n: usize, edges: &[(usize, usize)]) -> Graph {
        build_graph(
            directed,
            (0..n).map(|i| NodeRecord::new(i.to_string())).collect(),
            edges
                .iter()
                .map(|&(u, v)| EdgeRecord::new(u.to_string(), v.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&graph(false, 4, &[(0, 1), (1, 2), (2, 3)])).len(), 1);
        let two = graph(false, 6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(connected_components(&two).len(), 2);
        assert!(connected_components(&Graph::empty(false)).is_empty());
        assert_eq!(connected_components(&graph(true, 3, &[(1, 0), (1, 2)])).len(), 1);
    }

    #[test]
    fn biconnected() {
        let bowtie = graph(false, 5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert_eq!(biconnected_components(&bowtie).len(), 2);
        assert_eq!(articulation_points(&bowtie), vec!["2".to_string()]);
        let c5 = graph(false, 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(biconnected_components(&c5).len(), 1);
        assert!(articulation_points(&c5).is_empty());
        let tree = graph(false, 4, &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(biconnected_components(&tree).len(), 3);
        assert_eq!(articulation_points(&tree), vec!["1".to_string()]);
    }

    #[test]
    fn bipartite_and_acyclic() {
        assert!(is_bipartite(&graph(false, 4, &[(0, 1), (1, 2), (2, 3), (3, 0)])));
        assert!(!is_bipartite(&graph(false, 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])));
        assert!(!is_bipartite(&graph(false, 1, &[(0, 0)])));
        assert!(is_acyclic(&graph(true, 3, &[(0, 1), (1, 2)])));
        assert!(!is_acyclic(&graph(true, 3, &[(0, 1), (1, 2), (2, 0)])));
        assert!(!is_acyclic(&graph(true, 1, &[(0, 0)])));
        assert!(is_acyclic(&graph(false, 4, &[(0, 1), (2, 3)])));
        assert!(!is_acyclic(&graph(false, 2, &[(0, 1), (1, 0)])));
        assert!(!is_acyclic(&graph(false, 3, &[(0, 1), (1, 2), (2, 0)])));
    }
}
