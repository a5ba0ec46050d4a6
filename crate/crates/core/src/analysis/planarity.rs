//! Left-right planarity test (testing phase only; no embedding is built).

use crate::model::{Graph, SimpleGraph};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    const EMPTY: Interval = Interval { low: NONE, high: NONE };

    fn is_empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Debug, Clone, Copy)]
struct ConflictPair {
    id: u64,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    // oriented edges, indexed by edge id
    src: Vec<usize>,
    dst: Vec<usize>,
    oriented: Vec<bool>,
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    out: Vec<Vec<usize>>,
    roots: Vec<usize>,
    refs: Vec<usize>,
    lowpt_edge: Vec<usize>,
    stack_bottom: Vec<Option<u64>>,
    stack: Vec<ConflictPair>,
    next_id: u64,
    // per-vertex adjacency cursor and per-edge resume flag, shared by all DFS roots
    ind: Vec<usize>,
    skip_init: Vec<bool>,
}

impl LrState {
    fn new(n: usize, m: usize) -> Self {
        LrState {
            src: vec![NONE; m],
            dst: vec![NONE; m],
            oriented: vec![false; m],
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            out: vec![Vec::new(); n],
            roots: Vec::new(),
            refs: vec![NONE; m],
            lowpt_edge: vec![NONE; m],
            stack_bottom: vec![None; m],
            stack: Vec::new(),
            next_id: 0,
            ind: vec![0; n],
            skip_init: vec![false; m],
        }
    }

    fn pair(&mut self, left: Interval, right: Interval) -> ConflictPair {
        self.next_id += 1;
        ConflictPair {
            id: self.next_id,
            left,
            right,
        }
    }

    fn top_id(&self) -> Option<u64> {
        self.stack.last().map(|p| p.id)
    }

    fn conflicting(&self, i: Interval, b: usize) -> bool {
        !i.is_empty() && self.lowpt[i.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low];
        }
        self.lowpt[p.left.low].min(self.lowpt[p.right.low])
    }

    fn orient(&mut self, adj: &[Vec<(usize, usize)>], root: usize) {
        let mut ind = std::mem::take(&mut self.ind);
        let mut skip_init = std::mem::take(&mut self.skip_init);
        let mut dfs = vec![root];
        while let Some(v) = dfs.pop() {
            let e = self.parent_edge[v];
            while ind[v] < adj[v].len() {
                let (w, vw) = adj[v][ind[v]];
                if !skip_init[vw] {
                    if self.oriented[vw] {
                        ind[v] += 1;
                        continue;
                    }
                    self.oriented[vw] = true;
                    self.src[vw] = v;
                    self.dst[vw] = w;
                    self.out[v].push(vw);
                    self.lowpt[vw] = self.height[v];
                    self.lowpt2[vw] = self.height[v];
                    if self.height[w] == NONE {
                        self.parent_edge[w] = vw;
                        self.height[w] = self.height[v] + 1;
                        dfs.push(v);
                        dfs.push(w);
                        skip_init[vw] = true;
                        break;
                    }
                    self.lowpt[vw] = self.height[w];
                }
                self.nesting_depth[vw] = 2 * self.lowpt[vw] + usize::from(self.lowpt2[vw] < self.height[v]);
                if e != NONE {
                    if self.lowpt[vw] < self.lowpt[e] {
                        self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                        self.lowpt[e] = self.lowpt[vw];
                    } else if self.lowpt[vw] > self.lowpt[e] {
                        self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                    } else {
                        self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                    }
                }
                ind[v] += 1;
            }
        }
        self.ind = ind;
        self.skip_init = skip_init;
    }

    fn test(&mut self, root: usize) -> bool {
        let mut ind = std::mem::take(&mut self.ind);
        let mut skip_init = std::mem::take(&mut self.skip_init);
        let mut dfs = vec![root];
        let planar = self.test_from(&mut dfs, &mut ind, &mut skip_init);
        self.ind = ind;
        self.skip_init = skip_init;
        planar
    }

    fn test_from(&mut self, dfs: &mut Vec<usize>, ind: &mut [usize], skip_init: &mut [bool]) -> bool {
        while let Some(v) = dfs.pop() {
            let e = self.parent_edge[v];
            let mut skip_final = false;
            while ind[v] < self.out[v].len() {
                let ei = self.out[v][ind[v]];
                let w = self.dst[ei];
                if !skip_init[ei] {
                    self.stack_bottom[ei] = self.top_id();
                    if ei == self.parent_edge[w] {
                        dfs.push(v);
                        dfs.push(w);
                        skip_init[ei] = true;
                        skip_final = true;
                        break;
                    }
                    self.lowpt_edge[ei] = ei;
                    let p = self.pair(Interval::EMPTY, Interval { low: ei, high: ei });
                    self.stack.push(p);
                }
                if self.lowpt[ei] < self.height[v] {
                    if ei == self.out[v][0] {
                        if e != NONE {
                            self.lowpt_edge[e] = self.lowpt_edge[ei];
                        }
                    } else if !self.add_constraints(ei, e) {
                        return false;
                    }
                }
                ind[v] += 1;
            }
            if !skip_final && e != NONE {
                self.remove_back_edges(e);
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = self.pair(Interval::EMPTY, Interval::EMPTY);
        loop {
            let Some(mut q) = self.stack.pop() else {
                break;
            };
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.refs[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.refs[q.right.low] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last().copied() {
            if !(self.conflicting(top.left, ei) || self.conflicting(top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("stack is non-empty");
            if self.conflicting(q.right, ei) {
                q.swap();
            }
            if self.conflicting(q.right, ei) {
                return false;
            }
            if p.right.low != NONE {
                self.refs[p.right.low] = q.right.high;
            }
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.refs[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.src[e];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            self.stack.pop();
        }
        if let Some(mut p) = self.stack.pop() {
            while p.left.high != NONE && self.dst[p.left.high] == u {
                p.left.high = self.refs[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.refs[p.left.low] = p.right.low;
                p.left.low = NONE;
            }
            while p.right.high != NONE && self.dst[p.right.high] == u {
                p.right.high = self.refs[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.refs[p.right.low] = p.left.low;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            if let Some(top) = self.stack.last() {
                let (hl, hr) = (top.left.high, top.right.high);
                self.refs[e] = if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                    hl
                } else {
                    hr
                };
            }
        }
    }
}

/// Planarity of a simple undirected graph.
pub fn is_planar_simple(g: &SimpleGraph) -> bool {
    let n = g.node_count();
    let m = g.edge_count();
    if n > 2 && m > 3 * n - 6 {
        return false;
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, (u, v)) in g.edges().enumerate() {
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut st = LrState::new(n, m);
    for v in 0..n {
        if st.height[v] == NONE {
            st.height[v] = 0;
            st.roots.push(v);
            st.orient(&adj, v);
        }
    }
    for v in 0..n {
        let depth = &st.nesting_depth;
        st.out[v].sort_by_key(|&e| depth[e]);
    }
    st.ind.iter_mut().for_each(|i| *i = 0);
    st.skip_init.iter_mut().for_each(|s| *s = false);
    let roots = std::mem::take(&mut st.roots);
    roots.into_iter().all(|r| st.test(r))
}

/// Planarity of the graph's simple undirected view; loops and parallel edges
/// never affect planarity.
pub fn is_planar(g: &Graph) -> bool {
    is_planar_simple(&g.simple_view())
}
