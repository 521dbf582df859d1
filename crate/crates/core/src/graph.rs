//! Directed graphs, line graphs and strongly connected component condensation.

use std::collections::BTreeSet;

/// Adjacency-list digraph over vertices `0..n`. Parallel edges are collapsed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            succ: vec![Vec::new(); n],
        }
    }

    /// Builds a digraph from successor lists, dropping repeated edges.
    pub fn from_adjacency(mut succ: Vec<Vec<usize>>) -> Self {
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Digraph { succ }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.succ.push(Vec::new());
        self.succ.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].contains(&to)
    }

    /// Vertices reachable from `sources` (sources included).
    pub fn reachable_from(&self, sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack: Vec<usize> = Vec::new();
        for s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Line graph of a digraph whose edges are given as `(source, target)` pairs.
/// Vertex `i` of the result is edge `i`; there is an edge `i -> j` whenever the
/// target of edge `i` is the source of edge `j` (a loop therefore yields a loop).
pub fn line_graph(edges: &[(usize, usize)]) -> Digraph {
    let max_v = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); max_v];
    for (i, &(src, _)) in edges.iter().enumerate() {
        out_edges[src].push(i);
    }
    let mut g = Digraph::new(edges.len());
    for (i, &(_, dst)) in edges.iter().enumerate() {
        for &j in &out_edges[dst] {
            g.add_edge(i, j);
        }
    }
    g
}

/// SCC quotient of a digraph.
///
/// Components are numbered in topological order: every quotient edge goes from
/// a smaller to a larger component index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// Component of each original vertex.
    pub component: Vec<usize>,
    /// Members of each component, ascending.
    pub members: Vec<Vec<usize>>,
    /// Quotient edges, loops removed.
    pub dag: Digraph,
    /// Whether the component contains a closed walk.
    pub loopy: Vec<bool>,
}

impl Condensation {
    pub fn of(g: &Digraph) -> Self {
        let raw = tarjan(g);
        // Tarjan emits components in reverse topological order.
        let k = raw.len();
        let mut component = vec![0; g.vertex_count()];
        let mut members = vec![Vec::new(); k];
        for (ri, comp) in raw.into_iter().enumerate() {
            let ci = k - 1 - ri;
            let mut comp = comp;
            comp.sort_unstable();
            for &v in &comp {
                component[v] = ci;
            }
            members[ci] = comp;
        }
        let mut dag = Digraph::new(k);
        let mut loopy = vec![false; k];
        for v in 0..g.vertex_count() {
            let cv = component[v];
            for &w in g.successors(v) {
                let cw = component[w];
                if cv == cw {
                    loopy[cv] = true;
                } else {
                    dag.add_edge(cv, cw);
                }
            }
        }
        for s in &mut dag.succ {
            s.sort_unstable();
        }
        Condensation {
            component,
            members,
            dag,
            loopy,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Quotient predecessors of every component, ascending.
    pub fn predecessors(&self) -> Vec<BTreeSet<usize>> {
        let mut pred = vec![BTreeSet::new(); self.len()];
        for c in 0..self.len() {
            for &d in self.dag.successors(c) {
                pred[d].insert(c);
            }
        }
        pred
    }
}

/// Iterative Tarjan; returns components in reverse topological order.
fn tarjan(g: &Digraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    // (vertex, position in successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = g.successors(v).get(*pos) {
                *pos += 1;
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}
