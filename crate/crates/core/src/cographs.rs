//! Cographs and cotrees, the binary encoding of unranked trees, and JEP for
//! hereditary classes given by forbidden sets.
//!
//! Cotree labels are `K1 = 0`, `join = 1`, `union = 2`. Encodings add
//! `up = 3` for chain nodes (see [`encode_general`]).
//!
//! Induced subgraphs of cographs are not plain topological minors of their
//! cotrees: after deleting vertices, a union node may keep a single branch
//! and vanish, and two join nodes then merge. [`cotree_contains`] is the
//! containment that accounts for this, and [`sup_cograph_encoded`] reads it
//! on encodings.

use std::collections::HashSet;
use std::fmt;

use crate::bits::BitSet;
use crate::error::{JepError, Result};
use crate::tree_automata::{explore, TreeAutomaton};
use crate::tree_jep::decide_jep_tree;
use crate::trees::{decode_general, encode_general, BinaryTree, GeneralTree, LabelSet};
use crate::verdict::{Certificate, Limits, PairMode, Verdict};

pub const K1: usize = 0;
pub const JOIN: usize = 1;
pub const UNION: usize = 2;
pub const UP: usize = 3;

const STATE_CAP: usize = 1_000_000;

pub fn cotree_labels() -> LabelSet {
    LabelSet::with_names(vec!["K1".into(), "join".into(), "union".into()]).expect("distinct names")
}

pub fn encoding_labels() -> LabelSet {
    LabelSet::with_names(vec!["K1".into(), "join".into(), "union".into(), "up".into()]).expect("distinct names")
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cograph {
    adj: Vec<Vec<bool>>,
}

impl Cograph {
    pub fn new(n: usize) -> Self {
        Cograph {
            adj: vec![vec![false; n]; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Cograph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(JepError::InvalidArgument(format!("edge {u} {v} leaves 0..{n}")));
        }
        if u == v {
            return Err(JepError::InvalidArgument(format!("self-loop at {u}")));
        }
        self.adj[u][v] = true;
        self.adj[v][u] = true;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        (0..n)
            .flat_map(|u| (u + 1..n).filter(move |&v| self.adj[u][v]).map(move |v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn complement(&self) -> Cograph {
        let n = self.vertex_count();
        let mut g = Cograph::new(n);
        for u in 0..n {
            for v in 0..n {
                g.adj[u][v] = u != v && !self.adj[u][v];
            }
        }
        g
    }

    /// The subgraph induced by `vs`; vertex `vs[i]` becomes `i`.
    pub fn induced(&self, vs: &[usize]) -> Cograph {
        let mut g = Cograph::new(vs.len());
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate() {
                g.adj[i][j] = self.adj[u][v];
            }
        }
        g
    }

    pub fn disjoint_union(&self, other: &Cograph) -> Cograph {
        let (a, b) = (self.vertex_count(), other.vertex_count());
        let mut g = Cograph::new(a + b);
        for (u, v) in self.edges() {
            g.adj[u][v] = true;
            g.adj[v][u] = true;
        }
        for (u, v) in other.edges() {
            g.adj[a + u][a + v] = true;
            g.adj[a + v][a + u] = true;
        }
        g
    }

    pub fn join(&self, other: &Cograph) -> Cograph {
        let a = self.vertex_count();
        let mut g = self.disjoint_union(other);
        for u in 0..a {
            for v in a..g.vertex_count() {
                g.adj[u][v] = true;
                g.adj[v][u] = true;
            }
        }
        g
    }

    pub fn complete(n: usize) -> Cograph {
        Cograph::new(n).complement()
    }

    pub fn edgeless(n: usize) -> Cograph {
        Cograph::new(n)
    }

    pub fn path(n: usize) -> Cograph {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Cograph::from_edges(n, &edges).expect("path edges are in range")
    }

    /// Is this graph isomorphic to `P4`?
    pub fn is_p4(&self) -> bool {
        if self.vertex_count() != 4 || self.edge_count() != 3 {
            return false;
        }
        let mut deg: Vec<usize> = self.adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
        deg.sort_unstable();
        deg == [1, 1, 2, 2]
    }

    fn components_of(&self, vs: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count()];
        let inside: Vec<bool> = {
            let mut v = vec![false; self.vertex_count()];
            for &u in vs {
                v[u] = true;
            }
            v
        };
        let mut out = Vec::new();
        for &s in vs {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for &v in vs {
                    if inside[v] && !seen[v] && self.adj[u][v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Text form: `n: <count>` then one `edge: u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("n: {}\n", self.vertex_count());
        for (u, v) in self.edges() {
            s.push_str(&format!("edge: {u} {v}\n"));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Cograph> {
        let mut g: Option<Cograph> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let ln = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| JepError::parse(ln, 1, format!("expected `key: value`, found `{line}`")))?;
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| JepError::parse(ln, key.len() + 2, format!("expected numbers after `{key}:`")))?;
            match (key.trim(), nums.as_slice(), g.as_mut()) {
                ("n", &[n], None) => g = Some(Cograph::new(n)),
                ("n", _, Some(_)) => return Err(JepError::parse(ln, 1, "repeated `n:` line")),
                ("n", _, None) => return Err(JepError::parse(ln, 1, "`n:` takes one number")),
                ("edge", &[u, v], Some(g)) => {
                    g.add_edge(u, v).map_err(|e| JepError::parse(ln, 1, e.to_string()))?;
                }
                ("edge", &[_, _], None) => return Err(JepError::parse(ln, 1, "`edge:` before `n:`")),
                ("edge", _, _) => return Err(JepError::parse(ln, 1, "`edge:` takes two vertices")),
                (k, _, _) => return Err(JepError::parse(ln, 1, format!("unknown key `{k}`"))),
            }
        }
        g.ok_or_else(|| JepError::parse(1, 1, "missing `n:` line"))
    }
}

impl fmt::Display for Cograph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.vertex_count())?;
        for (u, v) in self.edges() {
            write!(f, " {u}-{v}")?;
        }
        Ok(())
    }
}

/// A cotree whose leaves carry vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cotree {
    label: usize,
    vertex: Option<usize>,
    children: Vec<Cotree>,
}

impl Cotree {
    pub fn leaf(vertex: usize) -> Self {
        Cotree {
            label: K1,
            vertex: Some(vertex),
            children: Vec::new(),
        }
    }

    /// An internal node; children are put in canonical order (shape, then
    /// vertex ids).
    pub fn node(label: usize, mut children: Vec<Cotree>) -> Self {
        children.sort_by_cached_key(|c| (c.shape(), c.vertices()));
        Cotree {
            label,
            vertex: None,
            children,
        }
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn vertex(&self) -> Option<usize> {
        self.vertex
    }

    pub fn children(&self) -> &[Cotree] {
        &self.children
    }

    /// Leaf vertex ids, left to right.
    pub fn vertices(&self) -> Vec<usize> {
        match self.vertex {
            Some(v) => vec![v],
            None => self.children.iter().flat_map(Cotree::vertices).collect(),
        }
    }

    /// The underlying labeled tree, without vertex ids.
    pub fn shape(&self) -> GeneralTree {
        if self.children.is_empty() {
            return GeneralTree::leaf(self.label);
        }
        GeneralTree::node(self.label, self.children.iter().map(Cotree::shape).collect())
            .expect("cotree nodes have two or more children")
    }

    /// Reads a labeled tree as a cotree, numbering leaves left to right.
    pub fn from_shape(t: &GeneralTree) -> Result<Cotree> {
        fn go(t: &GeneralTree, next: &mut usize) -> Cotree {
            if t.is_leaf() {
                *next += 1;
                return Cotree {
                    label: t.label(),
                    vertex: Some(*next - 1),
                    children: Vec::new(),
                };
            }
            Cotree {
                label: t.label(),
                vertex: None,
                children: t.children().iter().map(|c| go(c, next)).collect(),
            }
        }
        let c = go(t, &mut 0);
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(JepError::InvalidCotree(m));
        match (self.label, self.vertex, self.children.len()) {
            (K1, Some(_), 0) => {}
            (K1, _, _) => return bad("K1 must label exactly the leaves".into()),
            (JOIN | UNION, None, n) if n >= 2 => {}
            (JOIN | UNION, _, _) => return bad("join and union nodes need two or more children".into()),
            (l, _, _) => return bad(format!("unknown label {l}")),
        }
        for c in &self.children {
            if c.label == self.label {
                return bad("a child repeats its parent's label".into());
            }
            c.validate()?;
        }
        Ok(())
    }
}

impl fmt::Display for Cotree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.vertex {
            Some(v) => write!(f, "(K1 {v})"),
            None => {
                write!(f, "({}", if self.label == JOIN { "join" } else { "union" })?;
                for c in &self.children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// The cotree of `g`, by splitting into components or co-components.
pub fn cotree_of(g: &Cograph) -> Result<Cotree> {
    if g.vertex_count() == 0 {
        return Err(JepError::InvalidArgument("the empty graph has no cotree".into()));
    }
    let co = g.complement();
    fn build(g: &Cograph, co: &Cograph, vs: &[usize]) -> Result<Cotree> {
        if vs.len() == 1 {
            return Ok(Cotree::leaf(vs[0]));
        }
        let parts = g.components_of(vs);
        if parts.len() > 1 {
            let kids = parts.iter().map(|p| build(g, co, p)).collect::<Result<_>>()?;
            return Ok(Cotree::node(UNION, kids));
        }
        let parts = co.components_of(vs);
        if parts.len() > 1 {
            let kids = parts.iter().map(|p| build(g, co, p)).collect::<Result<_>>()?;
            return Ok(Cotree::node(JOIN, kids));
        }
        Err(JepError::NotCograph)
    }
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    build(g, &co, &all)
}

/// The cograph of a cotree; leaf ids must be exactly `0..n`.
pub fn graph_of(t: &Cotree) -> Result<Cograph> {
    t.validate()?;
    let ids = t.vertices();
    let n = ids.len();
    let mut seen = vec![false; n];
    for &v in &ids {
        if v >= n || seen[v] {
            return Err(JepError::InvalidCotree(format!("leaf ids are not a permutation of 0..{n}")));
        }
        seen[v] = true;
    }
    let mut g = Cograph::new(n);
    fn go(t: &Cotree, g: &mut Cograph) {
        if t.label == JOIN {
            let parts: Vec<Vec<usize>> = t.children.iter().map(Cotree::vertices).collect();
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    for &u in &parts[i] {
                        for &v in &parts[j] {
                            g.adj[u][v] = true;
                            g.adj[v][u] = true;
                        }
                    }
                }
            }
        }
        for c in &t.children {
            go(c, g);
        }
    }
    go(t, &mut g);
    Ok(g)
}

/// Pattern nodes in postorder with their children; leaves have none.
struct Flat {
    label: Vec<usize>,
    kids: Vec<Vec<usize>>,
}

impl Flat {
    fn of(t: &GeneralTree) -> Flat {
        let mut f = Flat {
            label: Vec::new(),
            kids: Vec::new(),
        };
        fn go(t: &GeneralTree, f: &mut Flat) -> usize {
            let ks = t.children().iter().map(|c| go(c, f)).collect();
            f.label.push(t.label());
            f.kids.push(ks);
            f.label.len() - 1
        }
        go(t, &mut f);
        f
    }

    fn len(&self) -> usize {
        self.label.len()
    }

    fn root(&self) -> usize {
        self.len() - 1
    }

    fn full(&self, q: usize) -> usize {
        (1usize << self.kids[q].len()) - 1
    }
}

fn check_pattern_arity(p: &Flat) -> Result<()> {
    for q in 0..p.len() {
        if p.kids[q].len() >= 20 {
            return Err(JepError::Arity(format!("pattern node with {} children", p.kids[q].len())));
        }
    }
    Ok(())
}

/// For each pattern node `q`, the subsets `Q` of its children (as masks) that
/// fit below a host node with every two of them meeting at a node labeled
/// like `q`. This is the summary kept per host node by the merge-aware
/// containment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Placeable(Vec<BitSet>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Gathered {
    /// Sets placeable inside a single gathered child.
    below: Vec<BitSet>,
    /// Sets split into parts placed in distinct gathered children.
    cover: Vec<BitSet>,
}

impl Gathered {
    fn empty(p: &Flat) -> Self {
        Gathered {
            below: vec![BitSet::new(); p.len()],
            cover: vec![BitSet::singleton(0); p.len()],
        }
    }

    fn add(&self, p: &Flat, c: &Placeable) -> Gathered {
        let mut out = self.clone();
        for q in 0..p.len() {
            out.below[q].union_with(&c.0[q]);
            for s in self.cover[q].iter() {
                for part in c.0[q].iter() {
                    if s & part == 0 {
                        out.cover[q].insert(s | part);
                    }
                }
            }
        }
        out
    }

    /// Summary of a host node labeled `mu` over the gathered children.
    fn finish(&self, p: &Flat, mu: usize) -> Placeable {
        let mut fam: Vec<BitSet> = vec![BitSet::new(); p.len()];
        for q in 0..p.len() {
            if p.kids[q].is_empty() {
                continue;
            }
            let mut f = self.below[q].clone();
            if p.label[q] == mu {
                for s in self.cover[q].iter() {
                    if s.count_ones() >= 2 {
                        f.insert(s);
                    }
                }
            }
            for (j, &c) in p.kids[q].iter().enumerate() {
                // pattern leaves are K1 and every host subtree has a K1 leaf
                if p.kids[c].is_empty() || fam[c].contains(p.full(c)) {
                    f.insert(1 << j);
                }
            }
            fam[q] = f;
        }
        Placeable(fam)
    }

    fn accepts(c: &Placeable, p: &Flat) -> bool {
        let r = p.root();
        p.kids[r].is_empty() || c.0[r].contains(p.full(r))
    }
}

/// `G(pattern)` is an induced subgraph of `G(host)`, read on cotree shapes:
/// pattern leaves map injectively to host leaves so that the lowest common
/// ancestor of any two keeps its label.
pub fn cotree_contains(host: &GeneralTree, pattern: &GeneralTree) -> bool {
    let p = Flat::of(pattern);
    fn go(t: &GeneralTree, p: &Flat) -> Placeable {
        let mut acc = Gathered::empty(p);
        for c in t.children() {
            acc = acc.add(p, &go(c, p));
        }
        acc.finish(p, t.label())
    }
    Gathered::accepts(&go(host, &p), &p)
}

/// `g1` is an induced subgraph of `g2`, decided on their cotrees.
pub fn induced_via_cotrees(g1: &Cograph, g2: &Cograph) -> Result<bool> {
    Ok(cotree_contains(&cotree_of(g2)?.shape(), &cotree_of(g1)?.shape()))
}

/// `enc(T)` for the cotree of `g`.
pub fn encode_cograph(g: &Cograph) -> Result<BinaryTree> {
    Ok(encode_general(&cotree_of(g)?.shape(), UP))
}

/// The cograph encoded by `t`, with vertices numbered left to right.
pub fn decode_cograph(t: &BinaryTree) -> Result<Cograph> {
    graph_of(&Cotree::from_shape(&decode_general(t, UP)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Shape<C, A> {
    /// A complete subtree: its root is not `up`.
    Complete(C),
    /// A chain fragment gathering children for a head further up.
    Chain(A),
    Dead,
}

/// The reachable automaton over encodings that gathers complete children
/// along chains with `add` and closes a node with `finish`.
fn encoding_automaton<C, A>(
    labels: &LabelSet,
    up: usize,
    leaf: impl Fn(usize) -> Option<C>,
    empty: A,
    add: impl Fn(&A, &C) -> A,
    finish: impl Fn(usize, &A) -> Option<C>,
    accept: impl Fn(&C) -> bool,
) -> Result<TreeAutomaton>
where
    C: Clone + Eq + std::hash::Hash,
    A: Clone + Eq + std::hash::Hash,
{
    let (ta, _) = explore(
        labels,
        |l| match (l == up, leaf(l)) {
            (false, Some(c)) => Shape::Complete(c),
            _ => Shape::Dead,
        },
        |l, a: &Shape<C, A>, b: &Shape<C, A>| {
            let acc = match (a, b) {
                (Shape::Complete(x), Shape::Complete(y)) => add(&add(&empty, x), y),
                (Shape::Chain(g), Shape::Complete(y)) | (Shape::Complete(y), Shape::Chain(g)) => add(g, y),
                _ => return Shape::Dead,
            };
            if l == up {
                Shape::Chain(acc)
            } else {
                finish(l, &acc).map_or(Shape::Dead, Shape::Complete)
            }
        },
        |s| matches!(s, Shape::Complete(c) if accept(c)),
        STATE_CAP,
    )?;
    Ok(ta.minimize())
}

/// Valid encodings over `labels`, where `up` is the chain label.
pub fn valid_encoding_language(labels: &LabelSet, up: usize) -> Result<TreeAutomaton> {
    encoding_automaton(labels, up, |_| Some(()), (), |_, _| (), |_, _| Some(()), |_| true)
}

/// Encodings of cotrees: leaves are `K1`, internal heads are `join` or
/// `union`, and no head has a child (through its chain) with its own label.
pub fn cotree_language() -> TreeAutomaton {
    // complete: effective root label; chain: labels of gathered children
    encoding_automaton(
        &encoding_labels(),
        UP,
        |l| (l == K1).then_some(K1),
        (false, false),
        |&(j, u), &c| (j || c == JOIN, u || c == UNION),
        |l, &(j, u)| match l {
            JOIN if !j => Some(JOIN),
            UNION if !u => Some(UNION),
            _ => None,
        },
        |_| true,
    )
    .expect("small fixed automaton")
}

/// Encodings `enc(T)` with `pattern ⪯ T` (general topological containment),
/// over `labels` with chain label `up`.
pub fn sup_general_encoded(pattern: &GeneralTree, labels: &LabelSet, up: usize) -> Result<TreeAutomaton> {
    let p = Flat::of(pattern);
    check_pattern_arity(&p)?;
    if p.label.iter().any(|&l| l >= labels.size() || l == up) {
        return Err(JepError::LabelMismatch("pattern uses a label outside the encoding labels".into()));
    }
    // complete: pattern nodes embedded in the subtree; chain: (embedded in some
    // gathered child, per node the child subsets matched to distinct children)
    let leaf_hits = |l: usize| -> BitSet { (0..p.len()).filter(|&q| p.kids[q].is_empty() && p.label[q] == l).collect() };
    encoding_automaton(
        labels,
        up,
        |l| Some(leaf_hits(l)),
        (BitSet::new(), vec![BitSet::singleton(0); p.len()]),
        |(emb, cover): &(BitSet, Vec<BitSet>), e: &BitSet| {
            let mut emb = emb.clone();
            emb.union_with(e);
            let mut out = cover.clone();
            for q in 0..p.len() {
                for s in cover[q].iter() {
                    for (j, &c) in p.kids[q].iter().enumerate() {
                        if s >> j & 1 == 0 && e.contains(c) {
                            out[q].insert(s | 1 << j);
                        }
                    }
                }
            }
            (emb, out)
        },
        |l, (emb, cover)| {
            let mut e = emb.clone();
            e.union_with(&leaf_hits(l));
            for q in 0..p.len() {
                if !p.kids[q].is_empty() && p.label[q] == l && cover[q].contains(p.full(q)) {
                    e.insert(q);
                }
            }
            Some(e)
        },
        |e| e.contains(p.root()),
    )
}

/// Cotree encodings whose cograph has `pattern`'s cograph as an induced
/// subgraph. Only meaningful on valid cotree encodings.
pub fn sup_cograph_encoded(pattern: &Cotree) -> Result<TreeAutomaton> {
    let p = Flat::of(&pattern.shape());
    check_pattern_arity(&p)?;
    let empty = Gathered::empty(&p);
    encoding_automaton(
        &encoding_labels(),
        UP,
        |l| (l == K1).then(|| empty.finish(&p, K1)),
        empty.clone(),
        |g, c| g.add(&p, c),
        |l, g| (l != K1).then(|| g.finish(&p, l)),
        |c| Gathered::accepts(c, &p),
    )
}

fn intersect_all(base: TreeAutomaton, parts: impl IntoIterator<Item = Result<TreeAutomaton>>) -> Result<TreeAutomaton> {
    let mut l = base.minimize();
    for a in parts {
        l = l.intersection(&a?.complement())?.minimize();
    }
    Ok(l)
}

fn connected(g: &Cograph) -> bool {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    g.components_of(&all).len() <= 1
}

fn without(g: &Cograph, v: usize) -> Cograph {
    let keep: Vec<usize> = (0..g.vertex_count()).filter(|&u| u != v).collect();
    g.induced(&keep)
}

/// The cograph of a binary cotree (leaves `K1`, inner nodes `join` or
/// `union`), with vertices numbered left to right.
pub fn binary_cotree_graph(t: &BinaryTree) -> Result<Cograph> {
    fn go(t: &BinaryTree, edges: &mut Vec<(usize, usize)>, next: &mut usize) -> Result<Vec<usize>> {
        match (t.label(), t.children()) {
            (K1, None) => {
                *next += 1;
                Ok(vec![*next - 1])
            }
            (l @ (JOIN | UNION), Some((a, b))) => {
                let (va, vb) = (go(a, edges, next)?, go(b, edges, next)?);
                if l == JOIN {
                    edges.extend(va.iter().flat_map(|&u| vb.iter().map(move |&v| (u, v))));
                }
                Ok([va, vb].concat())
            }
            (l, _) => Err(JepError::InvalidCotree(format!("label {l} at a node of the wrong arity"))),
        }
    }
    let (mut edges, mut n) = (Vec::new(), 0);
    go(t, &mut edges, &mut n)?;
    Cograph::from_edges(n, &edges)
}

/// Chain cotrees read through `free`, a language of cotree encodings. A chain
/// cotree is a binary cotree where no node has two children with its own
/// label; such a child continues the node's chain and is read as `up`.
fn chain_language(free: &TreeAutomaton) -> Result<TreeAutomaton> {
    // label, state as a head, state as a chain node
    type S = Option<(usize, usize, Option<usize>)>;
    let (ta, _) = explore(
        &cotree_labels(),
        |l| (l == K1).then(|| (K1, free.m0(K1), None)),
        |l, a: &S, b: &S| {
            let (Some(a), Some(b)) = (a, b) else { return None };
            if l == K1 || (a.0 == l && b.0 == l) {
                return None;
            }
            let read = |c: &(usize, usize, Option<usize>)| if c.0 == l { c.2 } else { Some(c.1) };
            let (x, y) = (read(a)?, read(b)?);
            Some((l, free.m2(l, x, y), Some(free.m2(UP, x, y))))
        },
        |s| matches!(s, Some((_, h, _)) if free.is_accepting(*h)),
        STATE_CAP,
    )?;
    Ok(ta.minimize())
}

/// Does some encoding in `free` contain both graphs? Also returns the number
/// of product states built.
fn joint_in(free: &TreeAutomaton, x: &Cograph, y: &Cograph) -> Result<(bool, usize)> {
    let p = free
        .intersection(&sup_cograph_encoded(&cotree_of(x)?)?)?
        .intersection(&sup_cograph_encoded(&cotree_of(y)?)?)?;
    Ok((!p.is_empty(), p.state_count()))
}

/// Deletes vertices while the pair stays non-joint.
fn shrink_bad(free: &TreeAutomaton, mut x: Cograph, mut y: Cograph) -> Result<Verdict<Cograph>> {
    let mut states = joint_in(free, &x, &y)?.1;
    'outer: loop {
        for side in 0..2 {
            let g = if side == 0 { &x } else { &y };
            for v in 0..g.vertex_count() {
                if g.vertex_count() == 1 {
                    break;
                }
                let h = without(g, v);
                let (joint, s) = if side == 0 { joint_in(free, &h, &y)? } else { joint_in(free, &x, &h)? };
                if !joint {
                    states = s;
                    if side == 0 { x = h } else { y = h }
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(Verdict::BadPair {
        x,
        y,
        certificate: Certificate::ProductEmpty { states_explored: states },
    })
}

/// Members of the class by vertex count, from 1 up to `max`, grown by adding
/// true and false twins (every cograph on two or more vertices has a twin
/// pair). Stops early once a level is empty.
fn members_by_size(pats: &[Cotree], max: usize, cap: usize) -> Result<Vec<Vec<Cograph>>> {
    let free = |g: &Cograph| -> Result<bool> {
        let t = cotree_of(g)?.shape();
        Ok(!pats.iter().any(|p| cotree_contains(&t, &p.shape())))
    };
    let mut levels = vec![Vec::new(), vec![Cograph::new(1)]];
    let mut total = 1;
    for n in 2..=max {
        let mut seen = HashSet::new();
        let mut here = Vec::new();
        for g in &levels[n - 1] {
            for u in 0..n - 1 {
                for adjacent in [false, true] {
                    let mut h = Cograph::new(n);
                    for (a, b) in g.edges() {
                        h.add_edge(a, b)?;
                    }
                    for v in 0..n - 1 {
                        if g.has_edge(u, v) || (adjacent && v == u) {
                            h.add_edge(v, n - 1)?;
                        }
                    }
                    if free(&h)? && seen.insert(cotree_of(&h)?.shape()) {
                        total += 1;
                        if total > cap {
                            return Err(JepError::size_limit("cograph class members", cap));
                        }
                        here.push(h);
                    }
                }
            }
        }
        if here.is_empty() {
            break;
        }
        levels.push(here);
    }
    Ok(levels)
}

/// Exact answer for a finite class: JEP exactly when it has one maximal
/// member.
fn decide_finite(pats: &[Cotree], free: &TreeAutomaton, max: usize, limits: &Limits) -> Result<Verdict<Cograph>> {
    let levels = members_by_size(pats, max + 1, limits.max_states)?;
    if levels.len() > max + 1 {
        return Err(JepError::InvalidArgument(format!("class has a member on {} vertices", max + 1)));
    }
    let mut maximal = Vec::new();
    for n in 1..levels.len() {
        for g in &levels[n] {
            let up = levels.get(n + 1).map(Vec::as_slice).unwrap_or_default();
            if !up.iter().any(|h| induced_via_cotrees(g, h).unwrap_or(false)) {
                maximal.push(g.clone());
            }
        }
    }
    if maximal.len() <= 1 {
        return Ok(Verdict::Jep);
    }
    maximal.sort_by_key(Cograph::vertex_count);
    shrink_bad(free, maximal[0].clone(), maximal[1].clone())
}

/// Non-joint pairs among members on up to `max` vertices, by total size.
fn search_bad_pair(pats: &[Cotree], free: &TreeAutomaton, max: usize, limits: &Limits) -> Result<Option<(Cograph, Cograph)>> {
    let members: Vec<Cograph> = members_by_size(pats, max, limits.max_states)?.concat();
    let mut pairs: Vec<(usize, usize)> = (0..members.len()).flat_map(|i| (i..members.len()).map(move |j| (i, j))).collect();
    pairs.sort_by_key(|&(i, j)| members[i].vertex_count() + members[j].vertex_count());
    for (i, j) in pairs {
        if !joint_in(free, &members[i], &members[j])?.0 {
            return Ok(Some((members[i].clone(), members[j].clone())));
        }
    }
    Ok(None)
}

/// JEP of the cographs avoiding every member of `forbidden` as an induced
/// subgraph. `P4` must be among them.
///
/// Cographs are read as chain cotrees, where tree embedding gives induced
/// subgraphs, so a JEP verdict of the tree decider carries over. A bad pair
/// of chain cotrees may still be a joint pair of graphs; it is kept only if
/// product emptiness on encodings says the graphs are not joint.
pub fn decide_jep_cographs(forbidden: &[Cograph], limits: &Limits) -> Result<Verdict<Cograph>> {
    if !forbidden.iter().any(Cograph::is_p4) {
        return Err(JepError::MissingP4);
    }
    let mut graphs: Vec<Cograph> = Vec::new();
    for h in forbidden.iter().filter(|h| !h.is_p4()) {
        match cotree_of(h) {
            Ok(_) => graphs.push(h.clone()),
            Err(JepError::NotCograph) => log::warn!("ignoring forbidden graph {h}: not a cograph, so no cograph contains it"),
            Err(e) => return Err(e),
        }
    }
    graphs.sort_by_key(Cograph::vertex_count);
    let mut minimal: Vec<Cograph> = Vec::new();
    for h in graphs {
        if !minimal.iter().any(|m| induced_via_cotrees(m, &h).unwrap_or(false)) {
            minimal.push(h);
        }
    }
    // closed under disjoint union or under join
    if minimal.iter().all(connected) || minimal.iter().all(|h| connected(&h.complement())) {
        return Ok(Verdict::Jep);
    }
    let pats: Vec<Cotree> = minimal.iter().map(cotree_of).collect::<Result<_>>()?;
    let free = intersect_all(cotree_language(), pats.iter().map(sup_cograph_encoded))?;
    let (x, y) = match decide_jep_tree(&chain_language(&free)?, PairMode::Bad, limits)? {
        Verdict::Jep => return Ok(Verdict::Jep),
        Verdict::BadPair { x, y, .. } => (binary_cotree_graph(&x)?, binary_cotree_graph(&y)?),
    };
    if !joint_in(&free, &x, &y)?.0 {
        return shrink_bad(&free, x, y);
    }
    // Ramsey: cographs are perfect, so a class without K_a and without an
    // independent set of size b has at most (a-1)(b-1) vertices per member
    let clique = minimal.iter().filter(|h| h.edge_count() * 2 == h.vertex_count() * (h.vertex_count() - 1)).map(Cograph::vertex_count).min();
    let stable = minimal.iter().filter(|h| h.edge_count() == 0).map(Cograph::vertex_count).min();
    if let (Some(a), Some(b)) = (clique, stable) {
        return decide_finite(&pats, &free, (a - 1) * (b - 1), limits);
    }
    let bound = x.vertex_count().max(y.vertex_count()) + 1;
    match search_bad_pair(&pats, &free, bound, limits)? {
        Some((x, y)) => shrink_bad(&free, x, y),
        None => Err(JepError::Undecided(format!(
            "chain cotrees give a bad pair ({x}; {y}) whose graphs are joint, and no bad pair of graphs has at most {bound} vertices"
        ))),
    }
}

/// JEP of the general trees over `labels` avoiding every member of
/// `forbidden` under topological containment.
///
/// Runs the tree decider on encodings. A bad pair of encodings is kept only
/// if the decoded trees have no common extension among all encodings, which
/// is read off the containment automata and so does not depend on the child
/// order an encoding picks.
pub fn decide_jep_general(forbidden: &[GeneralTree], labels: &LabelSet, limits: &Limits) -> Result<Verdict<GeneralTree>> {
    let (ext, up) = labels.extended("up")?;
    let l = intersect_all(
        valid_encoding_language(&ext, up)?,
        forbidden.iter().map(|p| sup_general_encoded(p, &ext, up)),
    )?;
    let (x, y) = match decide_jep_tree(&l, PairMode::Bad, limits)? {
        Verdict::Jep => return Ok(Verdict::Jep),
        Verdict::BadPair { x, y, .. } => (decode_general(&x, up)?, decode_general(&y, up)?),
    };
    let p = l
        .intersection(&sup_general_encoded(&x, &ext, up)?)?
        .intersection(&sup_general_encoded(&y, &ext, up)?)?;
    if !p.is_empty() {
        return Err(JepError::Undecided(format!(
            "encodings give a bad pair ({}; {}) whose trees have a common extension",
            x.to_sexpr(labels),
            y.to_sexpr(labels)
        )));
    }
    Ok(Verdict::BadPair {
        x,
        y,
        certificate: Certificate::ProductEmpty {
            states_explored: p.state_count(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{enumerate_binary, enumerate_general, general_contains};

    fn graphs(n: usize) -> Vec<Cograph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        (0..1usize << pairs.len())
            .map(|mask| {
                let es: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                Cograph::from_edges(n, &es).unwrap()
            })
            .collect()
    }

    fn cographs_upto(n: usize) -> Vec<Cograph> {
        (1..=n).flat_map(graphs).filter(|g| cotree_of(g).is_ok()).collect()
    }

    fn brute_induced(small: &Cograph, big: &Cograph) -> bool {
        fn go(i: usize, map: &mut Vec<usize>, used: &mut Vec<bool>, s: &Cograph, b: &Cograph) -> bool {
            if i == s.vertex_count() {
                return true;
            }
            for v in 0..b.vertex_count() {
                if used[v] || (0..i).any(|j| s.has_edge(i, j) != b.has_edge(v, map[j])) {
                    continue;
                }
                used[v] = true;
                map.push(v);
                if go(i + 1, map, used, s, b) {
                    return true;
                }
                map.pop();
                used[v] = false;
            }
            false
        }
        go(0, &mut Vec::new(), &mut vec![false; big.vertex_count()], small, big)
    }

    fn k2() -> Cograph {
        Cograph::complete(2)
    }

    #[test]
    fn cotree_examples() {
        assert_eq!(cotree_of(&Cograph::new(1)).unwrap().to_string(), "(K1 0)");
        assert_eq!(
            cotree_of(&Cograph::path(3)).unwrap().to_string(),
            "(join (K1 1) (union (K1 0) (K1 2)))"
        );
        assert_eq!(cotree_of(&Cograph::path(4)), Err(JepError::NotCograph));
        assert_eq!(graph_of(&Cotree::node(JOIN, vec![Cotree::leaf(0), Cotree::leaf(1)])).unwrap(), k2());
        assert!(graph_of(&Cotree::node(JOIN, vec![Cotree::leaf(0), Cotree::leaf(0)])).is_err());
    }

    #[test]
    fn round_trip_and_recognition() {
        for g in (1..=5).flat_map(graphs) {
            let p4_free = {
                let n = g.vertex_count();
                let mut free = true;
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                let vs = [a, b, c, d];
                                let distinct = (0..4).all(|i| (i + 1..4).all(|j| vs[i] != vs[j]));
                                if distinct && g.induced(&vs) == Cograph::path(4) {
                                    free = false;
                                }
                            }
                        }
                    }
                }
                free
            };
            match cotree_of(&g) {
                Ok(t) => {
                    assert!(p4_free);
                    assert_eq!(graph_of(&t).unwrap(), g);
                }
                Err(e) => {
                    assert_eq!(e, JepError::NotCograph);
                    assert!(!p4_free);
                }
            }
        }
    }

    #[test]
    fn induced_examples() {
        assert!(induced_via_cotrees(&k2(), &Cograph::path(3)).unwrap());
        assert!(!induced_via_cotrees(&Cograph::edgeless(2), &k2()).unwrap());
        // K3 inside K1 ∨ (K2 ⊔ K1): the two join nodes merge
        let host = Cograph::new(1).join(&k2().disjoint_union(&Cograph::new(1)));
        let k3 = Cograph::complete(3);
        assert!(induced_via_cotrees(&k3, &host).unwrap());
        assert!(!general_contains(&cotree_of(&host).unwrap().shape(), &cotree_of(&k3).unwrap().shape()));
    }

    #[test]
    fn induced_matches_brute_force() {
        let small = cographs_upto(4);
        let big = cographs_upto(5);
        for a in &small {
            for b in &big {
                assert_eq!(induced_via_cotrees(a, b).unwrap(), brute_induced(a, b), "{a} in {b}");
            }
        }
    }

    fn valid_cotree_encoding(t: &BinaryTree) -> bool {
        decode_general(t, UP).is_ok_and(|g| Cotree::from_shape(&g).is_ok())
    }

    #[test]
    fn cotree_language_matches_decoding() {
        let l = cotree_language();
        for t in enumerate_binary(4, 7, 1_000_000).unwrap() {
            assert_eq!(l.accepts(&t).unwrap(), valid_cotree_encoding(&t), "{t}");
        }
        let lab = encoding_labels();
        let p3 = encode_cograph(&Cograph::path(3)).unwrap();
        assert!(l.accepts(&p3).unwrap());
        assert!(!l.accepts(&BinaryTree::parse("(union (union (K1) (K1)) (K1))", &lab).unwrap()).unwrap());
        let chained = BinaryTree::parse("(union (K1) (up (K1) (union (K1) (K1))))", &lab).unwrap();
        assert!(!l.accepts(&chained).unwrap());
        assert!(!l.accepts(&BinaryTree::parse("(K1 (K1) (K1))", &lab).unwrap()).unwrap());
    }

    #[test]
    fn sup_general_matches_decoding() {
        let labels = LabelSet::numeric(2).unwrap();
        let (ext, up) = labels.extended("up").unwrap();
        let hosts: Vec<(BinaryTree, GeneralTree)> = enumerate_binary(3, 7, 1_000_000)
            .unwrap()
            .into_iter()
            .filter_map(|t| decode_general(&t, up).ok().map(|g| (t, g)))
            .collect();
        for p in enumerate_general(2, 4, 1000).unwrap() {
            let a = sup_general_encoded(&p, &ext, up).unwrap();
            for (t, g) in &hosts {
                assert_eq!(a.accepts(t).unwrap(), general_contains(g, &p), "{p:?} in {t}");
            }
        }
    }

    #[test]
    fn sup_cograph_matches_brute_force() {
        let hosts: Vec<(BinaryTree, Cograph)> = cographs_upto(5)
            .into_iter()
            .map(|g| (encode_cograph(&g).unwrap(), g))
            .collect();
        for h in cographs_upto(4) {
            let a = sup_cograph_encoded(&cotree_of(&h).unwrap()).unwrap();
            for (t, g) in &hosts {
                assert_eq!(a.accepts(t).unwrap(), brute_induced(&h, g), "{h} in {g}");
            }
        }
    }

    #[test]
    fn decide_cograph_examples() {
        let lim = Limits::default();
        let p4 = Cograph::path(4);
        assert!(decide_jep_cographs(std::slice::from_ref(&p4), &lim).unwrap().is_jep());
        let s = [p4.clone(), Cograph::path(3), k2().disjoint_union(&Cograph::new(1))];
        match decide_jep_cographs(&s, &lim).unwrap() {
            Verdict::BadPair { x, y, .. } => assert_eq!((x, y), (k2(), Cograph::edgeless(2))),
            v => panic!("{v:?}"),
        }
        assert!(decide_jep_cographs(&[p4.clone(), k2()], &lim).unwrap().is_jep());
        assert_eq!(decide_jep_cographs(&[k2()], &lim), Err(JepError::MissingP4));
        // C5 is not a cograph and is ignored
        let c5 = Cograph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert!(decide_jep_cographs(&[p4.clone(), c5], &lim).unwrap().is_jep());
        // finite: no K3 and no independent set of size 3
        let s = [p4, Cograph::complete(3), Cograph::edgeless(3)];
        match decide_jep_cographs(&s, &lim).unwrap() {
            Verdict::BadPair { x, y, .. } => {
                let shape = |g: &Cograph| cotree_of(g).unwrap().shape();
                let mut got = [shape(&x), shape(&y)];
                got.sort();
                let mut want = [shape(&Cograph::path(3)), shape(&k2().disjoint_union(&Cograph::new(1)))];
                want.sort();
                assert_eq!(got, want);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn binary_cotrees() {
        let l = cotree_labels();
        let t = |s: &str| BinaryTree::parse(s, &l).unwrap();
        let p3 = binary_cotree_graph(&t("(join (K1) (union (K1) (K1)))")).unwrap();
        assert_eq!(p3.edges(), vec![(0, 1), (0, 2)]);
        assert!(binary_cotree_graph(&t("(join (K1) (K1 (K1) (K1)))")).is_err());
        let free = cotree_language();
        let chains = chain_language(&free).unwrap();
        assert!(chains.accepts(&t("(join (K1) (join (K1) (union (K1) (K1))))")).unwrap());
        assert!(!chains.accepts(&t("(join (join (K1) (K1)) (join (K1) (K1)))")).unwrap());
        // every small cograph has a chain cotree, and chain cotrees decode to cographs
        for tr in enumerate_binary(3, 9, 1_000_000).unwrap() {
            if chains.accepts(&tr).unwrap() {
                assert!(cotree_of(&binary_cotree_graph(&tr).unwrap()).is_ok());
            }
        }
    }

    #[test]
    fn decide_general_examples() {
        let lim = Limits::default();
        let l2 = LabelSet::numeric(2).unwrap();
        assert!(decide_jep_general(&[], &l2, &lim).unwrap().is_jep());
        assert!(decide_jep_general(&[GeneralTree::leaf(1)], &l2, &lim).unwrap().is_jep());
        let l3 = LabelSet::numeric(3).unwrap();
        let mut s = vec![GeneralTree::leaf(0)];
        for (r, a, b) in [(1, 1, 2), (1, 2, 2), (2, 1, 1), (2, 1, 2)] {
            s.push(GeneralTree::node(r, vec![GeneralTree::leaf(a), GeneralTree::leaf(b)]).unwrap());
        }
        match decide_jep_general(&s, &l3, &lim).unwrap() {
            Verdict::BadPair { x, y, .. } => assert_eq!((x, y), (GeneralTree::leaf(1), GeneralTree::leaf(2))),
            v => panic!("{v:?}"),
        }
    }
}
