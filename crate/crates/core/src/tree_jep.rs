//! JEP for regular languages of binary trees under topological containment.
//!
//! A tree automaton `M` is turned into a digraph `M̂` whose line graph,
//! restricted to what leaves can reach, is the graph `J`. SCCs of `J` label
//! the nodes of tree walks; `W_Z` summarizes the run of `M` on a tree `Z`.
//!
//! Walk sets `𝒲_X = { W_Z : X ⪯ Z, Z ∈ L }` are computed from embedding
//! profiles: `Φ(X)` is the set of pairs `(σ_M(Z), W_Z)` over all `Z ⪰ X`.
//! Profiles are built bottom-up from a finite table of realizable pairs.
//! Pairs whose state can never reach acceptance are dropped from the table:
//! no ancestor of such a node is accepted, so they never reach a walk set.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use num_bigint::BigUint;

use crate::bits::BitSet;
use crate::error::{JepError, Result};
use crate::graph::{Condensation, Digraph};
use crate::tree_automata::{restrict_to_sup, TreeAutomaton};
use crate::trees::{enumerate_binary, BinaryTree, LabelSet};
use crate::verdict::{Certificate, Limits, PairMode, Verdict};

/// The graph `M̂`. Tree-like vertices are `(t, λ)`, forest-like vertices are
/// unordered state pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mhat {
    pub states: usize,
    pub labels: usize,
    /// Gluing edges `{s1, s2} -λ-> (t, λ)` as `(s1, s2, t, λ)` with `s1 <= s2`.
    pub gluing: Vec<(usize, usize, usize, usize)>,
    /// Union edges `(t, λ) -> {t, s}` as `(t, λ, s)`.
    pub union: Vec<(usize, usize, usize)>,
}

impl Mhat {
    pub fn tree_like_count(&self) -> usize {
        self.states * self.labels
    }

    pub fn forest_like_count(&self) -> usize {
        self.states * (self.states + 1) / 2
    }
}

pub fn build_mhat(m: &TreeAutomaton) -> Mhat {
    let (n, k) = (m.state_count(), m.labels().size());
    let mut gluing = Vec::new();
    for l in 0..k {
        for s2 in 0..n {
            for s1 in 0..=s2 {
                gluing.push((s1, s2, m.m2(l, s1, s2), l));
            }
        }
    }
    let mut union = Vec::new();
    for t in 0..n {
        for l in 0..k {
            for s in 0..n {
                union.push((t, l, s));
            }
        }
    }
    Mhat {
        states: n,
        labels: k,
        gluing,
        union,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JVertex {
    /// The added vertex `ℓ_λ`.
    Initial { label: usize },
    /// Gluing edge `{s1, s2} -> (t, λ)`, `s1 <= s2`.
    Gluing { s1: usize, s2: usize, t: usize, label: usize },
    /// Union edge `(t, λ) -> {t, s}`.
    Union { t: usize, label: usize, s: usize },
}

/// The graph `J`.
#[derive(Debug, Clone)]
pub struct JGraph {
    pub vertices: Vec<JVertex>,
    pub graph: Digraph,
    /// `ℓ_λ` for each label.
    pub initial_of: Vec<usize>,
    index: HashMap<JVertex, usize>,
}

impl JGraph {
    pub fn vertex_id(&self, v: &JVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Id of the gluing vertex used at a node with label `l` whose children
    /// are in states `s1`, `s2`.
    pub fn gluing_id(&self, m: &TreeAutomaton, l: usize, s1: usize, s2: usize) -> Option<usize> {
        let (a, b) = (s1.min(s2), s1.max(s2));
        self.vertex_id(&JVertex::Gluing {
            s1: a,
            s2: b,
            t: m.m2(l, a, b),
            label: l,
        })
    }
}

fn line_successors(m: &TreeAutomaton, v: &JVertex) -> Vec<JVertex> {
    let (n, k) = (m.state_count(), m.labels().size());
    match *v {
        JVertex::Initial { label } => (0..n)
            .map(|s| JVertex::Union {
                t: m.m0(label),
                label,
                s,
            })
            .collect(),
        JVertex::Gluing { t, label, .. } => (0..n).map(|s| JVertex::Union { t, label, s }).collect(),
        JVertex::Union { t, s, .. } => {
            let (a, b) = (t.min(s), t.max(s));
            (0..k)
                .map(|l| JVertex::Gluing {
                    s1: a,
                    s2: b,
                    t: m.m2(l, a, b),
                    label: l,
                })
                .collect()
        }
    }
}

/// `J`: line-graph vertices of `M̂` reachable from post-initial vertices,
/// plus `ℓ_λ` pointing at the union edges leaving `(m0(λ), λ)`.
pub fn build_j(m: &TreeAutomaton) -> JGraph {
    let k = m.labels().size();
    let mut vertices: Vec<JVertex> = (0..k).map(|label| JVertex::Initial { label }).collect();
    let mut index: HashMap<JVertex, usize> =
        vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut i = 0;
    while i < vertices.len() {
        let v = vertices[i];
        for w in line_successors(m, &v) {
            let id = *index.entry(w).or_insert_with(|| {
                vertices.push(w);
                succ.push(Vec::new());
                vertices.len() - 1
            });
            succ[i].push(id);
        }
        i += 1;
    }
    JGraph {
        initial_of: (0..k).collect(),
        graph: Digraph::from_adjacency(succ),
        vertices,
        index,
    }
}

/// The DAG `D` with its vertex flags.
#[derive(Debug, Clone)]
pub struct TreeCondensation {
    pub cond: Condensation,
    pub initial: Vec<bool>,
    pub gluing: Vec<bool>,
    pub union: Vec<bool>,
    pub accepting: Vec<bool>,
    /// Labels of the gluing vertices in each SCC.
    pub gluing_labels: Vec<BTreeSet<usize>>,
}

impl TreeCondensation {
    pub fn of(m: &TreeAutomaton, j: &JGraph) -> Self {
        let cond = Condensation::of(&j.graph);
        let c = cond.len();
        let mut out = TreeCondensation {
            initial: vec![false; c],
            gluing: vec![false; c],
            union: vec![false; c],
            accepting: vec![false; c],
            gluing_labels: vec![BTreeSet::new(); c],
            cond,
        };
        for (v, kind) in j.vertices.iter().enumerate() {
            let comp = out.cond.component[v];
            match *kind {
                JVertex::Initial { label } => {
                    out.initial[comp] = true;
                    out.accepting[comp] |= m.is_accepting(m.m0(label));
                }
                JVertex::Gluing { t, label, .. } => {
                    out.gluing[comp] = true;
                    out.gluing_labels[comp].insert(label);
                    out.accepting[comp] |= m.is_accepting(t);
                }
                JVertex::Union { .. } => out.union[comp] = true,
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.cond.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cond.is_empty()
    }

    pub fn loopy(&self, c: usize) -> bool {
        self.cond.loopy[c]
    }

    /// SCCs that may label a child of a node labeled `c`: a `D`-edge into
    /// `c`, or a two-step path through a union SCC.
    pub fn child_candidates(&self) -> Vec<BTreeSet<usize>> {
        let pred = self.cond.predecessors();
        (0..self.len())
            .map(|c| {
                let mut out = pred[c].clone();
                for &u in &pred[c] {
                    if self.union[u] {
                        out.extend(pred[u].iter().copied());
                    }
                }
                out
            })
            .collect()
    }
}

/// A tree walk: an unranked tree over `D`-vertices with sorted, distinct
/// children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeWalk {
    pub label: usize,
    pub children: Vec<TreeWalk>,
}

impl TreeWalk {
    pub fn leaf(label: usize) -> Self {
        TreeWalk {
            label,
            children: Vec::new(),
        }
    }

    /// Sorts and deduplicates children, recursively.
    pub fn canonical(label: usize, children: Vec<TreeWalk>) -> Self {
        let mut children: Vec<TreeWalk> = children
            .into_iter()
            .map(|c| TreeWalk::canonical(c.label, c.children))
            .collect();
        children.sort();
        children.dedup();
        TreeWalk { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TreeWalk::size).sum::<usize>()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

impl fmt::Display for TreeWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.label + 1)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Hash-consed tree walks; equal ids mean isomorphic walks.
#[derive(Debug, Clone, Default)]
pub struct WalkArena {
    nodes: Vec<(usize, Vec<u32>)>,
    index: HashMap<(usize, Vec<u32>), u32>,
}

impl WalkArena {
    pub fn intern(&mut self, label: usize, mut children: Vec<u32>) -> u32 {
        children.sort_unstable();
        children.dedup();
        let key = (label, children);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(key.clone());
        self.index.insert(key, id);
        id
    }

    pub fn label(&self, w: u32) -> usize {
        self.nodes[w as usize].0
    }

    pub fn children(&self, w: u32) -> &[u32] {
        &self.nodes[w as usize].1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Walk of a node in SCC `c` whose child subtrees have walks `kids`:
    /// children already in `c` are merged into the node, then duplicates go.
    pub fn combine(&mut self, c: usize, kids: &[u32]) -> u32 {
        let mut ch = Vec::new();
        for &w in kids {
            if self.label(w) == c {
                ch.extend_from_slice(self.children(w));
            } else {
                ch.push(w);
            }
        }
        self.intern(c, ch)
    }

    pub fn materialize(&self, w: u32) -> TreeWalk {
        TreeWalk::canonical(
            self.label(w),
            self.children(w).iter().map(|&c| self.materialize(c)).collect(),
        )
    }

    pub fn lookup(&self, w: &TreeWalk) -> Option<u32> {
        let kids: Option<Vec<u32>> = w.children.iter().map(|c| self.lookup(c)).collect();
        let mut kids = kids?;
        kids.sort_unstable();
        self.index.get(&(w.label, kids)).copied()
    }
}

/// Every tree walk of `D`, grouped by root in topological order; within a
/// root, child sets are listed by increasing bitmask.
pub fn enumerate_tree_walks(d: &TreeCondensation, cap: usize) -> Result<Vec<TreeWalk>> {
    let cand = d.child_candidates();
    let mut at: Vec<Vec<TreeWalk>> = vec![Vec::new(); d.len()];
    let mut total = 0usize;
    for c in 0..d.len() {
        if d.initial[c] {
            at[c].push(TreeWalk::leaf(c));
        } else if d.gluing[c] {
            let pool: Vec<&TreeWalk> = cand[c].iter().flat_map(|&p| at[p].iter()).collect();
            if pool.len() >= 63 || total + (1usize << pool.len()) > cap + 1 {
                return Err(JepError::size_limit("tree walks", cap));
            }
            let mut here = Vec::new();
            for mask in 1u64..(1u64 << pool.len()) {
                let kids = (0..pool.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect();
                here.push(TreeWalk::canonical(c, kids));
            }
            at[c] = here;
        }
        total += at[c].len();
        if total > cap {
            return Err(JepError::size_limit("tree walks", cap));
        }
    }
    Ok(at.into_iter().flatten().collect())
}

/// `|𝒲|` without enumerating: a gluing vertex roots `2^s - 1` walks, `s` the
/// number of walks rooted at its child candidates.
pub fn count_tree_walks(d: &TreeCondensation) -> Result<BigUint> {
    const MAX_BITS: u64 = 1 << 20;
    let cand = d.child_candidates();
    let mut count = vec![BigUint::from(0u8); d.len()];
    for c in 0..d.len() {
        if d.initial[c] {
            count[c] = BigUint::from(1u8);
        } else if d.gluing[c] {
            let s: BigUint = cand[c].iter().map(|&p| &count[p]).sum();
            let bits = u64::try_from(&s)
                .ok()
                .filter(|&b| b <= MAX_BITS)
                .ok_or_else(|| JepError::size_limit("bits in the tree walk count", MAX_BITS as usize))?;
            count[c] = (BigUint::from(1u8) << bits) - 1u8;
        }
    }
    Ok(count.into_iter().sum())
}

/// Is `p` a prefix of `w`: a connected piece of `w`, anchored at any node,
/// whose leaves are leaves of `w`?
pub fn walk_prefix(p: &TreeWalk, w: &TreeWalk) -> bool {
    fn at(p: &TreeWalk, w: &TreeWalk) -> bool {
        if p.label != w.label {
            return false;
        }
        if p.is_leaf() {
            return w.is_leaf();
        }
        crate::trees::perfect_left_matching(p.children.len(), w.children.len(), |i, j| {
            at(&p.children[i], &w.children[j])
        })
    }
    at(p, w) || w.children.iter().any(|c| walk_prefix(p, c))
}

/// The walk automaton's transition rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileRule {
    /// Profiles as defined: a leaf pattern may sit at any node of `Z`.
    #[default]
    Exact,
    /// A leaf pattern only at leaves of `Z`; a deliberately wrong variant for
    /// mutation checks.
    LeafOnly,
}

/// The walk machinery for one trimmed tree automaton.
#[derive(Debug, Clone)]
pub struct TreePipeline {
    m: TreeAutomaton,
    j: JGraph,
    d: TreeCondensation,
    arena: WalkArena,
    /// Realizable `(σ_M(Z), W_Z)` pairs with a live state.
    realizable: Vec<(usize, u32)>,
    /// `comb[(λ, i, j)]` with `i <= j`: the pair for `λ(Z_i, Z_j)`.
    comb: HashMap<(usize, usize, usize), usize>,
    /// Upward closure of each realizable pair under adding ancestors.
    up: Vec<BitSet>,
    /// Pairs rooted at a node labeled `λ`.
    rooted_at: Vec<BitSet>,
    leaf_pair: Vec<Option<usize>>,
    /// Arena id of the target walk of a [`TreePipeline::fitting`] pipeline.
    target: Option<u32>,
    rule: ProfileRule,
}

#[derive(Clone, Copy)]
enum Scope<'a> {
    All,
    Fitting(&'a BinaryTree),
    Nothing,
}

/// A profile: a set of indices into the realizable pairs.
pub type Profile = BitSet;

impl TreePipeline {
    pub fn new(m: &TreeAutomaton, limits: &Limits) -> Result<Self> {
        Self::build(m, Scope::All, limits)
    }

    /// Only `J`, `D` and the walk constructions; no pair table, so every
    /// profile is empty.
    pub fn walks_only(m: &TreeAutomaton, limits: &Limits) -> Result<Self> {
        Self::build(m, Scope::Nothing, limits)
    }

    /// A pipeline whose pairs are restricted to walks that can still grow
    /// into `W_target`: subtrees of that walk, and nodes of it carrying a
    /// nonempty subset of their children. Profiles then answer whether a
    /// tree fits `W_target`, i.e. lies below some `Z ∈ L` with that walk.
    pub fn fitting(m: &TreeAutomaton, target: &BinaryTree, limits: &Limits) -> Result<Self> {
        Self::build(m, Scope::Fitting(target), limits)
    }

    fn build(m: &TreeAutomaton, scope: Scope<'_>, limits: &Limits) -> Result<Self> {
        let m = m.trim();
        let j = build_j(&m);
        let d = TreeCondensation::of(&m, &j);
        let k = m.labels().size();
        let mut arena = WalkArena::default();
        let allowed = match scope {
            Scope::All => None,
            Scope::Nothing => Some((u32::MAX, BitSet::new())),
            Scope::Fitting(z) => {
                let (_, w) = walk_id(&m, &j, &d, &mut arena, z)?;
                Some((w, fragments(&mut arena, w, limits.max_walks)?))
            }
        };
        let admit = |w: u32| allowed.as_ref().is_none_or(|(_, a)| a.contains(w as usize));
        let mut realizable: Vec<(usize, u32)> = Vec::new();
        let mut index: HashMap<(usize, u32), usize> = HashMap::new();
        let mut comb = HashMap::new();
        let mut push = |p: (usize, u32), realizable: &mut Vec<(usize, u32)>| -> Result<usize> {
            if let Some(&i) = index.get(&p) {
                return Ok(i);
            }
            if realizable.len() >= limits.max_walks {
                return Err(JepError::size_limit("realizable walks", limits.max_walks));
            }
            index.insert(p, realizable.len());
            realizable.push(p);
            Ok(realizable.len() - 1)
        };
        let live = m.live_states();
        let mut leaf_pair = Vec::new();
        for l in 0..k {
            let w = arena.intern(d.cond.component[j.initial_of[l]], Vec::new());
            leaf_pair.push(match live[m.m0(l)] && admit(w) {
                true => Some(push((m.m0(l), w), &mut realizable)?),
                false => None,
            });
        }
        let mut p = 0;
        while p < realizable.len() {
            for i in 0..=p {
                let ((s1, w1), (s2, w2)) = (realizable[i], realizable[p]);
                for l in 0..k {
                    if !live[m.m2(l, s1, s2)] {
                        continue;
                    }
                    let g = j.gluing_id(&m, l, s1, s2).ok_or_else(|| {
                        JepError::UnreachableGluingVertex(format!("label {l}, states ({s1},{s2})"))
                    })?;
                    let w = arena.combine(d.cond.component[g], &[w1, w2]);
                    if !admit(w) {
                        continue;
                    }
                    let id = push((m.m2(l, s1, s2), w), &mut realizable)?;
                    comb.insert((l, i, p), id);
                }
            }
            p += 1;
        }
        let r = realizable.len();
        let mut succ = vec![Vec::new(); r];
        let mut rooted_at = vec![BitSet::new(); k];
        for (&(l, i, jj), &t) in &comb {
            succ[i].push(t);
            succ[jj].push(t);
            rooted_at[l].insert(t);
        }
        let up = closure(&Digraph::from_adjacency(succ));
        log::debug!(
            "tree pipeline: {} states, |J| = {}, |D| = {}, {} realizable pairs",
            m.state_count(),
            j.len(),
            d.len(),
            r
        );
        Ok(TreePipeline {
            m,
            j,
            d,
            arena,
            realizable,
            comb,
            up,
            rooted_at,
            leaf_pair,
            target: allowed.map(|(w, _)| w).filter(|&w| w != u32::MAX),
            rule: ProfileRule::Exact,
        })
    }

    pub fn with_rule(mut self, rule: ProfileRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn automaton(&self) -> &TreeAutomaton {
        &self.m
    }

    pub fn j(&self) -> &JGraph {
        &self.j
    }

    pub fn condensation(&self) -> &TreeCondensation {
        &self.d
    }

    pub fn arena(&self) -> &WalkArena {
        &self.arena
    }

    /// Realizable `(state, walk)` pairs, i.e. `{ (σ_M(Z), W_Z) }` over all `Z`
    /// whose state is live.
    pub fn realizable_walks(&self) -> Vec<(usize, TreeWalk)> {
        self.realizable
            .iter()
            .map(|&(s, w)| (s, self.arena.materialize(w)))
            .collect()
    }

    pub fn realizable_count(&self) -> usize {
        self.realizable.len()
    }

    fn comb(&self, l: usize, a: usize, b: usize) -> Option<usize> {
        self.comb.get(&(l, a.min(b), a.max(b))).copied()
    }

    /// `W_Z` by contracting same-SCC regions of `Z` and then deleting
    /// duplicate child subtrees until none remain.
    pub fn walk_of_tree_definitional(&self, z: &BinaryTree) -> Result<TreeWalk> {
        let comps = self.node_components(z)?;
        let f = z.flatten();
        let mut parent = vec![usize::MAX; f.len()];
        for v in 0..f.len() {
            if let Some((a, b)) = f.kids[v] {
                parent[a] = v;
                parent[b] = v;
            }
        }
        // region id = topmost node of the region
        let top: Vec<usize> = (0..f.len())
            .map(|mut v| {
                while parent[v] != usize::MAX && comps[parent[v]] == comps[v] {
                    v = parent[v];
                }
                v
            })
            .collect();
        fn build(r: usize, f: &crate::trees::FlatTree, comps: &[usize], top: &[usize], parent: &[usize]) -> RawWalk {
            let children = (0..f.len())
                .filter(|&v| top[v] == v && parent[v] != usize::MAX && top[parent[v]] == r)
                .map(|v| build(v, f, comps, top, parent))
                .collect();
            RawWalk {
                label: comps[r],
                children,
            }
        }
        let mut raw = build(f.root(), &f, &comps, &top, &parent);
        while raw.delete_one_duplicate() {}
        Ok(raw.into_walk())
    }

    /// `W_Z` computed bottom-up by merging children that stay in the same SCC.
    pub fn walk_of_tree(&self, z: &BinaryTree) -> Result<TreeWalk> {
        let mut arena = self.arena.clone();
        let w = self.walk_id_of_tree(z, &mut arena)?;
        Ok(arena.materialize(w))
    }

    fn walk_id_of_tree(&self, z: &BinaryTree, arena: &mut WalkArena) -> Result<u32> {
        Ok(walk_id(&self.m, &self.j, &self.d, arena, z)?.1)
    }

    /// SCC of `g_u` for every node `u` of `z`, in postorder.
    pub fn node_components(&self, z: &BinaryTree) -> Result<Vec<usize>> {
        let st = self.m.run_all(z)?;
        let f = z.flatten();
        (0..f.len())
            .map(|v| {
                let g = match f.kids[v] {
                    None => Some(self.j.initial_of[f.label[v]]),
                    Some((a, b)) => self.j.gluing_id(&self.m, f.label[v], st[a], st[b]),
                };
                g.map(|g| self.d.cond.component[g]).ok_or_else(|| {
                    JepError::UnreachableGluingVertex(format!("node {v} of {z}"))
                })
            })
            .collect()
    }

    fn up_of(&self, roots: &Profile) -> Profile {
        let mut out = Profile::new();
        for p in roots.iter() {
            out.union_with(&self.up[p]);
        }
        out
    }

    /// Profile of a single leaf labeled `l`.
    pub fn profile_leaf(&self, l: usize) -> Profile {
        let mut roots: Profile = self.leaf_pair[l].into_iter().collect();
        if self.rule == ProfileRule::Exact {
            roots.union_with(&self.rooted_at[l]);
        }
        self.up_of(&roots)
    }

    /// Profile of `l(X1, X2)` from the profiles of `X1` and `X2`.
    pub fn profile_step(&self, l: usize, a: &Profile, b: &Profile) -> Profile {
        let mut roots = Profile::new();
        for i in a.iter() {
            for j in b.iter() {
                if let Some(t) = self.comb(l, i, j) {
                    roots.insert(t);
                }
            }
        }
        self.up_of(&roots)
    }

    /// `Φ(X)`: the pairs `(σ_M(Z), W_Z)` over all trees `Z` containing `x`.
    pub fn profile(&self, x: &BinaryTree) -> Result<Profile> {
        x.check_labels(self.m.labels())?;
        Ok(self.profile_unchecked(x))
    }

    fn profile_unchecked(&self, x: &BinaryTree) -> Profile {
        match x.children() {
            None => self.profile_leaf(x.label()),
            Some((a, b)) => self.profile_step(x.label(), &self.profile_unchecked(a), &self.profile_unchecked(b)),
        }
    }

    /// For a [`TreePipeline::fitting`] pipeline: does `Φ` hold the target
    /// walk with an accepting state?
    pub fn fits(&self, phi: &Profile) -> bool {
        let Some(w) = self.target else { return false };
        phi.iter().any(|i| {
            let (s, v) = self.realizable[i];
            v == w && self.m.is_accepting(s)
        })
    }

    /// Arena ids of `{ W : (s, W) ∈ Φ, s accepting }`.
    pub fn wset_of_profile(&self, phi: &Profile) -> BitSet {
        phi.iter()
            .filter(|&i| self.m.is_accepting(self.realizable[i].0))
            .map(|i| self.realizable[i].1 as usize)
            .collect()
    }

    /// `𝒲_X = { W_Z : X ⪯ Z, Z ∈ L }` as arena ids.
    pub fn wset_ids(&self, x: &BinaryTree) -> Result<BitSet> {
        Ok(self.wset_of_profile(&self.profile(x)?))
    }

    pub fn wset_tree(&self, x: &BinaryTree) -> Result<BTreeSet<TreeWalk>> {
        Ok(self
            .wset_ids(x)?
            .iter()
            .map(|w| self.arena.materialize(w as u32))
            .collect())
    }

    /// Route A: do the walk sets of `x` and `y` meet?
    pub fn joint(&self, x: &BinaryTree, y: &BinaryTree) -> Result<bool> {
        Ok(self.wset_ids(x)?.intersects(&self.wset_ids(y)?))
    }
}

/// Reachability closure (reflexive) of every vertex, as bitsets.
/// State and walk id of `z`, computed bottom-up.
fn walk_id(m: &TreeAutomaton, j: &JGraph, d: &TreeCondensation, arena: &mut WalkArena, z: &BinaryTree) -> Result<(usize, u32)> {
    z.check_labels(m.labels())?;
    fn go(m: &TreeAutomaton, j: &JGraph, d: &TreeCondensation, arena: &mut WalkArena, z: &BinaryTree) -> Result<(usize, u32)> {
        match z.children() {
            None => {
                let l = z.label();
                Ok((m.m0(l), arena.intern(d.cond.component[j.initial_of[l]], Vec::new())))
            }
            Some((a, b)) => {
                let (s1, w1) = go(m, j, d, arena, a)?;
                let (s2, w2) = go(m, j, d, arena, b)?;
                let g = j.gluing_id(m, z.label(), s1, s2).ok_or_else(|| {
                    JepError::UnreachableGluingVertex(format!("label {}, states ({s1},{s2})", z.label()))
                })?;
                Ok((m.m2(z.label(), s1, s2), arena.combine(d.cond.component[g], &[w1, w2])))
            }
        }
    }
    go(m, j, d, arena, z)
}

/// Walks a partial run can have on its way to `w`: every subtree of `w`,
/// and every node of `w` with a nonempty subset of its children.
fn fragments(arena: &mut WalkArena, w: u32, cap: usize) -> Result<BitSet> {
    let mut out = BitSet::new();
    let mut seen = BitSet::new();
    let mut stack = vec![w];
    while let Some(v) = stack.pop() {
        if !seen.insert(v as usize) {
            continue;
        }
        out.insert(v as usize);
        let kids = arena.children(v).to_vec();
        stack.extend_from_slice(&kids);
        if kids.len() >= usize::BITS as usize - 1 || (1usize << kids.len()) > cap {
            return Err(JepError::size_limit("walk fragments", cap));
        }
        for mask in 1..(1usize << kids.len()) {
            let sub = (0..kids.len()).filter(|i| mask >> i & 1 == 1).map(|i| kids[i]).collect();
            let f = arena.intern(arena.label(v), sub);
            out.insert(f as usize);
        }
    }
    Ok(out)
}

fn closure(g: &Digraph) -> Vec<BitSet> {
    let c = Condensation::of(g);
    let mut comp_reach: Vec<BitSet> = vec![BitSet::new(); c.len()];
    for ci in (0..c.len()).rev() {
        let mut s: BitSet = c.members[ci].iter().copied().collect();
        for &d in c.dag.successors(ci) {
            s.union_with(&comp_reach[d]);
        }
        comp_reach[ci] = s;
    }
    (0..g.vertex_count()).map(|v| comp_reach[c.component[v]].clone()).collect()
}

/// Mutable unranked tree used by the definitional `W_Z` route.
#[derive(Debug, Clone)]
struct RawWalk {
    label: usize,
    children: Vec<RawWalk>,
}

impl RawWalk {
    fn shape(&self) -> TreeWalk {
        let mut children: Vec<TreeWalk> = self.children.iter().map(RawWalk::shape).collect();
        children.sort();
        TreeWalk {
            label: self.label,
            children,
        }
    }

    /// Deletes one child subtree isomorphic to a sibling; false if none.
    fn delete_one_duplicate(&mut self) -> bool {
        let shapes: Vec<TreeWalk> = self.children.iter().map(RawWalk::shape).collect();
        for i in 0..shapes.len() {
            for j in i + 1..shapes.len() {
                if shapes[i] == shapes[j] {
                    self.children.remove(j);
                    return true;
                }
            }
        }
        self.children.iter_mut().any(RawWalk::delete_one_duplicate)
    }

    fn into_walk(self) -> TreeWalk {
        TreeWalk::canonical(self.label, self.children.into_iter().map(RawWalk::into_walk).collect())
    }
}

/// Route B: is `L ∩ Sup(x) ∩ Sup(y)` nonempty? Also returns the number of
/// product states explored.
pub fn joint_by_product(m: &TreeAutomaton, x: &BinaryTree, y: &BinaryTree) -> Result<(bool, usize)> {
    let p = triple_product(m, x, y)?;
    Ok((!p.is_empty(), p.state_count()))
}

fn triple_product(m: &TreeAutomaton, x: &BinaryTree, y: &BinaryTree) -> Result<TreeAutomaton> {
    restrict_to_sup(m, &[x, y])
}

/// A smallest `Z ∈ L` containing both `x` and `y`.
pub fn joint_witness(m: &TreeAutomaton, x: &BinaryTree, y: &BinaryTree) -> Result<Option<BinaryTree>> {
    Ok(triple_product(m, x, y)?.empty_witness())
}

/// Is there `Z ∈ L` with `x, y ⪯ Z`? Both routes are computed and must agree.
pub fn joint_tree(m: &TreeAutomaton, x: &BinaryTree, y: &BinaryTree) -> Result<bool> {
    let a = TreePipeline::new(m, &Limits::default())?.joint(x, y)?;
    let (b, _) = joint_by_product(m, x, y)?;
    if a != b {
        return Err(JepError::CertificateFailed(format!(
            "walk-set answer {a} disagrees with product emptiness {b} on ({x}, {y})"
        )));
    }
    Ok(b)
}

/// Tree order used for witnesses: node count, then canonical order.
pub fn tree_key(t: &BinaryTree) -> (usize, &BinaryTree) {
    (t.size(), t)
}

fn normalize_tree_pair(x: BinaryTree, y: BinaryTree) -> (BinaryTree, BinaryTree) {
    if tree_key(&x) <= tree_key(&y) {
        (x, y)
    } else {
        (y, x)
    }
}

fn tree_pair_key<'a>(x: &'a BinaryTree, y: &'a BinaryTree) -> (usize, usize, &'a BinaryTree, usize, &'a BinaryTree) {
    (x.size() + y.size(), x.size(), x, y.size(), y)
}

/// Reachable `(σ_M(X), Φ(X))` states, each with a smallest tree reaching it.
pub struct ProfileStates {
    pub profiles: Vec<Profile>,
    /// `(state of M, profile id, smallest witness)`, by increasing witness.
    pub states: Vec<(usize, usize, BinaryTree)>,
}

pub fn explore_profiles(p: &TreePipeline, limits: &Limits) -> Result<ProfileStates> {
    let m = p.automaton();
    let k = m.labels().size();
    let mut profiles: Vec<Profile> = Vec::new();
    let mut profile_id: HashMap<Profile, usize> = HashMap::new();
    let mut intern = |ph: Profile, profiles: &mut Vec<Profile>| -> Result<usize> {
        if let Some(&i) = profile_id.get(&ph) {
            return Ok(i);
        }
        if profiles.len() >= limits.max_states {
            return Err(JepError::size_limit("walk-automaton profiles", limits.max_states));
        }
        profile_id.insert(ph.clone(), profiles.len());
        profiles.push(ph);
        Ok(profiles.len() - 1)
    };
    let mut step_memo: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(usize, BinaryTree, usize, usize)>> = BinaryHeap::new();
    for l in 0..k {
        let f = intern(p.profile_leaf(l), &mut profiles)?;
        heap.push(Reverse((1, BinaryTree::leaf(l), m.m0(l), f)));
    }
    let mut done: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states: Vec<(usize, usize, BinaryTree)> = Vec::new();
    while let Some(Reverse((_, tree, s, f))) = heap.pop() {
        if done.contains_key(&(s, f)) {
            continue;
        }
        if states.len() >= limits.max_states {
            return Err(JepError::size_limit("reachable M×N states", limits.max_states));
        }
        done.insert((s, f), states.len());
        states.push((s, f, tree.clone()));
        for i in 0..states.len() {
            let (s2, f2, ref t2) = states[i];
            for l in 0..k {
                let key = (l, f.min(f2), f.max(f2));
                let nf = match step_memo.get(&key) {
                    Some(&nf) => nf,
                    None => {
                        let ph = p.profile_step(l, &profiles[f], &profiles[f2]);
                        let id = intern(ph, &mut profiles)?;
                        step_memo.insert(key, id);
                        id
                    }
                };
                let ns = m.m2(l, s, s2);
                if !done.contains_key(&(ns, nf)) {
                    let t = BinaryTree::node(l, tree.clone(), t2.clone());
                    heap.push(Reverse((t.size(), t, ns, nf)));
                }
            }
        }
    }
    Ok(ProfileStates { profiles, states })
}

/// Decides JEP of `L(m)`.
///
/// `L` has JEP iff some walk `W` is fitted by every member (bad mode) or
/// every tree (semibad mode). Candidates are walks of trees `Z ∈ L`: when a
/// smallest tree `X` does not fit `W_Z`, either `X` and `Z` have no common
/// extension, or a smallest common extension becomes the next `Z`. Each step
/// removes `W_Z` from `𝒲_Z`, so the loop ends. A bad pair found this way is
/// then shrunk to a smallest one where a bounded search can afford it.
pub fn decide_jep_tree(m: &TreeAutomaton, mode: PairMode, limits: &Limits) -> Result<Verdict<BinaryTree>> {
    decide(m, mode, limits).map_err(|e| e.with_size_note(|| bounds_note(m, limits)))
}

/// `|𝒲|` and the node bounds, for size-limit messages.
pub fn bounds_note(m: &TreeAutomaton, limits: &Limits) -> String {
    match report_bounds(m, limits) {
        Ok(b) => format!(
            "|W| = {}, semibad node bound {}, realization node bound {}",
            b.walks,
            b.semibad_display(),
            pow2_display(&b.realization_exponent)
        ),
        Err(e) => format!("bounds unavailable: {e}"),
    }
}

fn decide(m: &TreeAutomaton, mode: PairMode, limits: &Limits) -> Result<Verdict<BinaryTree>> {
    let m = m.trim();
    let Some(mut z) = m.empty_witness() else {
        return match mode {
            PairMode::Bad => Ok(Verdict::Jep),
            PairMode::Semibad => certify(&m, BinaryTree::leaf(0), BinaryTree::leaf(0)),
        };
    };
    for round in 0..limits.max_states {
        let p = TreePipeline::fitting(&m, &z, limits)?;
        let ps = explore_profiles(&p, limits)?;
        let miss = ps
            .states
            .iter()
            .find(|(s, f, _)| (mode == PairMode::Semibad || m.is_accepting(*s)) && !p.fits(&ps.profiles[*f]));
        log::debug!(
            "decide_jep_tree round {round}: |Z| = {}, {} realizable pairs, {} product states",
            z.size(),
            p.realizable_count(),
            ps.states.len()
        );
        let Some((_, _, x)) = miss else { return Ok(Verdict::Jep) };
        match joint_witness(&m, &z, x)? {
            Some(next) => z = next,
            None => {
                let (x, y) = smallest_bad_pair(&m, mode, (z, x.clone()), limits)?;
                return certify(&m, x, y);
            }
        }
    }
    Err(JepError::size_limit("refinement rounds", limits.max_states))
}

fn certify(m: &TreeAutomaton, x: BinaryTree, y: BinaryTree) -> Result<Verdict<BinaryTree>> {
    let (joint, states) = joint_by_product(m, &x, &y)?;
    if joint {
        return Err(JepError::CertificateFailed(format!(
            "pair ({x}, {y}) has a common extension in the language"
        )));
    }
    let (x, y) = normalize_tree_pair(x, y);
    Ok(Verdict::BadPair {
        x,
        y,
        certificate: Certificate::ProductEmpty { states_explored: states },
    })
}

const MEMBER_CAP: usize = 400;
const PAIR_CHECK_CAP: usize = 50_000;

/// A bad pair of least total size, given a known bad pair `found`. Pairs are
/// searched exhaustively up to the largest size with at most `MEMBER_CAP`
/// candidate trees; past that, `found` is shrunk greedily instead.
fn smallest_bad_pair(
    m: &TreeAutomaton,
    mode: PairMode,
    found: (BinaryTree, BinaryTree),
    limits: &Limits,
) -> Result<(BinaryTree, BinaryTree)> {
    let total = found.0.size() + found.1.size();
    let eligible = |t: &BinaryTree| mode == PairMode::Semibad || m.accepts(t).unwrap_or(false);
    let k = m.labels().size();
    let mut members: Vec<BinaryTree> = Vec::new();
    let mut n = 0;
    while n + 1 < total {
        let Ok(trees) = enumerate_binary(k, n + 1, MEMBER_CAP) else { break };
        let next: Vec<BinaryTree> = trees.into_iter().filter(|t| eligible(t)).collect();
        if next.len() > MEMBER_CAP {
            break;
        }
        members = next;
        n += 1;
    }
    members.sort_by(|a, b| tree_key(a).cmp(&tree_key(b)));
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..members.len() {
        for j in i..members.len() {
            if members[i].size() + members[j].size() <= (n + 1).min(total) {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_by(|&(a, b), &(c, d)| {
        tree_pair_key(&members[a], &members[b]).cmp(&tree_pair_key(&members[c], &members[d]))
    });
    for &(i, j) in pairs.iter().take(PAIR_CHECK_CAP.min(limits.max_states)) {
        if !joint_by_product(m, &members[i], &members[j])?.0 {
            return Ok((members[i].clone(), members[j].clone()));
        }
    }
    let (mut x, mut y) = found;
    loop {
        let mut changed = false;
        for side in 0..2 {
            let (cur, other) = if side == 0 { (&x, &y) } else { (&y, &x) };
            let mut next = None;
            for c in shrinks(cur) {
                if eligible(&c) && !joint_by_product(m, &c, other)?.0 {
                    next = Some(c);
                    break;
                }
            }
            if let Some(c) = next {
                if side == 0 {
                    x = c;
                } else {
                    y = c;
                }
                changed = true;
            }
        }
        if !changed {
            return Ok((x, y));
        }
    }
}

/// Trees obtained by replacing one internal node's subtree with one of its
/// child subtrees, smallest first.
fn shrinks(t: &BinaryTree) -> Vec<BinaryTree> {
    fn go(t: &BinaryTree, out: &mut Vec<BinaryTree>) {
        let Some((a, b)) = t.children() else { return };
        out.push(a.clone());
        out.push(b.clone());
        let mut sub = Vec::new();
        go(a, &mut sub);
        out.extend(sub.drain(..).map(|a2| BinaryTree::node(t.label(), a2, b.clone())));
        go(b, &mut sub);
        out.extend(sub.drain(..).map(|b2| BinaryTree::node(t.label(), a.clone(), b2)));
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out.sort_by(|a, b| tree_key(a).cmp(&tree_key(b)));
    out.dedup();
    out
}

/// Decides JEP from the walk sets of all reachable profiles at once. Only
/// feasible when the realizable table is small; the bad pair is one of
/// least total size among profile representatives.
pub fn decide_jep_tree_by_profiles(m: &TreeAutomaton, mode: PairMode, limits: &Limits) -> Result<Verdict<BinaryTree>> {
    let p = TreePipeline::new(m, limits)?;
    let ps = explore_profiles(&p, limits)?;
    let m = p.automaton();
    let mut reps: Vec<(usize, &BinaryTree)> = Vec::new();
    let mut has_rep = vec![false; ps.profiles.len()];
    for (s, f, t) in &ps.states {
        if (mode == PairMode::Semibad || m.is_accepting(*s)) && !has_rep[*f] {
            has_rep[*f] = true;
            reps.push((*f, t));
        }
    }
    let wsets: Vec<BitSet> = reps.iter().map(|(f, _)| p.wset_of_profile(&ps.profiles[*f])).collect();
    let mut best: Option<(BinaryTree, BinaryTree)> = None;
    for i in 0..reps.len() {
        for j in i..reps.len() {
            if wsets[i].intersects(&wsets[j]) {
                continue;
            }
            let cand = normalize_tree_pair(reps[i].1.clone(), reps[j].1.clone());
            if best
                .as_ref()
                .is_none_or(|b| tree_pair_key(&cand.0, &cand.1) < tree_pair_key(&b.0, &b.1))
            {
                best = Some(cand);
            }
        }
    }
    log::debug!(
        "decide_jep_tree: {} product states, {} profiles",
        ps.states.len(),
        ps.profiles.len()
    );
    match best {
        None => Ok(Verdict::Jep),
        Some((x, y)) => certify(m, x, y),
    }
}

/// Size diagnostics for the tree construction. Bounds are powers of two and
/// are stored by exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBounds {
    /// `|𝒲|`, the number of tree walks of `D`.
    pub walks: BigUint,
    pub states: usize,
    pub labels: usize,
    /// Node bound for minimal semibad pairs is `2^(2^walks)`.
    pub semibad_exponent: BigUint,
    /// Node bound for realizing a walk is `2^(walks·|Σ|·|Λ|)`.
    pub realization_exponent: BigUint,
    /// Size of the realizable `(σ_M(Z), W_Z)` table, if it fits the cap.
    pub realizable_pairs: Option<usize>,
}

/// Walks are counted rather than enumerated, so this works past the walk cap;
/// `2^(2^walks)` is kept symbolic when `walks` is large.
pub fn report_bounds(m: &TreeAutomaton, limits: &Limits) -> Result<TreeBounds> {
    let p = TreePipeline::walks_only(m, limits)?;
    let walks = count_tree_walks(p.condensation())?;
    let realizable_pairs = match TreePipeline::new(m, limits) {
        Ok(full) => Some(full.realizable_count()),
        Err(JepError::SizeLimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let m = p.automaton();
    let semibad_exponent = match u32::try_from(&walks) {
        Ok(w) if w <= 1 << 16 => BigUint::from(1u8) << w,
        _ => BigUint::from(0u8),
    };
    Ok(TreeBounds {
        realization_exponent: &walks * m.state_count() * m.labels().size(),
        semibad_exponent,
        walks,
        states: m.state_count(),
        labels: m.labels().size(),
        realizable_pairs,
    })
}

impl TreeBounds {
    /// `2^(2^walks)`, spelled out when the inner power is short.
    pub fn semibad_display(&self) -> String {
        if self.semibad_exponent.bits() > 0 {
            pow2_display(&self.semibad_exponent)
        } else {
            format!("2^(2^{})", self.walks)
        }
    }
}

/// Renders `2^e`, spelling `e` out only when it is short.
pub fn pow2_display(e: &BigUint) -> String {
    let digits = e.to_string();
    if digits.len() <= 30 {
        format!("2^{digits}")
    } else {
        format!("2^({} bits)", e.bits())
    }
}

/// The walk automaton exactly as first described: states are sets of tree
/// walks, a leaf goes to its one-vertex walk, and an internal node keeps the
/// walks having a prefix from each child's set and a root SCC with a gluing
/// vertex of the node's label. Needs the full walk enumeration.
pub struct LiteralTreeN<'a> {
    p: &'a TreePipeline,
    walks: Vec<TreeWalk>,
    /// `prefix[i]`: walks that are prefixes of walk `i`.
    prefix: Vec<BitSet>,
    realizable: BitSet,
}

impl<'a> LiteralTreeN<'a> {
    pub fn new(p: &'a TreePipeline, cap: usize) -> Result<Self> {
        let walks = enumerate_tree_walks(p.condensation(), cap)?;
        let prefix = walks
            .iter()
            .map(|w| (0..walks.len()).filter(|&i| walk_prefix(&walks[i], w)).collect())
            .collect();
        let real: BTreeSet<TreeWalk> = p.realizable_walks().into_iter().map(|(_, w)| w).collect();
        let realizable = (0..walks.len()).filter(|&i| real.contains(&walks[i])).collect();
        Ok(LiteralTreeN {
            p,
            walks,
            prefix,
            realizable,
        })
    }

    pub fn walks(&self) -> &[TreeWalk] {
        &self.walks
    }

    pub fn leaf(&self, l: usize) -> BitSet {
        let c = self.p.d.cond.component[self.p.j.initial_of[l]];
        (0..self.walks.len())
            .filter(|&i| self.walks[i] == TreeWalk::leaf(c))
            .collect()
    }

    pub fn step(&self, l: usize, a: &BitSet, b: &BitSet) -> BitSet {
        (0..self.walks.len())
            .filter(|&i| self.p.d.gluing_labels[self.walks[i].label].contains(&l))
            .filter(|&i| self.prefix[i].intersects(a) && self.prefix[i].intersects(b))
            .collect()
    }

    pub fn run(&self, x: &BinaryTree) -> BitSet {
        match x.children() {
            None => self.leaf(x.label()),
            Some((a, b)) => self.step(x.label(), &self.run(a), &self.run(b)),
        }
    }

    /// Realizable walks with an accepting root and a prefix in `N(x)`.
    pub fn wset(&self, x: &BinaryTree) -> BTreeSet<TreeWalk> {
        let s = self.run(x);
        (0..self.walks.len())
            .filter(|&i| self.realizable.contains(i))
            .filter(|&i| self.p.d.accepting[self.walks[i].label])
            .filter(|&i| self.prefix[i].intersects(&s))
            .map(|i| self.walks[i].clone())
            .collect()
    }
}

/// Labels `0..k` as a [`LabelSet`]; a convenience for tests and examples.
pub fn numeric_labels(k: usize) -> LabelSet {
    LabelSet::numeric(k).expect("positive label count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_automata::forb_tree;
    use crate::trees::{binary_contains, enumerate_binary};

    fn l2() -> LabelSet {
        numeric_labels(2)
    }

    fn t(s: &str) -> BinaryTree {
        BinaryTree::parse(s, &l2()).unwrap()
    }

    fn all0() -> TreeAutomaton {
        forb_tree(&[t("(1)")], &l2()).unwrap()
    }

    fn all0_or_all1() -> TreeAutomaton {
        all0().union(&forb_tree(&[t("(0)")], &l2()).unwrap()).unwrap()
    }

    fn lim() -> Limits {
        Limits {
            max_walks: 50_000,
            max_states: 50_000,
        }
    }

    #[test]
    fn mhat_counts() {
        let one = TreeAutomaton::universal(numeric_labels(1));
        let h = build_mhat(&one);
        assert_eq!((h.tree_like_count(), h.forest_like_count()), (1, 1));
        assert_eq!((h.gluing.len(), h.union.len()), (1, 1));
        let m = all0();
        let h = build_mhat(&m);
        assert_eq!(m.state_count(), 2);
        assert_eq!(h.gluing.len(), 2 * 3);
        assert_eq!(h.union.len(), 2 * 2 * 2);
    }

    #[test]
    fn j_structure() {
        for m in [all0(), all0_or_all1(), TreeAutomaton::universal(l2())] {
            let j = build_j(&m);
            let mut indeg = vec![0; j.len()];
            for v in 0..j.len() {
                for &w in j.graph.successors(v) {
                    indeg[w] += 1;
                    // kinds alternate
                    let kinds = (j.vertices[v], j.vertices[w]);
                    assert!(matches!(
                        kinds,
                        (JVertex::Union { .. }, JVertex::Gluing { .. })
                            | (JVertex::Gluing { .. }, JVertex::Union { .. })
                            | (JVertex::Initial { .. }, JVertex::Union { .. })
                    ));
                }
            }
            for l in 0..2 {
                assert_eq!(indeg[j.initial_of[l]], 0);
                for &w in j.graph.successors(j.initial_of[l]) {
                    match j.vertices[w] {
                        JVertex::Union { t, label, .. } => assert_eq!((t, label), (m.m0(l), l)),
                        v => panic!("{v:?}"),
                    }
                }
            }
            let d = TreeCondensation::of(&m, &j);
            for c in 0..d.len() {
                if d.loopy(c) {
                    assert!(d.gluing[c] && d.union[c]);
                }
                if d.initial[c] {
                    assert_eq!(d.cond.members[c].len(), 1);
                }
            }
            assert_eq!(d.initial.iter().filter(|&&b| b).count(), 2);
        }
    }

    #[test]
    fn walk_routes_agree() {
        for m in [all0(), all0_or_all1(), forb_tree(&[t("(1 (0) (0))")], &l2()).unwrap()] {
            let p = TreePipeline::new(&m, &lim()).unwrap();
            for z in enumerate_binary(2, 7, 100_000).unwrap() {
                assert_eq!(
                    p.walk_of_tree(&z).unwrap(),
                    p.walk_of_tree_definitional(&z).unwrap(),
                    "{z}"
                );
            }
        }
    }

    #[test]
    fn walk_of_leaf_and_loopy_region() {
        let m = all0();
        let p = TreePipeline::new(&m, &lim()).unwrap();
        let d = p.condensation();
        let w = p.walk_of_tree(&t("(0)")).unwrap();
        assert!(w.is_leaf() && d.initial[w.label]);
        let big = t("(0 (0 (0) (0)) (0 (0) (0 (0) (0))))");
        let w = p.walk_of_tree(&big).unwrap();
        assert!(d.loopy(w.label));
        assert_eq!(w.children.len(), 1);
        assert!(w.children[0].is_leaf());
    }

    #[test]
    fn tree_walk_enumeration_covers_realized_walks() {
        let m = all0();
        let p = TreePipeline::new(&m, &lim()).unwrap();
        let all: BTreeSet<TreeWalk> = enumerate_tree_walks(p.condensation(), 100_000)
            .unwrap()
            .into_iter()
            .collect();
        let real: BTreeSet<TreeWalk> = p.realizable_walks().into_iter().map(|(_, w)| w).collect();
        assert!(real.is_subset(&all));
        let live = p.automaton().live_states();
        let scanned: BTreeSet<TreeWalk> = enumerate_binary(2, 9, 1_000_000)
            .unwrap()
            .iter()
            .filter(|z| live[p.automaton().run(z).unwrap()])
            .map(|z| p.walk_of_tree(z).unwrap())
            .collect();
        assert_eq!(scanned, real);
    }

    #[test]
    fn realizable_contains_sampled_runs() {
        let m = all0_or_all1();
        let p = TreePipeline::new(&m, &lim()).unwrap();
        let real: BTreeSet<(usize, TreeWalk)> = p.realizable_walks().into_iter().collect();
        let live = p.automaton().live_states();
        for z in enumerate_binary(2, 7, 100_000).unwrap() {
            let s = p.automaton().run(&z).unwrap();
            assert_eq!(live[s], real.contains(&(s, p.walk_of_tree(&z).unwrap())));
        }
    }

    #[test]
    fn prefix_examples() {
        let w = TreeWalk::canonical(5, vec![TreeWalk::leaf(0), TreeWalk::canonical(4, vec![TreeWalk::leaf(1), TreeWalk::leaf(0)])]);
        assert!(walk_prefix(&w, &w));
        assert!(walk_prefix(&TreeWalk::leaf(1), &w));
        assert!(walk_prefix(&TreeWalk::canonical(4, vec![TreeWalk::leaf(1)]), &w));
        // dropping the internal node 4 disconnects leaf 1 from the root
        let cut = TreeWalk::canonical(5, vec![TreeWalk::leaf(0), TreeWalk::leaf(1)]);
        assert!(!walk_prefix(&cut, &w));
        // a prefix leaf must be a leaf of w
        assert!(!walk_prefix(&TreeWalk::leaf(4), &w));
    }

    fn wset_by_scan(p: &TreePipeline, x: &BinaryTree, max: usize) -> BTreeSet<TreeWalk> {
        enumerate_binary(2, max, 1_000_000)
            .unwrap()
            .into_iter()
            .filter(|z| p.automaton().accepts(z).unwrap() && binary_contains(z, x))
            .map(|z| p.walk_of_tree(&z).unwrap())
            .collect()
    }

    #[test]
    fn wset_matches_scan() {
        for m in [all0(), all0_or_all1()] {
            let p = TreePipeline::new(&m, &lim()).unwrap();
            for x in enumerate_binary(2, 3, 1000).unwrap() {
                let scanned = wset_by_scan(&p, &x, 9);
                let computed = p.wset_tree(&x).unwrap();
                assert!(scanned.is_subset(&computed), "{x}");
                assert_eq!(scanned, computed, "{x}");
            }
        }
    }

    #[test]
    fn literal_rule_misses_leaf_at_internal_node() {
        // Z = (1 (0) (0)) has only 0-leaves and contains the leaf 1
        let m = all0_leaves();
        let p = TreePipeline::new(&m, &lim()).unwrap();
        let x = t("(1)");
        assert!(m.accepts(&t("(1 (0) (0))")).unwrap());
        assert!(!p.wset_tree(&x).unwrap().is_empty());
        let lit = LiteralTreeN::new(&p, 100_000).unwrap();
        assert!(lit.wset(&x).is_empty());
        assert!(joint_tree(&m, &x, &t("(0)")).unwrap());
    }

    fn all0_leaves() -> TreeAutomaton {
        // state 0: all leaves 0; state 1: some leaf 1
        TreeAutomaton::from_fn(l2(), 2, |s| s == 0, |l| l, |_, s, t| s.max(t)).unwrap()
    }

    #[test]
    fn profiles_monotone() {
        let p = TreePipeline::new(&all0_or_all1(), &lim()).unwrap();
        let trees = enumerate_binary(2, 5, 1000).unwrap();
        for x in &trees {
            for y in &trees {
                if binary_contains(y, x) {
                    assert!(p.wset_ids(y).unwrap().is_subset(&p.wset_ids(x).unwrap()));
                }
            }
        }
    }

    #[test]
    fn joint_examples() {
        assert!(joint_tree(&all0(), &t("(0 (0) (0))"), &t("(0)")).unwrap());
        assert!(!joint_tree(&all0_or_all1(), &t("(0)"), &t("(1)")).unwrap());
        let x = t("(1 (1) (1))");
        assert!(joint_tree(&all0_or_all1(), &x, &x).unwrap());
        let w = joint_witness(&TreeAutomaton::universal(l2()), &t("(0)"), &t("(1)")).unwrap().unwrap();
        assert_eq!(w.size(), 3);
        assert!(binary_contains(&w, &t("(0)")) && binary_contains(&w, &t("(1)")));
        assert_eq!(joint_witness(&all0_or_all1(), &t("(0)"), &t("(1)")).unwrap(), None);
        assert_eq!(joint_witness(&all0(), &t("(0)"), &t("(0)")).unwrap(), Some(t("(0)")));
    }

    #[test]
    fn decide_examples() {
        assert!(decide_jep_tree(&all0(), PairMode::Bad, &lim()).unwrap().is_jep());
        assert!(decide_jep_tree(&TreeAutomaton::universal(l2()), PairMode::Bad, &lim()).unwrap().is_jep());
        match decide_jep_tree(&all0_or_all1(), PairMode::Bad, &lim()).unwrap() {
            Verdict::BadPair { x, y, .. } => assert_eq!((x, y), (t("(0)"), t("(1)"))),
            v => panic!("{v:?}"),
        }
        assert!(matches!(
            decide_jep_tree(&all0_or_all1(), PairMode::Semibad, &lim()).unwrap(),
            Verdict::BadPair { .. }
        ));
        // some internal node labeled 1; the global table is far too large here
        let m = TreeAutomaton::from_fn(l2(), 2, |s| s == 1, |_| 0, |l, s, t| usize::from(l == 1 || s == 1 || t == 1)).unwrap();
        assert!(TreePipeline::new(&m, &lim()).is_err());
        assert!(decide_jep_tree(&m, PairMode::Bad, &lim()).unwrap().is_jep());
        match decide_jep_tree(&m, PairMode::Semibad, &lim()).unwrap() {
            Verdict::BadPair { .. } => panic!("every tree sits below a member"),
            Verdict::Jep => {}
        }
    }

    #[test]
    fn refinement_agrees_with_profiles() {
        for m in [all0(), all0_or_all1(), TreeAutomaton::universal(l2())] {
            for mode in [PairMode::Bad, PairMode::Semibad] {
                let a = decide_jep_tree(&m, mode, &lim()).unwrap();
                let b = decide_jep_tree_by_profiles(&m, mode, &lim()).unwrap();
                assert_eq!(a, b, "{mode:?}");
            }
        }
    }

    #[test]
    fn bounds_basic() {
        let b = report_bounds(&all0(), &lim()).unwrap();
        assert!(b.walks >= BigUint::from(2u8));
        let w = u32::try_from(&b.walks).unwrap();
        assert_eq!(b.semibad_exponent, BigUint::from(1u8) << w);
        assert_eq!(b.semibad_display(), pow2_display(&b.semibad_exponent));
        assert_eq!(pow2_display(&BigUint::from(14u8)), "2^14");
        let big = report_bounds(&all0_or_all1(), &lim()).unwrap();
        assert_eq!(big.walks, (BigUint::from(1u8) << 40u32) + 39u8);
        assert_eq!(big.semibad_display(), "2^(2^1099511627815)");
    }

    #[test]
    fn walk_count_matches_enumeration() {
        let cfg = crate::oracle::TrialConfig::default();
        let mut counted = 0;
        for i in 0..40 {
            let m = crate::oracle::random_ta(&cfg, &mut crate::oracle::trial_rng(7, i));
            let Ok(p) = TreePipeline::walks_only(&m, &lim()) else { continue };
            let Ok(all) = enumerate_tree_walks(p.condensation(), 100_000) else { continue };
            assert_eq!(count_tree_walks(p.condensation()).unwrap(), BigUint::from(all.len()));
            counted += 1;
        }
        assert!(counted >= 10, "{counted}");
    }
}
