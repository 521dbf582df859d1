//! Deterministic bottom-up automata over full binary trees with unordered
//! children.
//!
//! `m2` is keyed on unordered state pairs, so an automaton cannot tell a tree
//! from its mirror image.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::hash::Hash;

use crate::bits::BitSet;
use crate::dfa::BoolOp;
use crate::error::{JepError, Result};
use crate::trees::{BinaryTree, LabelSet};

/// Index of the unordered pair `{s, t}` among pairs over `0..n`.
pub fn pair_index(s: usize, t: usize) -> usize {
    let (a, b) = if s <= t { (s, t) } else { (t, s) };
    b * (b + 1) / 2 + a
}

fn pair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    labels: LabelSet,
    accepting: Vec<bool>,
    m0: Vec<usize>,
    /// `m2[label * pair_count(n) + pair_index(s, t)]`
    m2: Vec<usize>,
}

impl TreeAutomaton {
    pub fn new(labels: LabelSet, accepting: Vec<bool>, m0: Vec<usize>, m2: Vec<usize>) -> Result<Self> {
        let n = accepting.len();
        if n == 0 {
            return Err(JepError::InvalidArgument("a tree automaton needs a state".into()));
        }
        if m0.len() != labels.size() || m2.len() != labels.size() * pair_count(n) {
            return Err(JepError::InvalidArgument("transition tables have the wrong size".into()));
        }
        if m0.iter().chain(&m2).any(|&s| s >= n) {
            return Err(JepError::InvalidArgument("transition target out of range".into()));
        }
        Ok(TreeAutomaton {
            labels,
            accepting,
            m0,
            m2,
        })
    }

    /// Builds an automaton from functions; `m2` is only consulted with `s <= t`.
    pub fn from_fn(
        labels: LabelSet,
        n: usize,
        accept: impl Fn(usize) -> bool,
        m0: impl Fn(usize) -> usize,
        m2: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let k = labels.size();
        let mut table = vec![0; k * pair_count(n)];
        for l in 0..k {
            for t in 0..n {
                for s in 0..=t {
                    table[l * pair_count(n) + pair_index(s, t)] = m2(l, s, t);
                }
            }
        }
        TreeAutomaton::new(labels, (0..n).map(accept).collect(), (0..k).map(m0).collect(), table)
    }

    /// Accepts every tree.
    pub fn universal(labels: LabelSet) -> Self {
        let k = labels.size();
        TreeAutomaton {
            labels,
            accepting: vec![true],
            m0: vec![0; k],
            m2: vec![0; k],
        }
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.state_count()).filter(|&s| self.accepting[s])
    }

    /// States from which some context reaches acceptance. Siblings are
    /// restricted to reachable states, so call this on a trimmed automaton.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.state_count();
        let mut live = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if live[s] {
                    continue;
                }
                if (0..n).any(|t| (0..self.labels.size()).any(|l| live[self.m2(l, s, t)])) {
                    live[s] = true;
                    changed = true;
                }
            }
        }
        live
    }

    pub fn m0(&self, label: usize) -> usize {
        self.m0[label]
    }

    pub fn m2(&self, label: usize, s: usize, t: usize) -> usize {
        self.m2[label * pair_count(self.state_count()) + pair_index(s, t)]
    }

    fn check_same_labels(&self, other: &TreeAutomaton) -> Result<()> {
        if self.labels != other.labels {
            return Err(JepError::LabelMismatch("automata have different label sets".into()));
        }
        Ok(())
    }

    /// State at the root after the bottom-up run.
    pub fn run(&self, t: &BinaryTree) -> Result<usize> {
        t.check_labels(&self.labels)?;
        Ok(self.run_unchecked(t))
    }

    pub(crate) fn run_unchecked(&self, t: &BinaryTree) -> usize {
        match t.children() {
            None => self.m0(t.label()),
            Some((a, b)) => self.m2(t.label(), self.run_unchecked(a), self.run_unchecked(b)),
        }
    }

    /// States of every node, in postorder (root last).
    pub fn run_all(&self, t: &BinaryTree) -> Result<Vec<usize>> {
        t.check_labels(&self.labels)?;
        let f = t.flatten();
        let mut st = vec![0; f.len()];
        for v in 0..f.len() {
            st[v] = match f.kids[v] {
                None => self.m0(f.label[v]),
                Some((a, b)) => self.m2(f.label[v], st[a], st[b]),
            };
        }
        Ok(st)
    }

    pub fn accepts(&self, t: &BinaryTree) -> Result<bool> {
        Ok(self.accepting[self.run(t)?])
    }

    pub fn product(&self, other: &TreeAutomaton, op: BoolOp) -> Result<TreeAutomaton> {
        self.check_same_labels(other)?;
        let (ta, _) = explore(
            &self.labels,
            |l| (self.m0(l), other.m0(l)),
            |l, &(p1, q1), &(p2, q2)| (self.m2(l, p1, p2), other.m2(l, q1, q2)),
            |&(p, q)| match op {
                BoolOp::And => self.accepting[p] && other.accepting[q],
                BoolOp::Or => self.accepting[p] || other.accepting[q],
            },
            usize::MAX,
        )?;
        Ok(ta)
    }

    pub fn intersection(&self, other: &TreeAutomaton) -> Result<TreeAutomaton> {
        self.product(other, BoolOp::And)
    }

    pub fn union(&self, other: &TreeAutomaton) -> Result<TreeAutomaton> {
        self.product(other, BoolOp::Or)
    }

    pub fn complement(&self) -> TreeAutomaton {
        TreeAutomaton {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    /// Keeps only states reached by some tree.
    pub fn trim(&self) -> TreeAutomaton {
        explore(
            &self.labels,
            |l| self.m0(l),
            |l, &s, &t| self.m2(l, s, t),
            |&s| self.accepting[s],
            usize::MAX,
        )
        .expect("uncapped exploration")
        .0
    }

    /// Trimmed and with equivalent states merged (Moore refinement). Classes
    /// are numbered by first occurrence, so the result is canonical for a
    /// given trimmed input.
    pub fn minimize(&self) -> TreeAutomaton {
        let m = self.trim();
        let (n, k) = (m.state_count(), m.labels.size());
        let mut class: Vec<usize> = m.accepting.iter().map(|&a| usize::from(a)).collect();
        let mut count = 0;
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let mut sig = vec![class[s]];
                    for l in 0..k {
                        sig.extend((0..n).map(|t| class[m.m2(l, s, t)]));
                    }
                    let id = ids.len();
                    *ids.entry(sig).or_insert(id)
                })
                .collect();
            let c = ids.len();
            class = next;
            if c == count {
                break;
            }
            count = c;
        }
        let mut rep = vec![usize::MAX; count];
        for s in (0..n).rev() {
            rep[class[s]] = s;
        }
        TreeAutomaton::from_fn(
            m.labels.clone(),
            count,
            |c| m.accepting[rep[c]],
            |l| class[m.m0(l)],
            |l, a, b| class[m.m2(l, rep[a], rep[b])],
        )
        .expect("quotient of a valid automaton")
    }

    pub fn is_trim(&self) -> bool {
        self.trim().state_count() == self.state_count()
    }

    /// A smallest tree reaching each state (`None` when unreachable); ties are
    /// broken by the canonical tree order.
    pub fn smallest_trees(&self) -> Vec<Option<BinaryTree>> {
        let n = self.state_count();
        let k = self.labels.size();
        let mut size: Vec<Option<usize>> = vec![None; n];
        let mut best: Vec<Option<BinaryTree>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for l in 0..k {
            heap.push(Reverse((1, self.m0(l))));
        }
        let mut done: Vec<usize> = Vec::new();
        while let Some(Reverse((z, t))) = heap.pop() {
            if size[t].is_some() {
                continue;
            }
            size[t] = Some(z);
            done.push(t);
            for &s in &done {
                let zs = size[s].unwrap();
                for l in 0..k {
                    let target = self.m2(l, s, t);
                    if size[target].is_none() {
                        heap.push(Reverse((z + zs + 1, target)));
                    }
                }
            }
        }
        let mut cands: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
        for (i, &s1) in done.iter().enumerate() {
            for &s2 in &done[i..] {
                for l in 0..k {
                    let t = self.m2(l, s1, s2);
                    if size[t] == Some(size[s1].unwrap() + size[s2].unwrap() + 1) {
                        cands[t].push((l, s1, s2));
                    }
                }
            }
        }
        // States in order of size; children of a smallest tree are strictly
        // smaller, so their own trees are final when a state is reached.
        for &t in &done {
            let mut cand = (0..k).filter(|&l| size[t] == Some(1) && self.m0(l) == t).map(BinaryTree::leaf).min();
            for &(l, s1, s2) in &cands[t] {
                let (Some(a), Some(b)) = (&best[s1], &best[s2]) else { continue };
                let c = BinaryTree::node(l, a.clone(), b.clone());
                if cand.as_ref().is_none_or(|x| c < *x) {
                    cand = Some(c);
                }
            }
            best[t] = cand;
        }
        best
    }

    /// A smallest accepted tree, or `None` if the language is empty.
    pub fn empty_witness(&self) -> Option<BinaryTree> {
        self.smallest_trees()
            .into_iter()
            .enumerate()
            .filter(|(s, _)| self.accepting[*s])
            .filter_map(|(_, t)| t)
            .min_by(|a, b| (a.size(), a).cmp(&(b.size(), b)))
    }

    pub fn is_empty(&self) -> bool {
        self.empty_witness().is_none()
    }

    pub fn to_text(&self) -> String {
        let n = self.state_count();
        let mut s = format!("labels: {}\nstates: {n}\n", self.labels.names().join(" "));
        let acc: Vec<String> = self.accepting_states().map(|q| q.to_string()).collect();
        s.push_str(format!("accept: {}", acc.join(" ")).trim_end());
        s.push('\n');
        for l in 0..self.labels.size() {
            s.push_str(&format!("m0: {} -> {}\n", self.labels.name(l), self.m0(l)));
        }
        for l in 0..self.labels.size() {
            for t in 0..n {
                for a in 0..=t {
                    s.push_str(&format!(
                        "m2: {} ({a},{t}) -> {}\n",
                        self.labels.name(l),
                        self.m2(l, a, t)
                    ));
                }
            }
        }
        s
    }

    /// Reads the line-oriented tree-automaton format. Every unordered pair must
    /// be given for every label; giving `(s,t)` and `(t,s)` different targets
    /// is an error.
    pub fn parse_text(text: &str) -> Result<TreeAutomaton> {
        let mut labels = None;
        let mut states = None;
        let mut accept: Vec<(usize, usize)> = Vec::new();
        let mut m0: Vec<(usize, String, usize)> = Vec::new();
        let mut m2: Vec<(usize, String, usize, usize, usize)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| JepError::parse(line_no, 1, "expected `key: value`"))?;
            let col = raw.find(':').unwrap_or(0) + 2;
            let num = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| JepError::parse(line_no, col, format!("expected a number, got {s:?}")))
            };
            match key.trim() {
                "labels" => {
                    labels = Some(LabelSet::parse(rest).map_err(|e| JepError::parse(line_no, col, e.to_string()))?)
                }
                "states" => states = Some(num(rest)?),
                "accept" => {
                    for a in rest.split_whitespace() {
                        accept.push((num(a)?, line_no));
                    }
                }
                "m0" => {
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| JepError::parse(line_no, col, "expected `m0: label -> state`"))?;
                    m0.push((line_no, lhs.trim().to_owned(), num(rhs)?));
                }
                "m2" => {
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| JepError::parse(line_no, col, "expected `m2: label (s,t) -> state`"))?;
                    let (label, pair) = lhs
                        .split_once('(')
                        .ok_or_else(|| JepError::parse(line_no, col, "expected `(s,t)`"))?;
                    let pair = pair
                        .trim()
                        .strip_suffix(')')
                        .ok_or_else(|| JepError::parse(line_no, col, "expected `)`"))?;
                    let (s, t) = pair
                        .split_once(',')
                        .ok_or_else(|| JepError::parse(line_no, col, "expected `s,t`"))?;
                    m2.push((line_no, label.trim().to_owned(), num(s)?, num(t)?, num(rhs)?));
                }
                other => return Err(JepError::parse(line_no, 1, format!("unknown key {other:?}"))),
            }
        }
        let labels = labels.ok_or_else(|| JepError::parse(1, 1, "missing `labels:` line"))?;
        let n = states.ok_or_else(|| JepError::parse(1, 1, "missing `states:` line"))?;
        let k = labels.size();
        let lookup = |line_no: usize, name: &str| {
            labels
                .index_of(name)
                .ok_or_else(|| JepError::parse(line_no, 1, format!("unknown label {name:?}")))
        };
        let mut accepting = vec![false; n];
        for (q, line_no) in accept {
            if q >= n {
                return Err(JepError::parse(line_no, 1, format!("accepting state {q} out of range")));
            }
            accepting[q] = true;
        }
        let mut t0: Vec<Option<usize>> = vec![None; k];
        for (line_no, name, to) in m0 {
            let l = lookup(line_no, &name)?;
            if to >= n {
                return Err(JepError::parse(line_no, 1, "state out of range"));
            }
            if t0[l].is_some_and(|old| old != to) {
                return Err(JepError::parse(line_no, 1, "conflicting m0 entry"));
            }
            t0[l] = Some(to);
        }
        let pc = pair_count(n);
        let mut t2: Vec<Option<usize>> = vec![None; k * pc];
        for (line_no, name, s, t, to) in m2 {
            let l = lookup(line_no, &name)?;
            if s >= n || t >= n || to >= n {
                return Err(JepError::parse(line_no, 1, "state out of range"));
            }
            let slot = &mut t2[l * pc + pair_index(s, t)];
            if slot.is_some_and(|old| old != to) {
                return Err(JepError::parse(
                    line_no,
                    1,
                    format!("asymmetric or conflicting m2 entry for {name} ({s},{t})"),
                ));
            }
            *slot = Some(to);
        }
        if let Some(l) = t0.iter().position(Option::is_none) {
            return Err(JepError::parse(1, 1, format!("m0 missing for label {}", labels.name(l))));
        }
        if let Some(i) = t2.iter().position(Option::is_none) {
            let (l, p) = (i / pc, i % pc);
            let t = (0..n).find(|&t| pair_count(t + 1) > p).unwrap_or(0);
            let s = p - pair_count(t);
            return Err(JepError::parse(
                1,
                1,
                format!("m2 missing for {} ({s},{t})", labels.name(l)),
            ));
        }
        TreeAutomaton::new(
            labels,
            accepting,
            t0.into_iter().flatten().collect(),
            t2.into_iter().flatten().collect(),
        )
    }
}

impl fmt::Display for TreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Builds the reachable part of an automaton whose states are values of `K`.
/// `node` must be symmetric in its two state arguments. Returns the automaton
/// and the value of each state.
pub fn explore<K: Clone + Eq + Hash>(
    labels: &LabelSet,
    leaf: impl Fn(usize) -> K,
    node: impl Fn(usize, &K, &K) -> K,
    accept: impl Fn(&K) -> bool,
    cap: usize,
) -> Result<(TreeAutomaton, Vec<K>)> {
    let k = labels.size();
    let mut values: Vec<K> = Vec::new();
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut intern = |v: K, values: &mut Vec<K>| -> Result<usize> {
        if let Some(&i) = index.get(&v) {
            return Ok(i);
        }
        if values.len() >= cap {
            return Err(JepError::size_limit("tree automaton states", cap));
        }
        index.insert(v.clone(), values.len());
        values.push(v);
        Ok(values.len() - 1)
    };
    let m0: Vec<usize> = (0..k)
        .map(|l| intern(leaf(l), &mut values))
        .collect::<Result<_>>()?;
    // edges[t][s * k + l] is the target of (l, s, t) for s <= t
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut p = 0;
    while p < values.len() {
        let mut row = Vec::with_capacity((p + 1) * k);
        for s in 0..=p {
            for l in 0..k {
                let v = node(l, &values[s], &values[p]);
                row.push(intern(v, &mut values)?);
            }
        }
        edges.push(row);
        p += 1;
    }
    let n = values.len();
    let ta = TreeAutomaton::from_fn(
        labels.clone(),
        n,
        |s| accept(&values[s]),
        |l| m0[l],
        |l, s, t| edges[t][s * k + l],
    )?;
    Ok((ta, values))
}

/// Embedding states for one pattern: the set of pattern nodes (postorder
/// indices) whose subtrees embed in the subtree read so far.
struct SupStep {
    root: usize,
    /// Pattern leaves carrying each label.
    leaves: Vec<BitSet>,
    /// `(node, child, child)` for the inner pattern nodes carrying each label.
    inner: Vec<Vec<(usize, usize, usize)>>,
}

impl SupStep {
    fn new(pattern: &BinaryTree, labels: &LabelSet) -> Result<Self> {
        pattern.check_labels(labels)?;
        let p = pattern.flatten();
        let mut leaves = vec![BitSet::new(); labels.size()];
        let mut inner = vec![Vec::new(); labels.size()];
        for q in 0..p.len() {
            match p.kids[q] {
                None => {
                    leaves[p.label[q]].insert(q);
                }
                Some((c1, c2)) => inner[p.label[q]].push((q, c1, c2)),
            }
        }
        Ok(SupStep {
            root: p.root(),
            leaves,
            inner,
        })
    }

    fn leaf(&self, l: usize) -> BitSet {
        self.leaves[l].clone()
    }

    fn node(&self, l: usize, a: &BitSet, b: &BitSet) -> BitSet {
        let mut out = a.clone();
        out.union_with(b);
        out.union_with(&self.leaves[l]);
        for &(q, c1, c2) in &self.inner[l] {
            if (a.contains(c1) && b.contains(c2)) || (a.contains(c2) && b.contains(c1)) {
                out.insert(q);
            }
        }
        out
    }

    fn done(&self, s: &BitSet) -> bool {
        s.contains(self.root)
    }
}

/// Trees containing `pattern`.
pub fn sup_tree(pattern: &BinaryTree, labels: &LabelSet) -> Result<TreeAutomaton> {
    let sup = SupStep::new(pattern, labels)?;
    let (ta, _) = explore(labels, |l| sup.leaf(l), |l, a, b| sup.node(l, a, b), |s| sup.done(s), usize::MAX)?;
    Ok(ta)
}

/// `L(m)` restricted to trees containing every pattern, built from the
/// reachable part of the product only.
pub fn restrict_to_sup(m: &TreeAutomaton, patterns: &[&BinaryTree]) -> Result<TreeAutomaton> {
    let sups: Vec<SupStep> = patterns
        .iter()
        .map(|p| SupStep::new(p, m.labels()))
        .collect::<Result<_>>()?;
    // pattern progress is dropped once `m` can no longer accept
    let live = m.live_states();
    let (ta, _) = explore(
        m.labels(),
        |l| match m.m0(l) {
            q if live[q] => (q, sups.iter().map(|s| s.leaf(l)).collect::<Vec<_>>()),
            q => (q, Vec::new()),
        },
        |l, (q, a): &(usize, Vec<BitSet>), (r, b): &(usize, Vec<BitSet>)| match m.m2(l, *q, *r) {
            t if live[t] => (t, sups.iter().zip(a.iter().zip(b)).map(|(s, (x, y))| s.node(l, x, y)).collect()),
            t => (t, Vec::new()),
        },
        |(q, v)| m.is_accepting(*q) && sups.iter().zip(v).all(|(s, x)| s.done(x)),
        usize::MAX,
    )?;
    Ok(ta)
}

/// Trees avoiding every member of `forbidden`.
pub fn forb_tree(forbidden: &[BinaryTree], labels: &LabelSet) -> Result<TreeAutomaton> {
    let sups: Vec<TreeAutomaton> = forbidden
        .iter()
        .map(|f| sup_tree(f, labels))
        .collect::<Result<_>>()?;
    let (ta, _) = explore(
        labels,
        |l| sups.iter().map(|a| a.m0(l)).collect::<Vec<_>>(),
        |l, x: &Vec<usize>, y: &Vec<usize>| {
            sups.iter().zip(x.iter().zip(y)).map(|(a, (&s, &t))| a.m2(l, s, t)).collect()
        },
        |v: &Vec<usize>| sups.iter().zip(v).all(|(a, &s)| !a.is_accepting(s)),
        usize::MAX,
    )?;
    Ok(ta)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum HashState {
    Run(usize, usize),
    Accept,
    Dead,
}

/// `{ #(X, Y) : X ∈ L(a), Y ∈ L(b) }` over the labels extended by `#`.
pub fn hash_pair_tree(a: &TreeAutomaton, b: &TreeAutomaton) -> Result<TreeAutomaton> {
    a.check_same_labels(b)?;
    let (ext, hash) = a.labels.extended("#")?;
    let (ta, _) = explore(
        &ext,
        |l| {
            if l == hash {
                HashState::Dead
            } else {
                HashState::Run(a.m0(l), b.m0(l))
            }
        },
        |l, x, y| match (x, y) {
            (&HashState::Run(p1, q1), &HashState::Run(p2, q2)) => {
                if l != hash {
                    HashState::Run(a.m2(l, p1, p2), b.m2(l, q1, q2))
                } else if (a.is_accepting(p1) && b.is_accepting(q2))
                    || (a.is_accepting(p2) && b.is_accepting(q1))
                {
                    HashState::Accept
                } else {
                    HashState::Dead
                }
            }
            _ => HashState::Dead,
        },
        |s| *s == HashState::Accept,
        usize::MAX,
    )?;
    Ok(ta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{binary_contains, enumerate_binary};

    fn l2() -> LabelSet {
        LabelSet::numeric(2).unwrap()
    }

    fn t(s: &str) -> BinaryTree {
        BinaryTree::parse(s, &l2()).unwrap()
    }

    fn all_trees(max: usize) -> Vec<BinaryTree> {
        enumerate_binary(2, max, 1_000_000).unwrap()
    }

    #[test]
    fn run_basics() {
        // counts leaves mod 2
        let m = TreeAutomaton::from_fn(l2(), 2, |s| s == 1, |_| 1, |_, s, t| (s + t) % 2).unwrap();
        assert_eq!(m.run(&t("(0)")).unwrap(), m.m0(0));
        assert_eq!(m.run(&t("(1 (0) (1))")).unwrap(), m.m2(1, m.m0(0), m.m0(1)));
        assert_eq!(m.run(&t("(0 (0 (1) (1)) (1))")).unwrap(), 1);
        assert!(m.run(&BinaryTree::leaf(5)).is_err());
        assert_eq!(m.run_all(&t("(0 (1) (1))")).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn boolean_ops_exhaustive() {
        let a = sup_tree(&t("(1)"), &l2()).unwrap();
        let b = sup_tree(&t("(0 (0) (0))"), &l2()).unwrap();
        let i = a.intersection(&b).unwrap();
        let u = a.union(&b).unwrap();
        let cc = a.complement().complement();
        for z in all_trees(5) {
            let (x, y) = (a.accepts(&z).unwrap(), b.accepts(&z).unwrap());
            assert_eq!(i.accepts(&z).unwrap(), x && y);
            assert_eq!(u.accepts(&z).unwrap(), x || y);
            assert_eq!(cc.accepts(&z).unwrap(), x);
            assert_eq!(a.trim().accepts(&z).unwrap(), x);
        }
        let other = TreeAutomaton::universal(LabelSet::numeric(3).unwrap());
        assert!(matches!(a.product(&other, BoolOp::And), Err(JepError::LabelMismatch(_))));
    }

    #[test]
    fn emptiness_examples() {
        let has1 = sup_tree(&t("(1)"), &l2()).unwrap();
        let all0 = forb_tree(&[t("(1)")], &l2()).unwrap();
        assert_eq!(has1.intersection(&all0).unwrap().empty_witness(), None);
        assert_eq!(TreeAutomaton::universal(l2()).empty_witness(), Some(t("(0)")));
        let both = sup_tree(&t("(0)"), &l2()).unwrap().intersection(&has1).unwrap();
        let w = both.empty_witness().unwrap();
        assert_eq!(w.size(), 3);
        assert!(both.accepts(&w).unwrap());
    }

    #[test]
    fn smallest_witness_is_smallest() {
        let pats = [t("(0 (1) (1))"), t("(1 (0) (0 (1) (1)))")];
        for p in &pats {
            let s = sup_tree(p, &l2()).unwrap();
            let w = s.empty_witness().unwrap();
            assert!(s.accepts(&w).unwrap());
            assert!(all_trees(w.size() - 1).iter().all(|z| !s.accepts(z).unwrap()));
        }
    }

    #[test]
    fn sup_tree_matches_containment() {
        for p in all_trees(5) {
            let s = sup_tree(&p, &l2()).unwrap();
            assert!(s.accepts(&p).unwrap());
            for z in all_trees(7) {
                assert_eq!(s.accepts(&z).unwrap(), binary_contains(&z, &p), "{p} in {z}");
            }
        }
    }

    #[test]
    fn minimize_keeps_language() {
        let a = sup_tree(&t("(1 (0) (0))"), &l2()).unwrap();
        let b = sup_tree(&t("(0 (1) (1))"), &l2()).unwrap();
        let u = a.union(&b).unwrap();
        let m = u.minimize();
        assert!(m.state_count() <= u.state_count());
        for z in all_trees(7) {
            assert_eq!(m.accepts(&z).unwrap(), u.accepts(&z).unwrap());
        }
        let twice = TreeAutomaton::universal(l2()).intersection(&TreeAutomaton::universal(l2())).unwrap();
        assert_eq!(twice.minimize().state_count(), 1);
        assert_eq!(m.minimize(), m);
    }

    #[test]
    fn forb_examples() {
        let all0 = forb_tree(&[t("(1)")], &l2()).unwrap();
        let all = forb_tree(&[], &l2()).unwrap();
        let none = forb_tree(&[t("(0)"), t("(1)")], &l2()).unwrap();
        for z in all_trees(5) {
            let zero = z.subtrees().iter().all(|s| s.label() == 0);
            assert_eq!(all0.accepts(&z).unwrap(), zero);
            assert!(all.accepts(&z).unwrap());
            assert!(!none.accepts(&z).unwrap());
        }
        assert!(none.is_empty());
    }

    #[test]
    fn hash_pair_examples() {
        let only_leaf0 = sup_tree(&t("(0)"), &l2())
            .unwrap()
            .intersection(&forb_tree(&[t("(0 (0) (0))"), t("(1)")], &l2()).unwrap())
            .unwrap();
        let h = hash_pair_tree(&only_leaf0, &only_leaf0).unwrap();
        let ext = h.labels().clone();
        let p = |s: &str| BinaryTree::parse(s, &ext).unwrap();
        assert!(h.accepts(&p("(# (0) (0))")).unwrap());
        assert!(!h.accepts(&p("(# (0) (1))")).unwrap());
        assert!(!h.accepts(&p("(0 (# (0) (0)) (0))")).unwrap());
        assert!(!h.accepts(&p("(# (# (0) (0)) (0))")).unwrap());

        let a = sup_tree(&t("(1)"), &l2()).unwrap();
        let b = forb_tree(&[t("(1)")], &l2()).unwrap();
        let h = hash_pair_tree(&a, &b).unwrap();
        let hash = 2;
        let small = all_trees(3);
        for x in &small {
            for y in &small {
                let z = BinaryTree::node(hash, x.clone(), y.clone());
                let direct = (a.accepts(x).unwrap() && b.accepts(y).unwrap())
                    || (a.accepts(y).unwrap() && b.accepts(x).unwrap());
                assert_eq!(h.accepts(&z).unwrap(), direct);
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let m = forb_tree(&[t("(1 (0) (0))")], &l2()).unwrap();
        assert_eq!(TreeAutomaton::parse_text(&m.to_text()).unwrap(), m);
        let asym = "labels: 0\nstates: 2\naccept: 1\nm0: 0 -> 0\nm2: 0 (0,0) -> 0\nm2: 0 (0,1) -> 1\nm2: 0 (1,0) -> 0\nm2: 0 (1,1) -> 1\n";
        match TreeAutomaton::parse_text(asym).unwrap_err() {
            JepError::Parse { line, .. } => assert_eq!(line, 7),
            e => panic!("{e}"),
        }
        let partial = "labels: 0\nstates: 2\naccept: 1\nm0: 0 -> 0\nm2: 0 (0,0) -> 0\n";
        assert!(TreeAutomaton::parse_text(partial).is_err());
    }

    #[test]
    fn mirror_invariance() {
        let m = sup_tree(&t("(0 (1) (0 (1) (1)))"), &l2()).unwrap();
        for z in all_trees(7) {
            let mirrored = mirror(&z);
            assert_eq!(m.run(&z).unwrap(), m.run(&mirrored).unwrap());
        }
    }

    fn mirror(t: &BinaryTree) -> BinaryTree {
        match t.children() {
            None => t.clone(),
            Some((a, b)) => BinaryTree::node(t.label(), mirror(b), mirror(a)),
        }
    }
}
