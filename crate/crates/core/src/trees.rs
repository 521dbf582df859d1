//! Labeled rooted trees and topological containment.
//!
//! [`BinaryTree`] is a full binary tree (every node has zero or two children);
//! [`GeneralTree`] allows any arity of at least two at internal nodes. Both
//! store children in canonical (sorted) order, so structural equality is
//! isomorphism of unordered labeled trees.

use std::collections::HashMap;
use std::fmt;

use crate::error::{JepError, Result};
use crate::sexpr::{self, SNode};

/// Default cap on the number of items an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// A finite label set `{0, .., k-1}` with printable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet {
    names: Vec<String>,
}

impl LabelSet {
    /// `k` labels named `0`, `1`, ...
    pub fn numeric(k: usize) -> Result<Self> {
        Self::with_names((0..k).map(|i| i.to_string()).collect())
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(JepError::InvalidArgument("label set must be nonempty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                return Err(JepError::InvalidArgument(format!("invalid label name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(JepError::InvalidArgument(format!("duplicate label name {n:?}")));
            }
        }
        Ok(LabelSet { names })
    }

    /// Whitespace-separated label names.
    pub fn parse(text: &str) -> Result<Self> {
        Self::with_names(text.split_whitespace().map(str::to_owned).collect())
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// This label set with one fresh label appended; returns the fresh index.
    pub fn extended(&self, name: &str) -> Result<(LabelSet, usize)> {
        let mut names = self.names.clone();
        names.push(name.to_owned());
        Ok((LabelSet::with_names(names)?, self.size()))
    }

    fn lookup(&self, node: &SNode) -> Result<usize> {
        self.index_of(&node.label).ok_or_else(|| {
            JepError::parse(node.line, node.column, format!("unknown label {:?}", node.label))
        })
    }
}

/// Full binary rooted tree with labels given as indices into a [`LabelSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTree {
    label: usize,
    kids: Option<Box<(BinaryTree, BinaryTree)>>,
}

impl BinaryTree {
    pub fn leaf(label: usize) -> Self {
        BinaryTree { label, kids: None }
    }

    /// Internal node; the two children are stored in canonical order.
    pub fn node(label: usize, a: BinaryTree, b: BinaryTree) -> Self {
        let kids = if a <= b { (a, b) } else { (b, a) };
        BinaryTree {
            label,
            kids: Some(Box::new(kids)),
        }
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn is_leaf(&self) -> bool {
        self.kids.is_none()
    }

    pub fn children(&self) -> Option<(&BinaryTree, &BinaryTree)> {
        self.kids.as_deref().map(|(a, b)| (a, b))
    }

    pub fn size(&self) -> usize {
        match self.children() {
            None => 1,
            Some((a, b)) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self.children() {
            None => 0,
            Some((a, b)) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn max_label(&self) -> usize {
        match self.children() {
            None => self.label,
            Some((a, b)) => self.label.max(a.max_label()).max(b.max_label()),
        }
    }

    /// Fails with `LabelMismatch` if some label is outside `labels`.
    pub fn check_labels(&self, labels: &LabelSet) -> Result<()> {
        if self.max_label() >= labels.size() {
            return Err(JepError::LabelMismatch(format!(
                "tree uses label index {} but the label set has {} labels",
                self.max_label(),
                labels.size()
            )));
        }
        Ok(())
    }

    pub fn to_sexpr(&self, labels: &LabelSet) -> String {
        let mut s = String::new();
        self.write_sexpr(labels, &mut s);
        s
    }

    fn write_sexpr(&self, labels: &LabelSet, out: &mut String) {
        out.push('(');
        out.push_str(labels.name(self.label));
        if let Some((a, b)) = self.children() {
            out.push(' ');
            a.write_sexpr(labels, out);
            out.push(' ');
            b.write_sexpr(labels, out);
        }
        out.push(')');
    }

    pub fn parse(text: &str, labels: &LabelSet) -> Result<Self> {
        Self::from_snode(&sexpr::parse(text)?, labels)
    }

    fn from_snode(n: &SNode, labels: &LabelSet) -> Result<Self> {
        let label = labels.lookup(n)?;
        match n.children.as_slice() {
            [] => Ok(BinaryTree::leaf(label)),
            [a, b] => Ok(BinaryTree::node(
                label,
                Self::from_snode(a, labels)?,
                Self::from_snode(b, labels)?,
            )),
            other => Err(JepError::parse(
                n.line,
                n.column,
                format!("binary tree node has {} children", other.len()),
            )),
        }
    }

    /// Postorder flattening: children precede parents, root is last.
    pub fn flatten(&self) -> FlatTree {
        let mut f = FlatTree {
            label: Vec::new(),
            kids: Vec::new(),
        };
        self.flatten_into(&mut f);
        f
    }

    fn flatten_into(&self, f: &mut FlatTree) -> usize {
        let kids = self.children().map(|(a, b)| {
            let ia = a.flatten_into(f);
            let ib = b.flatten_into(f);
            (ia, ib)
        });
        f.label.push(self.label);
        f.kids.push(kids);
        f.label.len() - 1
    }

    /// Every subtree in postorder (root last).
    pub fn subtrees(&self) -> Vec<&BinaryTree> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a BinaryTree, out: &mut Vec<&'a BinaryTree>) {
            if let Some((a, b)) = t.children() {
                go(a, out);
                go(b, out);
            }
            out.push(t);
        }
        go(self, &mut out);
        out
    }
}

/// Index-based view of a binary tree in postorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTree {
    pub label: Vec<usize>,
    pub kids: Vec<Option<(usize, usize)>>,
}

impl FlatTree {
    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    pub fn root(&self) -> usize {
        self.label.len() - 1
    }
}

/// `pattern ⪯ host` under topological containment of binary trees: an
/// injective label-preserving map whose edge images are edge-disjoint
/// descending paths. Children of a pattern node must land in the two distinct
/// child branches of the image node.
pub fn binary_contains(host: &BinaryTree, pattern: &BinaryTree) -> bool {
    let h = host.flatten();
    let p = pattern.flatten();
    // below[q][t]: pattern subtree q embeds somewhere in host subtree t.
    let mut below = vec![vec![false; h.len()]; p.len()];
    for q in 0..p.len() {
        for t in 0..h.len() {
            let here = p.label[q] == h.label[t]
                && match (p.kids[q], h.kids[t]) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some((c1, c2)), Some((t1, t2))) => {
                        (below[c1][t1] && below[c2][t2]) || (below[c1][t2] && below[c2][t1])
                    }
                };
            let deeper = h.kids[t].is_some_and(|(t1, t2)| below[q][t1] || below[q][t2]);
            below[q][t] = here || deeper;
        }
    }
    below[p.root()][h.root()]
}

/// All full binary trees over `k` labels with at most `max_nodes` nodes, ordered
/// by size and then canonically.
pub fn enumerate_binary(k: usize, max_nodes: usize, cap: usize) -> Result<Vec<BinaryTree>> {
    if max_nodes == 0 || k == 0 {
        return Err(JepError::InvalidArgument(
            "enumeration needs max_nodes >= 1 and at least one label".into(),
        ));
    }
    // by_size[n] holds all trees with exactly n nodes (n odd).
    let mut by_size: Vec<Vec<BinaryTree>> = vec![Vec::new(); max_nodes + 1];
    let mut total = 0usize;
    by_size[1] = (0..k).map(BinaryTree::leaf).collect();
    total += k;
    if total > cap {
        return Err(JepError::size_limit("binary tree enumeration", cap));
    }
    for n in (3..=max_nodes).step_by(2) {
        let mut here = Vec::new();
        for a in (1..n - 1).step_by(2) {
            let b = n - 1 - a;
            if a > b {
                break;
            }
            for (i, x) in by_size[a].iter().enumerate() {
                let ys = if a == b { &by_size[b][i..] } else { &by_size[b][..] };
                for y in ys {
                    for l in 0..k {
                        total += 1;
                        if total > cap {
                            return Err(JepError::size_limit("binary tree enumeration", cap));
                        }
                        here.push(BinaryTree::node(l, x.clone(), y.clone()));
                    }
                }
            }
        }
        here.sort();
        by_size[n] = here;
    }
    Ok(by_size.into_iter().flatten().collect())
}

/// Rooted labeled tree of unbounded arity; internal nodes have at least two
/// children, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneralTree {
    label: usize,
    children: Vec<GeneralTree>,
}

impl GeneralTree {
    pub fn leaf(label: usize) -> Self {
        GeneralTree {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: usize, mut children: Vec<GeneralTree>) -> Result<Self> {
        if children.len() == 1 {
            return Err(JepError::Arity(format!(
                "internal node with label {label} has exactly one child"
            )));
        }
        children.sort();
        Ok(GeneralTree { label, children })
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn children(&self) -> &[GeneralTree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(GeneralTree::size).sum::<usize>()
    }

    pub fn max_label(&self) -> usize {
        self.children
            .iter()
            .map(GeneralTree::max_label)
            .fold(self.label, usize::max)
    }

    pub fn to_sexpr(&self, labels: &LabelSet) -> String {
        let mut s = format!("({}", labels.name(self.label));
        for c in &self.children {
            s.push(' ');
            s.push_str(&c.to_sexpr(labels));
        }
        s.push(')');
        s
    }

    pub fn parse(text: &str, labels: &LabelSet) -> Result<Self> {
        Self::from_snode(&sexpr::parse(text)?, labels)
    }

    fn from_snode(n: &SNode, labels: &LabelSet) -> Result<Self> {
        let label = labels.lookup(n)?;
        if n.children.len() == 1 {
            return Err(JepError::parse(
                n.line,
                n.column,
                "arity error: internal node has exactly one child",
            ));
        }
        let kids = n
            .children
            .iter()
            .map(|c| Self::from_snode(c, labels))
            .collect::<Result<Vec<_>>>()?;
        GeneralTree::node(label, kids)
    }

    fn flatten(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut labels = Vec::new();
        let mut kids = Vec::new();
        fn go(t: &GeneralTree, labels: &mut Vec<usize>, kids: &mut Vec<Vec<usize>>) -> usize {
            let ks: Vec<usize> = t.children.iter().map(|c| go(c, labels, kids)).collect();
            labels.push(t.label);
            kids.push(ks);
            labels.len() - 1
        }
        go(self, &mut labels, &mut kids);
        (labels, kids)
    }
}

/// Bipartite matching: can every left vertex be matched to a distinct right
/// vertex along `ok(left, right)` edges?
pub(crate) fn perfect_left_matching(
    left: usize,
    right: usize,
    ok: impl Fn(usize, usize) -> bool,
) -> bool {
    if left > right {
        return false;
    }
    let adj: Vec<Vec<usize>> = (0..left)
        .map(|i| (0..right).filter(|&j| ok(i, j)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; right];
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].unwrap(), adj, owner, seen) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..left).all(|i| {
        let mut seen = vec![false; right];
        augment(i, &adj, &mut owner, &mut seen)
    })
}

/// `pattern ⪯ host` for general trees: children of a pattern node map into
/// pairwise distinct child branches of the image node.
pub fn general_contains(host: &GeneralTree, pattern: &GeneralTree) -> bool {
    let (hl, hk) = host.flatten();
    let (pl, pk) = pattern.flatten();
    let mut below = vec![vec![false; hl.len()]; pl.len()];
    for q in 0..pl.len() {
        for t in 0..hl.len() {
            let here = pl[q] == hl[t]
                && (pk[q].is_empty()
                    || perfect_left_matching(pk[q].len(), hk[t].len(), |i, j| {
                        below[pk[q][i]][hk[t][j]]
                    }));
            let deeper = hk[t].iter().any(|&c| below[q][c]);
            below[q][t] = here || deeper;
        }
    }
    below[pl.len() - 1][hl.len() - 1]
}

/// Binary encoding of a general tree. A node with children `v1..vx` becomes a
/// chain `u1..u(x-1)`: `u1` keeps the label, the rest carry `up`; `ui` has
/// children `u(i+1)` and `vi`, and the last chain node has `v(x-1)` and `vx`.
pub fn encode_general(t: &GeneralTree, up: usize) -> BinaryTree {
    let kids = t.children();
    if kids.is_empty() {
        return BinaryTree::leaf(t.label);
    }
    let x = kids.len();
    let enc: Vec<BinaryTree> = kids.iter().map(|c| encode_general(c, up)).collect();
    let chain_label = |i: usize| if i == 1 { t.label } else { up };
    let mut cur = BinaryTree::node(chain_label(x - 1), enc[x - 2].clone(), enc[x - 1].clone());
    for i in (1..x - 1).rev() {
        cur = BinaryTree::node(chain_label(i), enc[i - 1].clone(), cur);
    }
    cur
}

/// Inverse of [`encode_general`].
pub fn decode_general(t: &BinaryTree, up: usize) -> Result<GeneralTree> {
    if t.label() == up {
        return Err(invalid(t, "encoding root is labeled up"));
    }
    decode_head(t, up)
}

fn invalid(t: &BinaryTree, reason: &str) -> JepError {
    JepError::InvalidEncoding {
        node: format!("{t:?}"),
        reason: reason.into(),
    }
}

fn decode_head(t: &BinaryTree, up: usize) -> Result<GeneralTree> {
    let Some(_) = t.children() else {
        return Ok(GeneralTree::leaf(t.label()));
    };
    let mut children = Vec::new();
    let mut cur = t;
    loop {
        let (a, b) = cur.children().ok_or_else(|| invalid(cur, "up label on a leaf"))?;
        match (a.label() == up, b.label() == up) {
            (true, true) => return Err(invalid(cur, "two up-labeled children")),
            (false, false) => {
                children.push(decode_head(a, up)?);
                children.push(decode_head(b, up)?);
                break;
            }
            (true, false) => {
                children.push(decode_head(b, up)?);
                cur = a;
            }
            (false, true) => {
                children.push(decode_head(a, up)?);
                cur = b;
            }
        }
    }
    GeneralTree::node(t.label(), children)
}

/// All general trees (internal arity >= 2) over `k` labels with at most
/// `max_nodes` nodes.
pub fn enumerate_general(k: usize, max_nodes: usize, cap: usize) -> Result<Vec<GeneralTree>> {
    if max_nodes == 0 || k == 0 {
        return Err(JepError::InvalidArgument(
            "enumeration needs max_nodes >= 1 and at least one label".into(),
        ));
    }
    let mut by_size: Vec<Vec<GeneralTree>> = vec![Vec::new(); max_nodes + 1];
    by_size[1] = (0..k).map(GeneralTree::leaf).collect();
    let mut total = k;
    for n in 3..=max_nodes {
        // multisets of >= 2 subtrees with total size n - 1, as non-decreasing
        // sequences over the list of all smaller trees
        let pool: Vec<(usize, &GeneralTree)> = (1..n - 1)
            .flat_map(|s| by_size[s].iter().map(move |t| (s, t)))
            .collect();
        let mut forests: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<(Vec<usize>, usize, usize)> = vec![(Vec::new(), 0, 0)];
        while let Some((seq, start, used)) = stack.pop() {
            if used == n - 1 {
                if seq.len() >= 2 {
                    forests.push(seq);
                }
                continue;
            }
            for (i, &(s, _)) in pool.iter().enumerate().skip(start) {
                if used + s < n {
                    let mut next = seq.clone();
                    next.push(i);
                    stack.push((next, i, used + s));
                }
            }
        }
        let mut here = Vec::new();
        for f in forests {
            for l in 0..k {
                total += 1;
                if total > cap {
                    return Err(JepError::size_limit("general tree enumeration", cap));
                }
                let kids = f.iter().map(|&i| pool[i].1.clone()).collect();
                here.push(GeneralTree::node(l, kids)?);
            }
        }
        here.sort();
        here.dedup();
        by_size[n] = here;
    }
    Ok(by_size.into_iter().flatten().collect())
}

/// Memoized containment checks keyed by tree pairs; convenient for oracles
/// that test the same patterns repeatedly.
#[derive(Debug, Default)]
pub struct ContainmentCache {
    memo: HashMap<(BinaryTree, BinaryTree), bool>,
}

impl ContainmentCache {
    pub fn contains(&mut self, host: &BinaryTree, pattern: &BinaryTree) -> bool {
        if let Some(&v) = self.memo.get(&(host.clone(), pattern.clone())) {
            return v;
        }
        let v = binary_contains(host, pattern);
        self.memo.insert((host.clone(), pattern.clone()), v);
        v
    }
}

impl fmt::Display for BinaryTree {
    /// Numeric labels; use [`BinaryTree::to_sexpr`] for named labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children() {
            None => write!(f, "({})", self.label),
            Some((a, b)) => write!(f, "({} {a} {b})", self.label),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &str) -> LabelSet {
        LabelSet::parse(names).unwrap()
    }

    fn bt(s: &str, l: &LabelSet) -> BinaryTree {
        BinaryTree::parse(s, l).unwrap()
    }

    fn gt(s: &str, l: &LabelSet) -> GeneralTree {
        GeneralTree::parse(s, l).unwrap()
    }

    #[test]
    fn label_set_validation() {
        assert!(LabelSet::parse("").is_err());
        assert!(LabelSet::parse("a a").is_err());
        assert_eq!(LabelSet::numeric(3).unwrap().name(2), "2");
    }

    #[test]
    fn children_are_canonical() {
        let l = labels("a b c");
        assert_eq!(bt("(a (c) (b))", &l), bt("(a (b) (c))", &l));
        assert_eq!(bt("(a (c) (b))", &l).to_sexpr(&l), "(a (b) (c))");
    }

    #[test]
    fn binary_parse_rejects_arity() {
        let l = labels("a b");
        match BinaryTree::parse("(a\n  (b))", &l).unwrap_err() {
            JepError::Parse { line, column, .. } => assert_eq!((line, column), (1, 1)),
            e => panic!("{e}"),
        }
        assert!(BinaryTree::parse("(a (b) (b) (b))", &l).is_err());
        assert!(BinaryTree::parse("(z)", &l).is_err());
    }

    #[test]
    fn containment_examples() {
        let l = labels("a b c d");
        let t = bt("(a (b (c) (d)) (c))", &l);
        assert!(binary_contains(&t, &t));
        assert!(binary_contains(&bt("(b (a) (b))", &l), &bt("(a)", &l)));
        assert!(!binary_contains(&bt("(a (b) (c))", &l), &bt("(a (b) (b))", &l)));
        // children must use distinct branches of the image node
        assert!(!binary_contains(
            &bt("(a (c (b) (b)) (d))", &l),
            &bt("(a (b) (b))", &l)
        ));
        assert!(binary_contains(
            &bt("(c (a (b) (b)) (d))", &l),
            &bt("(a (b) (b))", &l)
        ));
        assert!(binary_contains(
            &bt("(a (c (b) (d)) (d (b) (a)))", &l),
            &bt("(a (b) (b))", &l)
        ));
    }

    #[test]
    fn general_containment_examples() {
        let l = labels("u j x y z");
        let h = gt("(u (x) (y) (z))", &l);
        assert!(general_contains(&h, &h));
        assert!(general_contains(&h, &gt("(u (x) (y))", &l)));
        assert!(!general_contains(&gt("(u (x) (y))", &l), &h));
        // the u node has only one branch holding both leaves
        let path = gt("(u (j (x) (y)) (z))", &l);
        assert!(!general_contains(&path, &gt("(u (x) (y))", &l)));
        assert!(general_contains(&path, &gt("(u (x) (z))", &l)));
    }

    #[test]
    fn general_arity_one_rejected() {
        let l = labels("a b");
        assert!(GeneralTree::parse("(a (b))", &l).is_err());
        assert!(GeneralTree::node(0, vec![GeneralTree::leaf(1)]).is_err());
    }

    #[test]
    fn encode_examples() {
        let l = labels("r a b c up");
        let up = 4;
        assert_eq!(encode_general(&gt("(a)", &l), up), bt("(a)", &l));
        assert_eq!(
            encode_general(&gt("(r (a) (b))", &l), up),
            bt("(r (a) (b))", &l)
        );
        // children in stored order a, b, c: u1 = r(a, u2), u2 = up(b, c)
        let three = gt("(r (a) (b) (c))", &l);
        let enc = encode_general(&three, up);
        assert_eq!(enc, bt("(r (a) (up (b) (c)))", &l));
        assert_eq!(decode_general(&enc, up).unwrap(), three);
        let four = gt("(r (a) (b) (c) (a))", &l);
        let enc4 = encode_general(&four, up);
        assert_eq!(enc4.size(), 7);
        assert_eq!(decode_general(&enc4, up).unwrap(), four);
    }

    #[test]
    fn decode_rejects_invalid() {
        let l = labels("a up");
        assert!(decode_general(&bt("(up (a) (a))", &l), 1).is_err());
        assert!(decode_general(&bt("(a (up) (a))", &l), 1).is_err());
        assert!(decode_general(&bt("(a (up (a) (a)) (up (a) (a)))", &l), 1).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_binary(1, 1, 100).unwrap().len(), 1);
        assert_eq!(enumerate_binary(2, 1, 100).unwrap().len(), 2);
        // children are unordered: 2 leaves + 2 root labels * 3 leaf multisets
        let ts = enumerate_binary(2, 3, 100).unwrap();
        assert_eq!(ts.len(), 2 + 2 * 3);
        assert!(enumerate_binary(2, 9, 10).is_err());
        assert!(enumerate_binary(2, 0, 10).is_err());
        let mut sorted = ts.clone();
        sorted.sort_by_key(|t| (t.size(), t.clone()));
        assert_eq!(ts, sorted);
    }

    #[test]
    fn general_enumeration_is_duplicate_free() {
        let ts = enumerate_general(2, 5, 10_000).unwrap();
        let mut d = ts.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), ts.len());
        // sizes 1: 2; 3: 2*3; 4: 2*4 (3 leaves multiset: 4 options); 5: ...
        assert_eq!(ts.iter().filter(|t| t.size() == 3).count(), 6);
        assert_eq!(ts.iter().filter(|t| t.size() == 4).count(), 8);
    }
}
