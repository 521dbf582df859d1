//! Brute-force references and randomized cross-validation of the pipelines.
//!
//! The references here avoid the walk machinery. Pair questions on strings
//! and trees are answered by emptiness of `L ∩ Sup(x) ∩ Sup(y)`, induced
//! subgraphs by trying injections, and joint cograph pairs by searching the
//! cographs on at most `|x| + |y|` vertices.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSet;
use crate::cographs::{
    cotree_of, decide_jep_cographs, decode_cograph, encode_cograph, encoding_labels, graph_of, induced_via_cotrees,
    sup_cograph_encoded, sup_general_encoded, Cograph, Cotree,
};
use crate::dfa::{format_word, sup_string, words_up_to, Dfa, Word};
use crate::error::{JepError, Result};
use crate::string_jep::{decide_jep_string, NRule, StringPipeline, Walk};
use crate::tree_automata::{sup_tree, TreeAutomaton};
use crate::tree_jep::{decide_jep_tree, ProfileRule, TreePipeline};
use crate::trees::{decode_general, enumerate_binary, enumerate_general, general_contains, BinaryTree, LabelSet};
use crate::verdict::{Limits, PairMode, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    StringClaim1,
    TreeClaim1,
    WalkDef,
    Cotree,
    EncodedSup,
    JepVerdicts,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::StringClaim1,
        Suite::TreeClaim1,
        Suite::WalkDef,
        Suite::Cotree,
        Suite::EncodedSup,
        Suite::JepVerdicts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StringClaim1 => "string-claim1",
            Suite::TreeClaim1 => "tree-claim1",
            Suite::WalkDef => "walkdef",
            Suite::Cotree => "cotree",
            Suite::EncodedSup => "encoded-sup",
            Suite::JepVerdicts => "jep-verdicts",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = JepError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| JepError::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

/// Deliberate pipeline faults, used to check that the harness notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// The string walk automaton with its literal transition rule.
    LiteralNStep,
    /// Tree profiles that only place leaf patterns at leaves.
    LeafOnlyProfile,
}

/// Sizes and counts of a validation run. Equal configs give equal runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    /// Largest random automaton, before trimming.
    pub max_states: usize,
    /// Alphabet size, or number of tree labels.
    pub labels: usize,
    /// Longest string in string pair checks.
    pub max_len: usize,
    /// Largest random tree, or largest encoding in `encoded-sup`.
    pub max_nodes: usize,
    /// Largest pattern tree in `encoded-sup`.
    pub pattern_nodes: usize,
    /// Tree pairs or trees checked per automaton.
    pub per_trial: usize,
    /// Largest random cograph in round trips.
    pub max_vertices: usize,
    pub pattern_vertices: usize,
    pub host_vertices: usize,
    /// Member bounds of the bad-pair scans: string length, and tree nodes or
    /// graph vertices.
    pub scan_len: usize,
    pub scan_size: usize,
    pub limits: Limits,
    /// Run trials on the rayon pool (needs the `parallel` feature).
    pub parallel: bool,
    pub mutation: Option<Mutation>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 0,
            trials: 100,
            max_states: 3,
            labels: 2,
            max_len: 4,
            max_nodes: 7,
            pattern_nodes: 4,
            per_trial: 200,
            max_vertices: 10,
            pattern_vertices: 7,
            host_vertices: 9,
            scan_len: 6,
            scan_size: 5,
            limits: Limits::default(),
            parallel: true,
            mutation: None,
        }
    }
}

impl TrialConfig {
    /// The configuration each suite runs with by default.
    pub fn for_suite(suite: Suite) -> Self {
        let base = TrialConfig::default();
        match suite {
            Suite::StringClaim1 => TrialConfig {
                trials: 200,
                max_states: 4,
                ..base
            },
            Suite::TreeClaim1 => TrialConfig { trials: 50, ..base },
            Suite::WalkDef => TrialConfig {
                trials: 20,
                per_trial: 1000,
                max_nodes: 11,
                ..base
            },
            Suite::Cotree => TrialConfig { trials: 1000, ..base },
            Suite::EncodedSup => TrialConfig {
                trials: 1000,
                max_nodes: 9,
                ..base
            },
            Suite::JepVerdicts => base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub trial: usize,
    pub detail: String,
    /// A shrunk input reproducing the disagreement.
    pub repro: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    /// Trials that hit a resource cap, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite: {}", self.suite)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "trials: {}", self.trials)?;
        writeln!(f, "checks: {}", self.checks)?;
        writeln!(f, "skipped: {}", self.skipped.len())?;
        writeln!(f, "discrepancies: {}", self.discrepancies.len())?;
        for (t, why) in &self.skipped {
            writeln!(f, "skip: trial {t}: {why}")?;
        }
        for d in &self.discrepancies {
            writeln!(f, "discrepancy: trial {}: {}", d.trial, d.detail)?;
            for line in d.repro.lines() {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Outcome {
    checks: usize,
    skipped: Option<String>,
    found: Vec<(String, String)>,
}

impl Outcome {
    fn skip(e: JepError) -> Outcome {
        Outcome {
            skipped: Some(e.to_string()),
            ..Outcome::default()
        }
    }

    fn fail(&mut self, detail: String, repro: String) {
        self.found.push((detail, repro));
    }
}

fn run_trials(cfg: &TrialConfig, f: impl Fn(usize) -> Outcome + Sync + Send) -> Vec<Outcome> {
    #[cfg(feature = "parallel")]
    if cfg.parallel {
        use rayon::prelude::*;
        return (0..cfg.trials).into_par_iter().map(&f).collect();
    }
    (0..cfg.trials).map(f).collect()
}

/// The random stream of trial `i`; streams of distinct trials are independent.
pub fn trial_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64);
    r
}

/// Alphabet `a, b, c, ...` of size `k`.
pub fn letters(k: usize) -> LabelSet {
    LabelSet::with_names((0..k as u8).map(|i| char::from(b'a' + i).to_string()).collect()).expect("distinct letters")
}

/// A uniformly random total DFA on `1..=max_states` states, trimmed.
pub fn random_dfa(cfg: &TrialConfig, rng: &mut impl Rng) -> Dfa {
    let n = rng.gen_range(1..=cfg.max_states.max(1));
    let k = cfg.labels;
    let accepting = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let delta = (0..n * k).map(|_| rng.gen_range(0..n)).collect();
    Dfa::new(letters(k), 0, accepting, delta).expect("valid table").trim()
}

/// A uniformly random tree automaton on `1..=max_states` states, trimmed.
pub fn random_ta(cfg: &TrialConfig, rng: &mut impl Rng) -> TreeAutomaton {
    let n = rng.gen_range(1..=cfg.max_states.max(1));
    let k = cfg.labels;
    let accepting = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let m0 = (0..k).map(|_| rng.gen_range(0..n)).collect();
    let m2 = (0..k * n * (n + 1) / 2).map(|_| rng.gen_range(0..n)).collect();
    let labels = LabelSet::numeric(k).expect("label count");
    TreeAutomaton::new(labels, accepting, m0, m2).expect("valid table").trim()
}

/// A random binary tree with at most `max_nodes` nodes.
pub fn random_tree(rng: &mut impl Rng, k: usize, max_nodes: usize) -> BinaryTree {
    fn grow(rng: &mut impl Rng, k: usize, internal: usize) -> BinaryTree {
        let l = rng.gen_range(0..k);
        if internal == 0 {
            return BinaryTree::leaf(l);
        }
        let left = rng.gen_range(0..internal);
        let a = grow(rng, k, left);
        let b = grow(rng, k, internal - 1 - left);
        BinaryTree::node(l, a, b)
    }
    let internal = rng.gen_range(0..=max_nodes.max(1).saturating_sub(1) / 2);
    grow(rng, k, internal)
}

/// A random cograph on `1..=max_vertices` vertices with shuffled ids.
pub fn random_cograph(rng: &mut impl Rng, max_vertices: usize) -> Cograph {
    fn grow(rng: &mut impl Rng, n: usize) -> Cograph {
        if n == 1 {
            return Cograph::new(1);
        }
        let a = rng.gen_range(1..n);
        let (g, h) = (grow(rng, a), grow(rng, n - a));
        if rng.gen_bool(0.5) {
            g.join(&h)
        } else {
            g.disjoint_union(&h)
        }
    }
    let n = rng.gen_range(1..=max_vertices.max(1));
    let g = grow(rng, n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    g.induced(&perm)
}

/// Is `small` an induced subgraph of `big`? Tries every injection.
pub fn brute_induced(small: &Cograph, big: &Cograph) -> bool {
    fn go(i: usize, map: &mut Vec<usize>, used: &mut [bool], s: &Cograph, b: &Cograph) -> bool {
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
    small.vertex_count() <= big.vertex_count() && go(0, &mut Vec::new(), &mut vec![false; big.vertex_count()], small, big)
}

pub fn isomorphic(a: &Cograph, b: &Cograph) -> bool {
    a.vertex_count() == b.vertex_count() && a.edge_count() == b.edge_count() && brute_induced(a, b)
}

/// Is there `z ∈ L(m)` with `x` and `y` as subsequences?
pub fn joint_string_ref(m: &Dfa, x: &[usize], y: &[usize]) -> Result<bool> {
    let p = m.intersection(&sup_string(x, m.alphabet())?)?;
    Ok(!p.intersection(&sup_string(y, m.alphabet())?)?.is_empty())
}

/// Is there `z ∈ L(m)` containing `x` and `y`?
pub fn joint_tree_ref(m: &TreeAutomaton, x: &BinaryTree, y: &BinaryTree) -> Result<bool> {
    let p = m.intersection(&sup_tree(x, m.labels())?)?;
    Ok(!p.intersection(&sup_tree(y, m.labels())?)?.is_empty())
}

/// `above(x)` is `L ∩ Sup(x)`, or `None` when empty; `meets(a, y)` tells
/// whether `a ∩ Sup(y)` is nonempty.
fn scan_pairs<T: Clone, A>(
    members: Vec<T>,
    cap: usize,
    above: impl Fn(&T) -> Result<Option<A>>,
    meets: impl Fn(&A, &T) -> Result<bool>,
) -> Result<Vec<(T, T)>> {
    if members.len() > cap {
        return Err(JepError::size_limit("scanned members", cap));
    }
    let mut out = Vec::new();
    for (i, x) in members.iter().enumerate() {
        let Some(a) = above(x)? else {
            // nothing in L lies above x
            out.extend(members[i..].iter().map(|y| (x.clone(), y.clone())));
            continue;
        };
        for y in &members[i..] {
            if !meets(&a, y)? {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}

/// Pairs of strings up to `max_len` with no common superstring in `L(m)`:
/// members of `L` in `Bad` mode, all strings in `Semibad` mode. Each pair is
/// decided exactly by product emptiness.
pub fn scan_bad_pairs_string(m: &Dfa, max_len: usize, mode: PairMode, cap: usize) -> Result<Vec<(Word, Word)>> {
    let mut members = Vec::new();
    for w in words_up_to(m.alphabet().size(), max_len) {
        if mode == PairMode::Semibad || m.accepts(&w)? {
            members.push(w);
        }
    }
    scan_pairs(
        members,
        cap,
        |x| {
            let mx = m.intersection(&sup_string(x, m.alphabet())?)?;
            Ok((!mx.is_empty()).then_some(mx))
        },
        |mx, y| Ok(!mx.intersection(&sup_string(y, m.alphabet())?)?.is_empty()),
    )
}

/// The tree counterpart of [`scan_bad_pairs_string`], over trees with at
/// most `max_nodes` nodes.
pub fn scan_bad_pairs_tree(
    m: &TreeAutomaton,
    max_nodes: usize,
    mode: PairMode,
    cap: usize,
) -> Result<Vec<(BinaryTree, BinaryTree)>> {
    let mut members = Vec::new();
    for t in enumerate_binary(m.labels().size(), max_nodes, cap)? {
        if mode == PairMode::Semibad || m.accepts(&t)? {
            members.push(t);
        }
    }
    scan_pairs(
        members,
        cap,
        |x| {
            let mx = m.intersection(&sup_tree(x, m.labels())?)?;
            Ok((!mx.is_empty()).then_some(mx))
        },
        |mx, y| Ok(!mx.intersection(&sup_tree(y, m.labels())?)?.is_empty()),
    )
}

/// All cographs on up to `max_size` vertices, one per isomorphism class,
/// with the classes of their induced subgraphs on up to `small` vertices.
///
/// Classes are canonical cotree shapes; a node's type is folded from its
/// children's: an induced subgraph of `G1 ∘ G2` is an induced subgraph of one
/// side or `H1 ∘ H2` for induced `H1`, `H2`.
pub struct CographUniverse {
    small: usize,
    nodes: Vec<UniverseNode>,
}

struct UniverseNode {
    size: usize,
    graph: Cograph,
    ty: BitSet,
}

const U_LEAF: u8 = 0;
const U_JOIN: u8 = 1;
const U_UNION: u8 = 2;

impl CographUniverse {
    pub fn new(small: usize, max_size: usize) -> CographUniverse {
        CographUniverse::free_of(small, max_size, &[])
    }

    /// Only the cographs with no induced subgraph in `forbidden`. The class is
    /// hereditary, so every node is built from smaller members.
    pub fn free_of(small: usize, max_size: usize, forbidden: &[Cograph]) -> CographUniverse {
        let forbidden: Vec<&Cograph> = forbidden.iter().filter(|h| cotree_of(h).is_ok()).collect();
        let max_size = max_size.max(small);
        let mut op: Vec<u8> = Vec::new();
        let mut kids: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<(u8, Vec<usize>), usize> = HashMap::new();
        let mut nodes = Vec::new();
        if forbidden.iter().all(|h| h.vertex_count() > 1) {
            op.push(U_LEAF);
            kids.push(Vec::new());
            nodes.push(UniverseNode {
                size: 1,
                graph: Cograph::new(1),
                ty: BitSet::singleton(0),
            });
        }
        // merge[(o, a, b)] is the class of a ∘ b, for total size <= small
        let mut merge: HashMap<(u8, usize, usize), usize> = HashMap::new();
        for n in 2..=max_size {
            for o in [U_JOIN, U_UNION] {
                let cands: Vec<usize> = (0..nodes.len()).filter(|&i| op[i] != o && nodes[i].size < n).collect();
                let mut sets = Vec::new();
                multisets(&cands, &nodes, n, 0, &mut Vec::new(), &mut sets);
                for ks in sets {
                    let graph = ks[1..].iter().fold(nodes[ks[0]].graph.clone(), |g, &c| {
                        if o == U_JOIN {
                            g.join(&nodes[c].graph)
                        } else {
                            g.disjoint_union(&nodes[c].graph)
                        }
                    });
                    if forbidden.iter().any(|h| brute_induced(h, &graph)) {
                        continue;
                    }
                    let id = nodes.len();
                    op.push(o);
                    kids.push(ks.clone());
                    index.insert((o, ks.clone()), id);
                    if n <= small {
                        for mask in 1..(1u32 << ks.len()) - 1 {
                            let part = |inside: bool| -> Option<usize> {
                                let sub: Vec<usize> =
                                    (0..ks.len()).filter(|&i| (mask >> i & 1 == 1) == inside).map(|i| ks[i]).collect();
                                if sub.len() == 1 {
                                    Some(sub[0])
                                } else {
                                    index.get(&(o, sub)).copied()
                                }
                            };
                            if let (Some(a), Some(b)) = (part(true), part(false)) {
                                merge.insert((o, a.min(b), a.max(b)), id);
                            }
                        }
                    }
                    let mut ty = nodes[ks[0]].ty.clone();
                    for &c in &ks[1..] {
                        let b = &nodes[c].ty;
                        let mut next = ty.clone();
                        next.union_with(b);
                        for x in ty.iter() {
                            for y in b.iter() {
                                if nodes[x].size + nodes[y].size <= small {
                                    next.insert(merge[&(o, x.min(y), x.max(y))]);
                                }
                            }
                        }
                        ty = next;
                    }
                    if n <= small {
                        ty.insert(id);
                    }
                    nodes.push(UniverseNode { size: n, graph, ty });
                }
            }
        }
        CographUniverse { small, nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn graphs(&self) -> impl Iterator<Item = &Cograph> {
        self.nodes.iter().map(|u| &u.graph)
    }

    /// Class of `g` among the small cographs; `None` for non-cographs, larger
    /// graphs, and graphs outside the class.
    pub fn class_of(&self, g: &Cograph) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.nodes[i].size <= self.small && isomorphic(&self.nodes[i].graph, g))
    }
}

fn multisets(
    cands: &[usize],
    nodes: &[UniverseNode],
    remaining: usize,
    from: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        return;
    }
    for (ci, &c) in cands.iter().enumerate().skip(from) {
        if nodes[c].size <= remaining {
            cur.push(c);
            multisets(cands, nodes, remaining - nodes[c].size, ci, cur, out);
            cur.pop();
        }
    }
}

/// Cographs free of `forbidden` that contain both `x` and `y`, decided by
/// searching every cograph on at most `|x| + |y|` vertices: a common
/// extension restricted to the images of `x` and `y` is still one.
pub struct CographPairOracle {
    universe: CographUniverse,
}

impl CographPairOracle {
    pub fn new(forbidden: &[Cograph], max_member: usize) -> CographPairOracle {
        CographPairOracle {
            universe: CographUniverse::free_of(max_member, 2 * max_member, forbidden),
        }
    }

    /// The forbidden-free cographs on at most `max_member` vertices.
    pub fn members(&self) -> Vec<Cograph> {
        self.universe
            .nodes
            .iter()
            .filter(|u| u.size <= self.universe.small)
            .map(|u| u.graph.clone())
            .collect()
    }

    pub fn joint(&self, x: &Cograph, y: &Cograph) -> Result<bool> {
        let (Some(a), Some(b)) = (self.universe.class_of(x), self.universe.class_of(y)) else {
            if x.vertex_count().max(y.vertex_count()) > self.universe.small {
                return Err(JepError::size_limit("cograph pair oracle members", self.universe.small));
            }
            return Ok(false);
        };
        Ok(self.universe.nodes.iter().any(|u| u.ty.contains(a) && u.ty.contains(b)))
    }
}

/// Pairs of forbidden-free cographs on up to `max_vertices` vertices without
/// a forbidden-free common extension.
pub fn scan_bad_pairs_cograph(forbidden: &[Cograph], max_vertices: usize) -> Result<Vec<(Cograph, Cograph)>> {
    let o = CographPairOracle::new(forbidden, max_vertices);
    let members = o.members();
    let mut out = Vec::new();
    for (i, x) in members.iter().enumerate() {
        for y in &members[i..] {
            if !o.joint(x, y)? {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}

/// Shrinks a failing pair by one-step reductions while `still` holds.
fn shrink_pair<T: Clone>(
    mut x: T,
    mut y: T,
    smaller: impl Fn(&T) -> Vec<T>,
    still: impl Fn(&T, &T) -> bool,
) -> (T, T) {
    'outer: loop {
        for c in smaller(&x) {
            if still(&c, &y) {
                x = c;
                continue 'outer;
            }
        }
        for c in smaller(&y) {
            if still(&x, &c) {
                y = c;
                continue 'outer;
            }
        }
        return (x, y);
    }
}

fn word_deletions(w: &Word) -> Vec<Word> {
    (0..w.len())
        .map(|i| {
            let mut v = w.clone();
            v.remove(i);
            v
        })
        .collect()
}

/// Trees obtained by replacing one subtree by one of its children.
fn tree_deletions(t: &BinaryTree) -> Vec<BinaryTree> {
    let Some((a, b)) = t.children() else { return Vec::new() };
    let mut out = vec![a.clone(), b.clone()];
    out.extend(tree_deletions(a).into_iter().map(|a2| BinaryTree::node(t.label(), a2, b.clone())));
    out.extend(tree_deletions(b).into_iter().map(|b2| BinaryTree::node(t.label(), a.clone(), b2)));
    out
}

fn string_pipeline(m: &Dfa, cfg: &TrialConfig) -> Result<StringPipeline> {
    let p = StringPipeline::new(m, cfg.limits.max_walks)?;
    Ok(match cfg.mutation {
        Some(Mutation::LiteralNStep) => p.with_rule(NRule::Literal),
        _ => p,
    })
}

fn tree_pipeline(m: &TreeAutomaton, cfg: &TrialConfig) -> Result<TreePipeline> {
    let p = TreePipeline::new(m, &cfg.limits)?;
    Ok(match cfg.mutation {
        Some(Mutation::LeafOnlyProfile) => p.with_rule(ProfileRule::LeafOnly),
        _ => p,
    })
}

fn string_claim1(cfg: &TrialConfig, i: usize) -> Outcome {
    let m = random_dfa(cfg, &mut trial_rng(cfg.seed, i));
    let p = match string_pipeline(&m, cfg) {
        Ok(p) => p,
        Err(e) => return Outcome::skip(e),
    };
    let differs = |x: &Word, y: &Word| -> Result<bool> { Ok(p.joint(x, y)? != joint_string_ref(&m, x, y)?) };
    let words = words_up_to(m.alphabet().size(), cfg.max_len);
    let mut out = Outcome::default();
    for (a, x) in words.iter().enumerate() {
        for y in &words[a..] {
            out.checks += 1;
            match differs(x, y) {
                Ok(false) => {}
                Ok(true) => {
                    let (x, y) = shrink_pair(x.clone(), y.clone(), word_deletions, |x, y| differs(x, y).unwrap_or(false));
                    let route_a = p.joint(&x, &y).unwrap_or(false);
                    out.fail(
                        format!(
                            "walk sets say joint={route_a}, product says joint={} for ({}, {})",
                            !route_a,
                            format_word(m.alphabet(), &x),
                            format_word(m.alphabet(), &y)
                        ),
                        m.to_text(),
                    );
                    return out;
                }
                Err(e) => {
                    out.fail(format!("error on ({x:?}, {y:?}): {e}"), m.to_text());
                    return out;
                }
            }
        }
    }
    if let Err(e) = string_wsets(&p, &words, &mut out) {
        out.fail(format!("error in walk-set search: {e}"), m.to_text());
    }
    out
}

/// `{ W_z : x ⪯ z ∈ L }` by search over (state, matched prefix of `x`, walk
/// of the input read so far).
fn walks_above(m: &Dfa, p: &StringPipeline, x: &[usize]) -> BitSet {
    let k = m.alphabet().size();
    let comp = &p.dag().cond.component;
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(m.start(), 0usize, Vec::<usize>::new())];
    let mut found = BitSet::new();
    while let Some((q, j, w)) = stack.pop() {
        if !seen.insert((q, j, w.clone())) {
            continue;
        }
        if j == x.len() && m.is_accepting(q) {
            found.insert(p.walk_index(&Walk(w.clone())).expect("walk of a member is enumerated"));
        }
        for a in 0..k {
            let c = comp[q * k + a];
            let mut v = w.clone();
            if v.last() != Some(&c) {
                v.push(c);
            }
            let j2 = if j < x.len() && x[j] == a { j + 1 } else { j };
            stack.push((m.step(q, a), j2, v));
        }
    }
    found
}

/// `wset(x)` against an exact search for the walks of members above `x`.
fn string_wsets(p: &StringPipeline, words: &[Word], out: &mut Outcome) -> Result<()> {
    let m = p.dfa();
    let scan = |x: &Word| walks_above(m, p, x);
    let differs = |x: &Word| p.wset(x).map_or(true, |n| n != scan(x));
    for x in words {
        out.checks += 1;
        if differs(x) {
            let (x, _) = shrink_pair(x.clone(), x.clone(), word_deletions, |x, _| differs(x));
            out.fail(
                format!(
                    "wset({}) = {:?} via N, {:?} by search",
                    format_word(m.alphabet(), &x),
                    p.walk_set_display(&p.wset(&x)?),
                    p.walk_set_display(&scan(&x))
                ),
                m.to_text(),
            );
            break;
        }
    }
    Ok(())
}

fn tree_claim1(cfg: &TrialConfig, i: usize) -> Outcome {
    let mut rng = trial_rng(cfg.seed, i);
    let m = random_ta(cfg, &mut rng);
    let k = cfg.labels;
    let p = match tree_pipeline(&m, cfg) {
        Ok(p) => p,
        Err(e) => return Outcome::skip(e),
    };
    let members: Vec<BinaryTree> = match enumerate_binary(k, cfg.max_nodes, cfg.limits.max_states) {
        Ok(ts) => ts.into_iter().filter(|t| m.accepts(t).unwrap_or(false)).collect(),
        Err(e) => return Outcome::skip(e),
    };
    // half the trees from L, so that joint pairs are common
    let draw = |rng: &mut ChaCha8Rng| match members.choose(rng) {
        Some(t) if rng.gen_bool(0.5) => t.clone(),
        _ => random_tree(rng, k, cfg.max_nodes),
    };
    let differs = |x: &BinaryTree, y: &BinaryTree| -> Result<bool> { Ok(p.joint(x, y)? != joint_tree_ref(&m, x, y)?) };
    let mut out = Outcome::default();
    for _ in 0..cfg.per_trial {
        let (x, y) = (draw(&mut rng), draw(&mut rng));
        out.checks += 1;
        match differs(&x, &y) {
            Ok(false) => {}
            Ok(true) => {
                let (x, y) = shrink_pair(x, y, tree_deletions, |x, y| differs(x, y).unwrap_or(false));
                let route_a = p.joint(&x, &y).unwrap_or(false);
                out.fail(
                    format!("walk sets say joint={route_a}, product says joint={} for ({x}, {y})", !route_a),
                    m.to_text(),
                );
                return out;
            }
            Err(e) => {
                out.fail(format!("error on ({x}, {y}): {e}"), m.to_text());
                return out;
            }
        }
    }
    out
}

fn walkdef(cfg: &TrialConfig, i: usize) -> Outcome {
    let mut rng = trial_rng(cfg.seed, i);
    let m = random_ta(cfg, &mut rng);
    let p = match TreePipeline::walks_only(&m, &cfg.limits) {
        Ok(p) => p,
        Err(e) => return Outcome::skip(e),
    };
    let differs = |z: &BinaryTree| match (p.walk_of_tree_definitional(z), p.walk_of_tree(z)) {
        (Ok(a), Ok(b)) => a != b,
        (Err(_), Err(_)) => false,
        _ => true,
    };
    let mut out = Outcome::default();
    for _ in 0..cfg.per_trial {
        let z = random_tree(&mut rng, cfg.labels, cfg.max_nodes);
        out.checks += 1;
        if differs(&z) {
            let (z, _) = shrink_pair(z.clone(), z, tree_deletions, |z, _| differs(z));
            let show = |r: Result<_>| r.map_or_else(|e: JepError| e.to_string(), |w: crate::tree_jep::TreeWalk| w.to_string());
            out.fail(
                format!(
                    "walk of {z}: definitional {}, compositional {}",
                    show(p.walk_of_tree_definitional(&z)),
                    show(p.walk_of_tree(&z))
                ),
                m.to_text(),
            );
            return out;
        }
    }
    out
}

fn cotree_trial(cfg: &TrialConfig, i: usize) -> Outcome {
    let mut rng = trial_rng(cfg.seed, i);
    let mut out = Outcome::default();
    let g = random_cograph(&mut rng, cfg.max_vertices);
    out.checks += 1;
    match cotree_of(&g).and_then(|t| Ok((graph_of(&t)?, Cotree::from_shape(&t.shape())?))) {
        Ok((h, _)) if h == g => {}
        Ok((h, _)) => out.fail(format!("round trip gave {h}"), g.to_text()),
        Err(e) => out.fail(format!("round trip failed: {e}"), g.to_text()),
    }
    out.checks += 1;
    match encode_cograph(&g).and_then(|t| decode_cograph(&t)) {
        Ok(h) if isomorphic(&g, &h) => {}
        Ok(h) => out.fail(format!("encoding round trip gave {h}"), g.to_text()),
        Err(e) => out.fail(format!("encoding round trip failed: {e}"), g.to_text()),
    }
    if i == 0 {
        out.checks += 1;
        if cotree_of(&Cograph::path(4)) != Err(JepError::NotCograph) {
            out.fail("P4 was given a cotree".into(), Cograph::path(4).to_text());
        }
    }
    let host = random_cograph(&mut rng, cfg.host_vertices);
    let small = if rng.gen_bool(0.5) {
        random_cograph(&mut rng, cfg.pattern_vertices)
    } else {
        let mut vs: Vec<usize> = (0..host.vertex_count()).collect();
        vs.shuffle(&mut rng);
        let keep = rng.gen_range(1..=vs.len().min(cfg.pattern_vertices).max(1));
        host.induced(&vs[..keep])
    };
    out.checks += 1;
    let differs = |a: &Cograph, b: &Cograph| induced_via_cotrees(a, b).ok() != Some(brute_induced(a, b));
    if differs(&small, &host) {
        let drop_vertex = |g: &Cograph| -> Vec<Cograph> {
            (0..g.vertex_count())
                .filter(|_| g.vertex_count() > 1)
                .map(|v| g.induced(&(0..g.vertex_count()).filter(|&u| u != v).collect::<Vec<_>>()))
                .collect()
        };
        let (a, b) = shrink_pair(small, host, drop_vertex, differs);
        out.fail(
            format!("induced_via_cotrees disagrees with brute force ({})", brute_induced(&a, &b)),
            format!("pattern:\n{}host:\n{}", a.to_text(), b.to_text()),
        );
    }
    out
}

fn encoded_sup(cfg: &TrialConfig) -> Vec<Outcome> {
    let base = LabelSet::numeric(cfg.labels).expect("label count");
    let (ext, up) = base.extended("up").expect("fresh name");
    let patterns = match enumerate_general(cfg.labels, cfg.pattern_nodes, cfg.limits.max_states) {
        Ok(p) => p,
        Err(e) => return vec![Outcome::skip(e)],
    };
    let hosts: Vec<_> = match enumerate_binary(ext.size(), cfg.max_nodes, cfg.limits.max_states) {
        Ok(ts) => ts
            .into_iter()
            .filter_map(|t| decode_general(&t, up).ok().map(|g| (t, g)))
            .collect(),
        Err(e) => return vec![Outcome::skip(e)],
    };
    // cograph patterns and hosts, as encodings
    let cg = CographUniverse::new(cfg.scan_size.min(4), cfg.max_vertices.min(7));
    let cpatterns: Vec<Cograph> = cg.graphs().filter(|g| g.vertex_count() <= cfg.scan_size.min(4)).cloned().collect();
    let chosts: Vec<(BinaryTree, Cograph)> = cg
        .graphs()
        .map(|g| (encode_cograph(g).expect("cograph"), g.clone()))
        .collect();
    // each trial: a random pattern, checked on a random sample of hosts
    let run = |i: usize| -> Outcome {
        let mut rng = trial_rng(cfg.seed, i);
        let mut out = Outcome::default();
        let pick = rng.gen_range(0..patterns.len() + cpatterns.len());
        if pick < patterns.len() {
            let p = &patterns[pick];
            let a = match sup_general_encoded(p, &ext, up) {
                Ok(a) => a,
                Err(e) => return Outcome::skip(e),
            };
            for (t, g) in hosts.choose_multiple(&mut rng, cfg.per_trial) {
                out.checks += 1;
                if a.accepts(t).ok() != Some(general_contains(g, p)) {
                    out.fail(
                        format!("sup_general_encoded on {}", t.to_sexpr(&ext)),
                        format!("pattern {}", p.to_sexpr(&base)),
                    );
                    break;
                }
            }
        } else {
            let p = &cpatterns[pick - patterns.len()];
            let a = match cotree_of(p).and_then(|t| sup_cograph_encoded(&t)) {
                Ok(a) => a,
                Err(e) => return Outcome::skip(e),
            };
            for (t, g) in chosts.choose_multiple(&mut rng, cfg.per_trial) {
                out.checks += 1;
                if a.accepts(t).ok() != Some(brute_induced(p, g)) {
                    out.fail(
                        format!("sup_cograph_encoded on {}", t.to_sexpr(&encoding_labels())),
                        format!("pattern:\n{}", p.to_text()),
                    );
                    break;
                }
            }
        }
        out
    };
    run_trials(cfg, run)
}

fn jep_verdicts(cfg: &TrialConfig, i: usize) -> Outcome {
    let mut rng = trial_rng(cfg.seed, i);
    let mut out = Outcome::default();
    let cap = cfg.limits.max_states;

    let m = random_dfa(cfg, &mut rng);
    for mode in [PairMode::Bad, PairMode::Semibad] {
        out.checks += 1;
        let check = || -> Result<Option<String>> {
            Ok(match decide_jep_string(&m, mode, &cfg.limits)? {
                Verdict::BadPair { x, y, .. } => {
                    let fmt = |w: &Word| format_word(m.alphabet(), w);
                    if mode == PairMode::Bad && !(m.accepts(&x)? && m.accepts(&y)?) {
                        Some(format!("{mode:?} pair ({}, {}) leaves L", fmt(&x), fmt(&y)))
                    } else if joint_string_ref(&m, &x, &y)? {
                        Some(format!("{mode:?} pair ({}, {}) is joint", fmt(&x), fmt(&y)))
                    } else {
                        None
                    }
                }
                Verdict::Jep => scan_bad_pairs_string(&m, cfg.scan_len, mode, cap)?
                    .first()
                    .map(|(x, y)| format!("{mode:?} JEP, yet ({}, {}) is bad", format_word(m.alphabet(), x), format_word(m.alphabet(), y))),
            })
        };
        match check() {
            Ok(None) => {}
            Ok(Some(d)) => out.fail(d, m.to_text()),
            Err(e @ JepError::SizeLimitExceeded { .. }) => out.skipped = Some(e.to_string()),
            Err(e) => out.fail(e.to_string(), m.to_text()),
        }
    }

    let t = random_ta(cfg, &mut rng);
    for mode in [PairMode::Bad, PairMode::Semibad] {
        out.checks += 1;
        let check = || -> Result<Option<String>> {
            Ok(match decide_jep_tree(&t, mode, &cfg.limits)? {
                Verdict::BadPair { x, y, .. } => {
                    if mode == PairMode::Bad && !(t.accepts(&x)? && t.accepts(&y)?) {
                        Some(format!("{mode:?} pair ({x}, {y}) leaves L"))
                    } else if joint_tree_ref(&t, &x, &y)? {
                        Some(format!("{mode:?} pair ({x}, {y}) is joint"))
                    } else {
                        None
                    }
                }
                Verdict::Jep => scan_bad_pairs_tree(&t, cfg.scan_size, mode, cap)?
                    .first()
                    .map(|(x, y)| format!("{mode:?} JEP, yet ({x}, {y}) is bad")),
            })
        };
        match check() {
            Ok(None) => {}
            Ok(Some(d)) => out.fail(d, t.to_text()),
            Err(e @ JepError::SizeLimitExceeded { .. }) => out.skipped = Some(e.to_string()),
            Err(e) => out.fail(e.to_string(), t.to_text()),
        }
    }

    let mut forbidden = vec![Cograph::path(4)];
    for _ in 0..rng.gen_range(1..=2) {
        forbidden.push(random_cograph(&mut rng, 4));
    }
    let show = || forbidden.iter().map(|h| format!("{}---\n", h.to_text())).collect::<String>();
    out.checks += 1;
    let check = || -> Result<Option<String>> {
        Ok(match decide_jep_cographs(&forbidden, &cfg.limits)? {
            Verdict::BadPair { x, y, .. } => {
                let o = CographPairOracle::new(&forbidden, x.vertex_count().max(y.vertex_count()));
                let free = |g: &Cograph| cotree_of(g).is_ok() && !forbidden.iter().any(|h| brute_induced(h, g));
                if !free(&x) || !free(&y) {
                    Some(format!("pair ({x}; {y}) leaves the class"))
                } else if o.joint(&x, &y)? {
                    Some(format!("pair ({x}; {y}) is joint"))
                } else {
                    None
                }
            }
            Verdict::Jep => scan_bad_pairs_cograph(&forbidden, cfg.scan_size)?
                .first()
                .map(|(x, y)| format!("JEP, yet ({x}; {y}) is bad")),
        })
    };
    match check() {
        Ok(None) => {}
        Ok(Some(d)) => out.fail(d, show()),
        Err(e @ (JepError::SizeLimitExceeded { .. } | JepError::Undecided(_))) => out.skipped = Some(e.to_string()),
        Err(e) => out.fail(e.to_string(), show()),
    }
    out
}

/// Runs one validation suite. Discrepancies are reported, not raised.
pub fn cross_validate(suite: Suite, cfg: &TrialConfig) -> Report {
    let outcomes = match suite {
        Suite::StringClaim1 => run_trials(cfg, |i| string_claim1(cfg, i)),
        Suite::TreeClaim1 => run_trials(cfg, |i| tree_claim1(cfg, i)),
        Suite::WalkDef => run_trials(cfg, |i| walkdef(cfg, i)),
        Suite::Cotree => run_trials(cfg, |i| cotree_trial(cfg, i)),
        Suite::EncodedSup if cfg.trials == 0 => Vec::new(),
        Suite::EncodedSup => encoded_sup(cfg),
        Suite::JepVerdicts => run_trials(cfg, |i| jep_verdicts(cfg, i)),
    };
    let mut report = Report {
        suite,
        seed: cfg.seed,
        trials: outcomes.len(),
        checks: 0,
        skipped: Vec::new(),
        discrepancies: Vec::new(),
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        report.checks += o.checks;
        if let Some(why) = o.skipped {
            report.skipped.push((i, why));
        }
        for (detail, repro) in o.found {
            report.discrepancies.push(Discrepancy { trial: i, detail, repro });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::forb_string;

    fn ab() -> LabelSet {
        letters(2)
    }

    fn w(s: &str) -> Word {
        crate::dfa::parse_word(&ab(), s).unwrap()
    }

    #[test]
    fn same_seed_same_automaton() {
        let cfg = TrialConfig::default();
        assert_eq!(random_dfa(&cfg, &mut trial_rng(9, 3)), random_dfa(&cfg, &mut trial_rng(9, 3)));
        assert_eq!(random_ta(&cfg, &mut trial_rng(9, 3)), random_ta(&cfg, &mut trial_rng(9, 3)));
        for i in 0..200 {
            let mut rng = trial_rng(1, i);
            assert!(random_dfa(&cfg, &mut rng).state_count() <= cfg.max_states);
            assert!(random_ta(&cfg, &mut rng).state_count() <= cfg.max_states);
            assert!(random_tree(&mut rng, 2, 7).size() <= 7);
            assert!(random_cograph(&mut rng, 6).vertex_count() <= 6);
        }
    }

    #[test]
    fn random_languages_are_diverse() {
        let cfg = TrialConfig {
            max_states: 2,
            ..TrialConfig::default()
        };
        let lim = Limits::default();
        let count = |cfg: &TrialConfig, mode| {
            let (mut jep, mut bad) = (0, 0);
            for i in 0..1000 {
                match decide_jep_string(&random_dfa(cfg, &mut trial_rng(5, i)), mode, &lim).unwrap() {
                    Verdict::Jep => jep += 1,
                    Verdict::BadPair { .. } => bad += 1,
                }
            }
            (jep, bad)
        };
        // small DFAs over two letters all have JEP for bad pairs
        let (jep, bad) = count(&cfg, PairMode::Semibad);
        assert!(jep > 0 && bad > 0, "{jep} {bad}");
        let (jep, bad) = count(&TrialConfig { max_states: 4, ..cfg }, PairMode::Bad);
        assert!(jep > 0 && bad > 0, "{jep} {bad}");
    }

    #[test]
    fn string_scans() {
        let ba = Dfa::from_fn(ab(), 3, 0, |q| q < 2, |q, a| match (q, a) {
            (0, 1) => 0,
            (0 | 1, 0) => 1,
            _ => 2,
        })
        .unwrap();
        assert!(ba.accepts(&w("bbaa")).unwrap() && !ba.accepts(&w("ab")).unwrap());
        assert!(scan_bad_pairs_string(&ba, 6, PairMode::Bad, 1000).unwrap().is_empty());
        let a_or_b = forb_string(&[w("ab"), w("ba")], &ab()).unwrap();
        assert!(scan_bad_pairs_string(&a_or_b, 3, PairMode::Bad, 1000)
            .unwrap()
            .contains(&(w("a"), w("b"))));
        let empty = Dfa::universal(ab()).complement();
        assert!(scan_bad_pairs_string(&empty, 4, PairMode::Bad, 1000).unwrap().is_empty());
    }

    #[test]
    fn tree_scans() {
        let l2 = LabelSet::numeric(2).unwrap();
        let all0 = crate::tree_automata::forb_tree(&[BinaryTree::leaf(1)], &l2).unwrap();
        assert!(scan_bad_pairs_tree(&all0, 5, PairMode::Bad, 1000).unwrap().is_empty());
        let all1 = crate::tree_automata::forb_tree(&[BinaryTree::leaf(0)], &l2).unwrap();
        let both = all0.union(&all1).unwrap();
        let bad = scan_bad_pairs_tree(&both, 3, PairMode::Bad, 1000).unwrap();
        assert!(bad.contains(&(BinaryTree::leaf(0), BinaryTree::leaf(1))));
    }

    #[test]
    fn cograph_universe_counts() {
        let u = CographUniverse::new(5, 7);
        let mut by_size = [0; 8];
        for g in u.graphs() {
            by_size[g.vertex_count()] += 1;
        }
        assert_eq!(by_size, [0, 1, 2, 4, 10, 24, 66, 180]);
        for g in u.graphs() {
            assert!(cotree_of(g).is_ok());
        }
    }

    #[test]
    fn cograph_pair_oracle() {
        let k2 = Cograph::complete(2);
        let e2 = Cograph::edgeless(2);
        let s = [Cograph::path(4), Cograph::path(3), k2.disjoint_union(&Cograph::new(1))];
        let o = CographPairOracle::new(&s, 3);
        assert!(!o.joint(&k2, &e2).unwrap());
        assert!(o.joint(&k2, &k2).unwrap());
        let bad = scan_bad_pairs_cograph(&s, 4).unwrap();
        assert!(bad.iter().any(|(x, y)| isomorphic(x, &k2) && isomorphic(y, &e2)
            || isomorphic(x, &e2) && isomorphic(y, &k2)));
        assert!(scan_bad_pairs_cograph(&[Cograph::path(4)], 4).unwrap().is_empty());
    }

    #[test]
    fn zero_trials_give_empty_reports() {
        for s in Suite::ALL {
            let r = cross_validate(
                s,
                &TrialConfig {
                    trials: 0,
                    ..TrialConfig::for_suite(s)
                },
            );
            assert_eq!((r.trials, r.checks), (0, 0));
            assert!(r.is_clean() && r.skipped.is_empty());
        }
    }

    #[test]
    fn mutations_are_caught() {
        let r = cross_validate(
            Suite::StringClaim1,
            &TrialConfig {
                mutation: Some(Mutation::LiteralNStep),
                ..TrialConfig::for_suite(Suite::StringClaim1)
            },
        );
        assert!(!r.is_clean(), "{r}");
        let r = cross_validate(
            Suite::TreeClaim1,
            &TrialConfig {
                mutation: Some(Mutation::LeafOnlyProfile),
                ..TrialConfig::for_suite(Suite::TreeClaim1)
            },
        );
        assert!(!r.is_clean(), "{r}");
    }

    #[test]
    fn small_runs_are_clean_and_deterministic() {
        for s in Suite::ALL {
            let cfg = TrialConfig {
                seed: 3,
                trials: 4,
                per_trial: 30,
                ..TrialConfig::for_suite(s)
            };
            let r = cross_validate(s, &cfg);
            assert!(r.is_clean(), "{r}");
            assert_eq!(r, cross_validate(s, &TrialConfig { parallel: false, ..cfg }));
        }
    }

    #[test]
    fn report_text() {
        let r = Report {
            suite: Suite::Cotree,
            seed: 1,
            trials: 2,
            checks: 5,
            skipped: vec![],
            discrepancies: vec![Discrepancy {
                trial: 1,
                detail: "x".into(),
                repro: "n: 1\n".into(),
            }],
        };
        assert_eq!(
            r.to_string(),
            "suite: cotree\nseed: 1\ntrials: 2\nchecks: 5\nskipped: 0\ndiscrepancies: 1\ndiscrepancy: trial 1: x\n  n: 1\n"
        );
    }
}
