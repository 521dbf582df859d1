//! JEP for regular string languages under the subsequence order.
//!
//! The DFA is viewed as an edge-labeled digraph; its line graph is condensed
//! into a DAG of SCCs, walks in that DAG from initial vertices summarize runs,
//! and a powerset automaton over walks computes, for each string `x`, the set
//! of walks of members of `L` lying above `x`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::bits::BitSet;
use crate::dfa::{hash_pair_string, is_subsequence, sup_string, BoolOp, Dfa, Word};
use crate::error::{JepError, Result};
use crate::graph::{line_graph, Condensation, Digraph};
use crate::verdict::{Certificate, Limits, PairMode, Verdict};

/// A walk in the condensation DAG; the empty sequence is the empty walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Walk(pub Vec<usize>);

impl Walk {
    pub fn empty() -> Self {
        Walk(Vec::new())
    }

    pub fn is_empty_walk(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &Walk) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|c| format!("C{}", c + 1)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A state of the walk automaton: a set of indices into the walk list.
pub type WalkFamily = BitSet;

/// Transitions of `m` as `(source, target)` pairs; edge `q * k + a` is the
/// transition out of `q` on symbol `a`.
pub fn transition_edges(m: &Dfa) -> Vec<(usize, usize)> {
    let k = m.alphabet().size();
    (0..m.state_count() * k)
        .map(|e| (e / k, m.step(e / k, e % k)))
        .collect()
}

/// Line graph of the transition digraph of `m`.
pub fn transition_line_graph(m: &Dfa) -> Digraph {
    line_graph(&transition_edges(m))
}

/// Condensation of the line graph with the per-SCC flags.
#[derive(Debug, Clone)]
pub struct StringDag {
    pub cond: Condensation,
    pub initial: Vec<bool>,
    pub accepting: Vec<bool>,
    /// Symbols labeling some edge inside each SCC.
    pub symbols: Vec<BitSet>,
}

impl StringDag {
    pub fn of(m: &Dfa) -> Self {
        let k = m.alphabet().size();
        let edges = transition_edges(m);
        let cond = Condensation::of(&line_graph(&edges));
        let n = cond.len();
        let mut initial = vec![false; n];
        let mut accepting = vec![false; n];
        let mut symbols = vec![BitSet::new(); n];
        for (e, &(src, dst)) in edges.iter().enumerate() {
            let c = cond.component[e];
            symbols[c].insert(e % k);
            if src == m.start() {
                initial[c] = true;
            }
            if m.is_accepting(dst) {
                accepting[c] = true;
            }
        }
        StringDag {
            cond,
            initial,
            accepting,
            symbols,
        }
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
}

/// All walks from initial vertices, preceded by the empty walk. Order: depth
/// first from initial vertices in ascending order, successors ascending.
pub fn enumerate_walks(d: &StringDag, cap: usize) -> Result<Vec<Walk>> {
    let mut out = vec![Walk::empty()];
    let mut stack: Vec<Vec<usize>> = Vec::new();
    for c in (0..d.len()).rev().filter(|&c| d.initial[c]) {
        stack.push(vec![c]);
    }
    while let Some(w) = stack.pop() {
        if out.len() >= cap {
            return Err(JepError::size_limit("walks", cap));
        }
        let last = *w.last().unwrap();
        for &s in d.cond.dag.successors(last).iter().rev() {
            let mut v = w.clone();
            v.push(s);
            stack.push(v);
        }
        out.push(Walk(w));
    }
    Ok(out)
}

/// Transition rule of the walk automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NRule {
    /// A symbol is read in the last SCC of the new walk; staying in the same
    /// last SCC requires it to be loopy.
    #[default]
    Exact,
    /// The rule read literally: any extension whose last SCC carries the
    /// symbol. Kept for mutation checks of the validation harness.
    Literal,
}

/// The walk machinery for one trimmed DFA.
#[derive(Debug, Clone)]
pub struct StringPipeline {
    m: Dfa,
    dag: StringDag,
    walks: Vec<Walk>,
    index: HashMap<Walk, usize>,
    /// Proper prefixes of each walk (including the empty walk).
    prefixes: Vec<Vec<usize>>,
    rule: NRule,
}

impl StringPipeline {
    pub fn new(m: &Dfa, max_walks: usize) -> Result<Self> {
        let m = m.trim();
        let dag = StringDag::of(&m);
        let walks = enumerate_walks(&dag, max_walks)?;
        let index: HashMap<Walk, usize> =
            walks.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let prefixes = walks
            .iter()
            .map(|w| (0..w.0.len()).map(|l| index[&Walk(w.0[..l].to_vec())]).collect())
            .collect();
        log::debug!(
            "string pipeline: {} states, {} SCCs, {} walks",
            m.state_count(),
            dag.len(),
            walks.len()
        );
        Ok(StringPipeline {
            m,
            dag,
            walks,
            index,
            prefixes,
            rule: NRule::Exact,
        })
    }

    pub fn with_rule(mut self, rule: NRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn dfa(&self) -> &Dfa {
        &self.m
    }

    pub fn dag(&self) -> &StringDag {
        &self.dag
    }

    /// The walk list; index 0 is the empty walk.
    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn walk_index(&self, w: &Walk) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// SCCs of the transitions used on input `z`, consecutive repeats merged.
    pub fn walk_of_string(&self, z: &[usize]) -> Result<Walk> {
        self.m.run(z)?;
        let k = self.m.alphabet().size();
        let mut q = self.m.start();
        let mut out: Vec<usize> = Vec::new();
        for &a in z {
            let c = self.dag.cond.component[q * k + a];
            if out.last() != Some(&c) {
                out.push(c);
            }
            q = self.m.step(q, a);
        }
        Ok(Walk(out))
    }

    /// The empty walk together with the one-vertex walks at initial SCCs.
    pub fn start_family(&self) -> WalkFamily {
        self.walks
            .iter()
            .enumerate()
            .filter(|(_, w)| w.0.len() <= 1)
            .map(|(i, _)| i)
            .collect()
    }

    fn check_symbol(&self, a: usize) -> Result<()> {
        if a >= self.m.alphabet().size() {
            return Err(JepError::Alphabet(format!("symbol {a} outside alphabet")));
        }
        Ok(())
    }

    pub fn n_step(&self, s: &WalkFamily, a: usize) -> Result<WalkFamily> {
        self.check_symbol(a)?;
        Ok(self.step_unchecked(s, a))
    }

    fn step_unchecked(&self, s: &WalkFamily, a: usize) -> WalkFamily {
        let mut out = WalkFamily::new();
        for (i, w) in self.walks.iter().enumerate() {
            let Some(last) = w.last() else { continue };
            if !self.dag.symbols[last].contains(a) {
                continue;
            }
            let via_proper = self.prefixes[i].iter().any(|&p| s.contains(p));
            let via_self = s.contains(i)
                && (self.rule == NRule::Literal || self.dag.loopy(last));
            if via_proper || via_self {
                out.insert(i);
            }
        }
        out
    }

    pub fn n_run(&self, x: &[usize]) -> Result<WalkFamily> {
        self.m.run(x)?;
        Ok(x.iter().fold(self.start_family(), |s, &a| self.step_unchecked(&s, a)))
    }

    fn ends_accepting(&self, i: usize) -> bool {
        match self.walks[i].last() {
            Some(c) => self.dag.accepting[c],
            None => self.m.is_accepting(self.m.start()),
        }
    }

    /// Walks with an accepting end and a prefix in `s`.
    pub fn wset_of_family(&self, s: &WalkFamily) -> BitSet {
        (0..self.walks.len())
            .filter(|&i| self.ends_accepting(i))
            .filter(|&i| s.contains(i) || self.prefixes[i].iter().any(|&p| s.contains(p)))
            .collect()
    }

    /// `{W_z : x ⪯ z, z ∈ L}` as walk indices.
    pub fn wset(&self, x: &[usize]) -> Result<BitSet> {
        Ok(self.wset_of_family(&self.n_run(x)?))
    }

    /// Route A: the walk sets of `x` and `y` intersect.
    pub fn joint(&self, x: &[usize], y: &[usize]) -> Result<bool> {
        Ok(self.wset(x)?.intersects(&self.wset(y)?))
    }

    pub fn walk_set_display(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.walks[i].to_string()).collect()
    }
}

/// Route B: explores `L ∩ Sup(x) ∩ Sup(y)`; returns whether it is nonempty
/// and how many product states were reached.
pub fn joint_by_product(m: &Dfa, x: &[usize], y: &[usize]) -> Result<(bool, usize)> {
    let p = m
        .product(&sup_string(x, m.alphabet())?, BoolOp::And)?
        .product(&sup_string(y, m.alphabet())?, BoolOp::And)?;
    Ok((!p.is_empty(), p.state_count()))
}

/// Is there `z ∈ L` with `x, y ⪯ z`? Both routes are computed and must agree.
pub fn joint_string(m: &Dfa, x: &[usize], y: &[usize]) -> Result<bool> {
    let p = StringPipeline::new(m, Limits::default().max_walks)?;
    let a = p.joint(x, y)?;
    let (b, _) = joint_by_product(m, x, y)?;
    if a != b {
        return Err(JepError::CertificateFailed(format!(
            "walk-set answer {a} disagrees with product emptiness {b} on ({}, {})",
            m.format_word(x),
            m.format_word(y)
        )));
    }
    Ok(b)
}

/// Shortlex-least representative string for each reachable state of `M × N`.
struct ProductStates {
    families: Vec<WalkFamily>,
    /// `(dfa state, family id, representative)` in discovery order.
    states: Vec<(usize, usize, Word)>,
}

fn explore_product(p: &StringPipeline, limits: &Limits) -> Result<ProductStates> {
    let m = p.dfa();
    let k = m.alphabet().size();
    let mut families = vec![p.start_family()];
    let mut family_id: HashMap<WalkFamily, usize> = HashMap::from([(families[0].clone(), 0)]);
    let mut step_memo: HashMap<(usize, usize), usize> = HashMap::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::from([((m.start(), 0), 0)]);
    let mut states = vec![(m.start(), 0, Vec::new())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (q, f, ref w) = states[i];
        let w = w.clone();
        for a in 0..k {
            let nf = match step_memo.get(&(f, a)) {
                Some(&nf) => nf,
                None => {
                    let s = p.step_unchecked(&families[f], a);
                    let next = families.len();
                    let id = *family_id.entry(s.clone()).or_insert(next);
                    if id == next {
                        families.push(s);
                    }
                    step_memo.insert((f, a), id);
                    id
                }
            };
            let key = (m.step(q, a), nf);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                if states.len() >= limits.max_states {
                    return Err(JepError::size_limit("reachable M×N states", limits.max_states));
                }
                e.insert(states.len());
                let mut v = w.clone();
                v.push(a);
                queue.push_back(states.len());
                states.push((key.0, key.1, v));
            }
        }
    }
    Ok(ProductStates { families, states })
}

fn pair_key(x: &Word, y: &Word) -> (usize, usize, Word, usize, Word) {
    (x.len() + y.len(), x.len(), x.clone(), y.len(), y.clone())
}

/// Orders a pair so that the first component is shortlex-smaller.
pub fn normalize_pair(x: Word, y: Word) -> (Word, Word) {
    if (x.len(), &x) <= (y.len(), &y) {
        (x, y)
    } else {
        (y, x)
    }
}

/// Decides JEP of `L(m)`; a bad pair is the one of least total length,
/// ties broken by shortlex order of its components.
pub fn decide_jep_string(m: &Dfa, mode: PairMode, limits: &Limits) -> Result<Verdict<Word>> {
    decide(m, mode, limits).map_err(|e| e.with_size_note(|| bounds_note(m, limits)))
}

/// `|𝒲|` and the semibad length bound, for size-limit messages.
pub fn bounds_note(m: &Dfa, limits: &Limits) -> String {
    match StringPipeline::new(m, limits.max_walks) {
        Ok(p) => format!("|W| = {}, semibad length bound 2^{}", p.walks().len(), p.walks().len()),
        Err(_) => format!("|W| > {}", limits.max_walks),
    }
}

fn decide(m: &Dfa, mode: PairMode, limits: &Limits) -> Result<Verdict<Word>> {
    let p = StringPipeline::new(m, limits.max_walks)?;
    let prod = explore_product(&p, limits)?;
    let m = p.dfa();
    // first (hence shortlex-least) eligible representative per family
    let mut reps: Vec<(usize, Word)> = Vec::new();
    let mut has_rep = vec![false; prod.families.len()];
    for (q, f, w) in &prod.states {
        if (mode == PairMode::Semibad || m.is_accepting(*q)) && !has_rep[*f] {
            has_rep[*f] = true;
            reps.push((*f, w.clone()));
        }
    }
    let wsets: Vec<BitSet> = reps.iter().map(|(f, _)| p.wset_of_family(&prod.families[*f])).collect();
    let mut best: Option<(Word, Word)> = None;
    for i in 0..reps.len() {
        for j in i..reps.len() {
            if wsets[i].intersects(&wsets[j]) {
                continue;
            }
            let cand = normalize_pair(reps[i].1.clone(), reps[j].1.clone());
            if best.as_ref().is_none_or(|b| pair_key(&cand.0, &cand.1) < pair_key(&b.0, &b.1)) {
                best = Some(cand);
            }
        }
    }
    log::debug!(
        "decide_jep_string: {} product states, {} families",
        prod.states.len(),
        prod.families.len()
    );
    match best {
        None => Ok(Verdict::Jep),
        Some((x, y)) => {
            let (joint, states) = joint_by_product(m, &x, &y)?;
            if joint {
                return Err(JepError::CertificateFailed(format!(
                    "pair ({}, {}) has a common extension in the language",
                    m.format_word(&x),
                    m.format_word(&y)
                )));
            }
            Ok(Verdict::BadPair {
                x,
                y,
                certificate: Certificate::ProductEmpty {
                    states_explored: states,
                },
            })
        }
    }
}

/// Default length bound for semibad-pair enumeration: `2^|𝒲|`, capped.
pub fn default_semibad_bound(p: &StringPipeline, limits: &Limits) -> usize {
    let w = p.walks().len();
    if w >= usize::BITS as usize - 1 {
        limits.max_states
    } else {
        (1usize << w).min(limits.max_states)
    }
}

/// Strings of length at most `bound` whose walk-automaton run never repeats a
/// state; every member of a minimal semibad pair is among them.
fn repetition_free_strings(
    p: &StringPipeline,
    bound: usize,
    limits: &Limits,
) -> Result<Vec<(Word, WalkFamily)>> {
    let k = p.dfa().alphabet().size();
    let mut out = Vec::new();
    let mut stack: Vec<(Word, Vec<WalkFamily>)> = vec![(Vec::new(), vec![p.start_family()])];
    while let Some((w, path)) = stack.pop() {
        if out.len() >= limits.max_states {
            return Err(JepError::size_limit("semibad candidates", limits.max_states));
        }
        let cur = path.last().unwrap().clone();
        if w.len() < bound {
            for a in (0..k).rev() {
                let s = p.step_unchecked(&cur, a);
                if !path.contains(&s) {
                    let mut v = w.clone();
                    v.push(a);
                    let mut np = path.clone();
                    np.push(s);
                    stack.push((v, np));
                }
            }
        }
        out.push((w, cur));
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(out)
}

fn dominated(small: &(Word, Word), big: &(Word, Word)) -> bool {
    (is_subsequence(&small.0, &big.0) && is_subsequence(&small.1, &big.1))
        || (is_subsequence(&small.0, &big.1) && is_subsequence(&small.1, &big.0))
}

/// The `⪯×⪯`-minimal semibad pairs with both sides of length at most `bound`,
/// each normalized with the shortlex-smaller string first, sorted.
pub fn minimal_semibad_string(m: &Dfa, bound: usize, limits: &Limits) -> Result<Vec<(Word, Word)>> {
    if bound == 0 {
        return Err(JepError::InvalidArgument("semibad bound must be at least 1".into()));
    }
    let p = StringPipeline::new(m, limits.max_walks)?;
    let cands = repetition_free_strings(&p, bound, limits)?;
    let wsets: Vec<BitSet> = cands.iter().map(|(_, s)| p.wset_of_family(s)).collect();
    let mut semibad = Vec::new();
    for i in 0..cands.len() {
        for j in i..cands.len() {
            if !wsets[i].intersects(&wsets[j]) {
                semibad.push(normalize_pair(cands[i].0.clone(), cands[j].0.clone()));
            }
        }
    }
    let mut minimal: Vec<(Word, Word)> = semibad
        .iter()
        .filter(|pair| !semibad.iter().any(|o| o != *pair && dominated(o, pair)))
        .cloned()
        .collect();
    minimal.sort_by_key(|(x, y)| pair_key(x, y));
    minimal.dedup();
    Ok(minimal)
}

/// Automaton over the alphabet extended by `#` accepting `x#y` exactly when
/// `(x, y)` is semibad (or bad, in [`PairMode::Bad`]).
pub fn badpair_automaton_string(
    m: &Dfa,
    bound: usize,
    mode: PairMode,
    limits: &Limits,
) -> Result<Dfa> {
    let minimal = minimal_semibad_string(m, bound, limits)?;
    let sigma = m.alphabet();
    let universal = Dfa::universal(sigma.clone());
    let mut acc = hash_pair_string(&universal, &universal)?.complement().intersection(
        &hash_pair_string(&universal, &universal)?,
    )?;
    for (x, y) in &minimal {
        let (sx, sy) = (sup_string(x, sigma)?, sup_string(y, sigma)?);
        acc = acc
            .union(&hash_pair_string(&sx, &sy)?)?
            .union(&hash_pair_string(&sy, &sx)?)?
            .minimize();
        if acc.state_count() > limits.max_states {
            return Err(JepError::size_limit("bad-pair automaton states", limits.max_states));
        }
    }
    if mode == PairMode::Bad {
        acc = acc.intersection(&hash_pair_string(m, m)?)?.minimize();
    }
    Ok(acc)
}
