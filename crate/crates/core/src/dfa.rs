//! Total deterministic finite string automata.
//!
//! Symbols are indices into the alphabet [`LabelSet`]; a word is a slice of
//! symbol indices. Automata always carry an explicit dead state where needed,
//! so the transition function is total.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{JepError, Result};
use crate::trees::LabelSet;

pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: LabelSet,
    start: usize,
    accepting: Vec<bool>,
    /// `delta[state * k + symbol]`
    delta: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

impl Dfa {
    pub fn new(
        alphabet: LabelSet,
        start: usize,
        accepting: Vec<bool>,
        delta: Vec<usize>,
    ) -> Result<Self> {
        let n = accepting.len();
        let k = alphabet.size();
        if n == 0 || start >= n {
            return Err(JepError::InvalidArgument("start state out of range".into()));
        }
        if delta.len() != n * k {
            return Err(JepError::InvalidArgument(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * k
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&t| t >= n) {
            return Err(JepError::InvalidArgument(format!("transition target {bad} out of range")));
        }
        Ok(Dfa {
            alphabet,
            start,
            accepting,
            delta,
        })
    }

    /// Builds a DFA from a transition function over states `0..n`.
    pub fn from_fn(
        alphabet: LabelSet,
        n: usize,
        start: usize,
        accept: impl Fn(usize) -> bool,
        step: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let k = alphabet.size();
        let delta = (0..n * k).map(|i| step(i / k, i % k)).collect();
        Dfa::new(alphabet, start, (0..n).map(accept).collect(), delta)
    }

    /// Accepts every word.
    pub fn universal(alphabet: LabelSet) -> Self {
        let k = alphabet.size();
        Dfa {
            alphabet,
            start: 0,
            accepting: vec![true],
            delta: vec![0; k],
        }
    }

    pub fn alphabet(&self) -> &LabelSet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.alphabet.size() + a]
    }

    fn check_word(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&a| a >= self.alphabet.size()) {
            Some(a) => Err(JepError::Alphabet(format!(
                "symbol {a} is not in an alphabet of size {}",
                self.alphabet.size()
            ))),
            None => Ok(()),
        }
    }

    fn check_same_alphabet(&self, other: &Dfa) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(JepError::Alphabet("automata have different alphabets".into()));
        }
        Ok(())
    }

    /// State reached after reading `w` from the start state.
    pub fn run(&self, w: &[usize]) -> Result<usize> {
        self.check_word(w)?;
        Ok(self.run_from(self.start, w))
    }

    pub fn run_from(&self, q: usize, w: &[usize]) -> usize {
        w.iter().fold(q, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, w: &[usize]) -> Result<bool> {
        Ok(self.accepting[self.run(w)?])
    }

    /// Reachable part of the product automaton.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        self.check_same_alphabet(other)?;
        let k = self.alphabet.size();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut states = vec![(self.start, other.start)];
        index.insert(states[0], 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (p, q) = states[i];
            for a in 0..k {
                let t = (self.step(p, a), other.step(q, a));
                let next = states.len();
                let id = *index.entry(t).or_insert(next);
                if id == next {
                    states.push(t);
                }
                delta.push(id);
            }
            i += 1;
        }
        let accepting = states
            .iter()
            .map(|&(p, q)| match op {
                BoolOp::And => self.accepting[p] && other.accepting[q],
                BoolOp::Or => self.accepting[p] || other.accepting[q],
            })
            .collect();
        Ok(Dfa {
            alphabet: self.alphabet.clone(),
            start: 0,
            accepting,
            delta,
        })
    }

    pub fn intersection(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::And)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::Or)
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    /// Removes states unreachable from the start state; states are renumbered
    /// in breadth-first order.
    pub fn trim(&self) -> Dfa {
        let k = self.alphabet.size();
        let mut order = vec![self.start];
        let mut id = vec![usize::MAX; self.state_count()];
        id[self.start] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for a in 0..k {
                let t = self.step(q, a);
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let delta = order
            .iter()
            .flat_map(|&q| (0..k).map(move |a| (q, a)))
            .map(|(q, a)| id[self.step(q, a)])
            .collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            start: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            delta,
        }
    }

    /// Minimal equivalent automaton (trim, then Moore partition refinement).
    pub fn minimize(&self) -> Dfa {
        let t = self.trim();
        let n = t.state_count();
        let k = t.alphabet.size();
        let mut class: Vec<usize> = t.accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|q| {
                    let sig = (class[q], (0..k).map(|a| class[t.step(q, a)]).collect());
                    let fresh = sig_ids.len();
                    *sig_ids.entry(sig).or_insert(fresh)
                })
                .collect();
            let done = sig_ids.len() == class.iter().collect::<std::collections::HashSet<_>>().len();
            class = next;
            if done {
                break;
            }
        }
        let m = class.iter().max().map_or(0, |c| c + 1);
        let mut delta = vec![0; m * k];
        let mut accepting = vec![false; m];
        for q in 0..n {
            accepting[class[q]] = t.accepting[q];
            for a in 0..k {
                delta[class[q] * k + a] = class[t.step(q, a)];
            }
        }
        Dfa {
            alphabet: t.alphabet.clone(),
            start: class[t.start],
            accepting,
            delta,
        }
        .trim()
    }

    /// A shortest accepted word, ties broken lexicographically; `None` if the
    /// language is empty.
    pub fn empty_witness(&self) -> Option<Word> {
        let k = self.alphabet.size();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur] {
                    w.push(a);
                    cur = p;
                }
                w.reverse();
                return Some(w);
            }
            for a in 0..k {
                let t = self.step(q, a);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.empty_witness().is_none()
    }

    /// Parses a word: one character per symbol when every symbol name is a
    /// single character, otherwise whitespace-separated names. `ε` and the
    /// empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(&self.alphabet, text)
    }

    pub fn format_word(&self, w: &[usize]) -> String {
        format_word(&self.alphabet, w)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("alphabet: {}\n", self.alphabet.names().join(" ")));
        s.push_str(&format!("states: {}\n", self.state_count()));
        s.push_str(&format!("start: {}\n", self.start));
        let acc: Vec<String> = (0..self.state_count())
            .filter(|&q| self.accepting[q])
            .map(|q| q.to_string())
            .collect();
        s.push_str(&format!("accept: {}\n", acc.join(" ")).replace(": \n", ":\n"));
        for q in 0..self.state_count() {
            for a in 0..self.alphabet.size() {
                s.push_str(&format!(
                    "trans: {q} {} {}\n",
                    self.alphabet.name(a),
                    self.step(q, a)
                ));
            }
        }
        s
    }

    /// Reads the line-oriented DFA text format; the transition table must be
    /// total.
    pub fn parse_text(text: &str) -> Result<Dfa> {
        let mut alphabet = None;
        let mut states = None;
        let mut start = None;
        let mut accept: Vec<(usize, usize)> = Vec::new();
        let mut trans: Vec<(usize, usize, String, usize)> = Vec::new();
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
                s.parse::<usize>()
                    .map_err(|_| JepError::parse(line_no, col, format!("expected a number, got {s:?}")))
            };
            match key.trim() {
                "alphabet" => alphabet = Some(LabelSet::parse(rest).map_err(|e| JepError::parse(line_no, col, e.to_string()))?),
                "states" => states = Some(num(rest.trim())?),
                "start" => start = Some(num(rest.trim())?),
                "accept" => {
                    for a in rest.split_whitespace() {
                        accept.push((num(a)?, line_no));
                    }
                }
                "trans" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(JepError::parse(line_no, col, "expected `trans: from symbol to`"));
                    }
                    trans.push((line_no, num(parts[0])?, parts[1].to_owned(), num(parts[2])?));
                }
                other => return Err(JepError::parse(line_no, 1, format!("unknown key {other:?}"))),
            }
        }
        let alphabet = alphabet.ok_or_else(|| JepError::parse(1, 1, "missing `alphabet:` line"))?;
        let n = states.ok_or_else(|| JepError::parse(1, 1, "missing `states:` line"))?;
        let start = start.ok_or_else(|| JepError::parse(1, 1, "missing `start:` line"))?;
        let k = alphabet.size();
        let mut delta: Vec<Option<usize>> = vec![None; n * k];
        let mut accepting = vec![false; n];
        for (q, line_no) in accept {
            if q >= n {
                return Err(JepError::parse(line_no, 1, format!("accepting state {q} out of range")));
            }
            accepting[q] = true;
        }
        for (line_no, from, sym, to) in trans {
            let a = alphabet
                .index_of(&sym)
                .ok_or_else(|| JepError::parse(line_no, 1, format!("unknown symbol {sym:?}")))?;
            if from >= n || to >= n {
                return Err(JepError::parse(line_no, 1, "state out of range"));
            }
            match delta[from * k + a] {
                Some(t) if t != to => {
                    return Err(JepError::parse(line_no, 1, "conflicting transition (nondeterministic)"))
                }
                _ => delta[from * k + a] = Some(to),
            }
        }
        if let Some(i) = delta.iter().position(Option::is_none) {
            return Err(JepError::parse(
                1,
                1,
                format!(
                    "transition table not total: missing ({}, {})",
                    i / k,
                    alphabet.name(i % k)
                ),
            ));
        }
        Dfa::new(alphabet, start, accepting, delta.into_iter().flatten().collect())
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn parse_word(alphabet: &LabelSet, text: &str) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() || text == "ε" {
        return Ok(Vec::new());
    }
    let single = alphabet.names().iter().all(|n| n.chars().count() == 1);
    let lookup = |s: &str| {
        alphabet
            .index_of(s)
            .ok_or_else(|| JepError::Alphabet(format!("symbol {s:?} is not in the alphabet")))
    };
    if single {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| lookup(&c.to_string()))
            .collect()
    } else {
        text.split_whitespace().map(lookup).collect()
    }
}

pub fn format_word(alphabet: &LabelSet, w: &[usize]) -> String {
    if w.is_empty() {
        return "ε".into();
    }
    let single = alphabet.names().iter().all(|n| n.chars().count() == 1);
    let parts: Vec<&str> = w.iter().map(|&a| alphabet.name(a)).collect();
    parts.join(if single { "" } else { " " })
}

/// Words having `w` as a (not necessarily contiguous) subsequence.
pub fn sup_string(w: &[usize], alphabet: &LabelSet) -> Result<Dfa> {
    let k = alphabet.size();
    if let Some(a) = w.iter().find(|&&a| a >= k) {
        return Err(JepError::Alphabet(format!("symbol {a} outside alphabet")));
    }
    let n = w.len() + 1;
    Dfa::from_fn(
        alphabet.clone(),
        n,
        0,
        |q| q == w.len(),
        |q, a| if q < w.len() && w[q] == a { q + 1 } else { q },
    )
}

/// Words avoiding every member of `forbidden` as a subsequence.
pub fn forb_string(forbidden: &[Word], alphabet: &LabelSet) -> Result<Dfa> {
    let mut acc = Dfa::universal(alphabet.clone());
    for f in forbidden {
        acc = acc.intersection(&sup_string(f, alphabet)?.complement())?;
    }
    Ok(acc.minimize())
}

/// `{ x#y : x ∈ L(a), y ∈ L(b) }` over the alphabet extended by `#`.
pub fn hash_pair_string(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    a.check_same_alphabet(b)?;
    let (ext, hash) = a.alphabet.extended("#")?;
    let (na, nb) = (a.state_count(), b.state_count());
    let dead = na + nb;
    Dfa::from_fn(
        ext,
        na + nb + 1,
        a.start,
        |q| q >= na && q < dead && b.accepting[q - na],
        |q, s| {
            if q == dead {
                dead
            } else if q < na {
                if s == hash {
                    if a.accepting[q] {
                        na + b.start
                    } else {
                        dead
                    }
                } else {
                    a.step(q, s)
                }
            } else if s == hash {
                dead
            } else {
                na + b.step(q - na, s)
            }
        },
    )
    .map(|d| d.trim())
}

/// Is `x` a subsequence of `z`?
pub fn is_subsequence(x: &[usize], z: &[usize]) -> bool {
    let mut it = z.iter();
    x.iter().all(|a| it.any(|b| b == a))
}

/// All words of length at most `max_len`, in shortlex order.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..k {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Shortlex comparison key.
pub fn shortlex(w: &[usize]) -> (usize, &[usize]) {
    (w.len(), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> LabelSet {
        LabelSet::parse("a b").unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(&ab(), s).unwrap()
    }

    fn forb(ws: &[&str]) -> Dfa {
        forb_string(&ws.iter().map(|s| w(s)).collect::<Vec<_>>(), &ab()).unwrap()
    }

    #[test]
    fn run_examples() {
        let m = forb(&["ab"]);
        assert_eq!(m.state_count(), 3);
        assert_eq!(m.run(&[]).unwrap(), m.start());
        // states: q0 = start, q1 after an a, dead after "ab"
        let q1 = m.run(&w("a")).unwrap();
        assert_eq!(m.run(&w("ba")).unwrap(), q1);
        assert_ne!(q1, m.start());
        assert!(m.is_accepting(q1));
        assert!(!m.accepts(&w("aab")).unwrap());
        for x in words_up_to(2, 3) {
            for y in words_up_to(2, 3) {
                let xy: Word = x.iter().chain(&y).copied().collect();
                assert_eq!(m.run(&xy).unwrap(), m.run_from(m.run(&x).unwrap(), &y));
            }
        }
        assert!(m.run(&[2]).is_err());
    }

    #[test]
    fn sup_string_matches_subsequence() {
        for pat in words_up_to(2, 3) {
            let s = sup_string(&pat, &ab()).unwrap();
            assert_eq!(s.state_count(), pat.len() + 1);
            for z in words_up_to(2, 5) {
                assert_eq!(s.accepts(&z).unwrap(), is_subsequence(&pat, &z));
            }
        }
        assert!(!sup_string(&w("aa"), &ab()).unwrap().accepts(&w("a")).unwrap());
        assert_eq!(sup_string(&w("ab"), &ab()).unwrap().empty_witness(), Some(w("ab")));
    }

    #[test]
    fn forb_examples() {
        let ba = forb(&["ab"]);
        let ab_or = forb(&["ab", "ba"]);
        let all = forb(&[]);
        for z in words_up_to(2, 6) {
            let first_b = z.iter().position(|&c| c == 1);
            let is_b_star_a_star = z.windows(2).all(|p| !(p[0] == 0 && p[1] == 1));
            assert_eq!(ba.accepts(&z).unwrap(), is_b_star_a_star, "{z:?}");
            let uniform = z.iter().all(|&c| c == 0) || z.iter().all(|&c| c == 1);
            assert_eq!(ab_or.accepts(&z).unwrap(), uniform);
            assert!(all.accepts(&z).unwrap());
            let _ = first_b;
        }
    }

    #[test]
    fn boolean_ops() {
        let a = forb(&["ab"]);
        let b = sup_string(&w("ba"), &ab()).unwrap();
        let cc = a.complement().complement();
        let i = a.intersection(&b).unwrap();
        let u = a.union(&b).unwrap();
        for z in words_up_to(2, 5) {
            let (x, y) = (a.accepts(&z).unwrap(), b.accepts(&z).unwrap());
            assert_eq!(cc.accepts(&z).unwrap(), x);
            assert_eq!(i.accepts(&z).unwrap(), x && y);
            assert_eq!(u.accepts(&z).unwrap(), x || y);
            assert_eq!(a.trim().accepts(&z).unwrap(), x);
            assert_eq!(i.minimize().accepts(&z).unwrap(), x && y);
        }
        let other = Dfa::universal(LabelSet::parse("a b c").unwrap());
        assert!(a.intersection(&other).is_err());
    }

    #[test]
    fn emptiness_witness() {
        let uniform = forb(&["ab", "ba"]);
        let sup_ab = sup_string(&w("ab"), &ab()).unwrap();
        assert_eq!(uniform.intersection(&sup_ab).unwrap().empty_witness(), None);
        let ba = forb(&["ab"]);
        let both = ba
            .intersection(&sup_string(&w("b"), &ab()).unwrap())
            .unwrap()
            .intersection(&sup_string(&w("a"), &ab()).unwrap())
            .unwrap();
        assert_eq!(both.empty_witness(), Some(w("ba")));
    }

    #[test]
    fn hash_pair() {
        let only_eps = forb(&["a", "b"]);
        let h = hash_pair_string(&only_eps, &only_eps).unwrap();
        let hash = 2;
        assert!(h.accepts(&[hash]).unwrap());
        assert!(!h.accepts(&[hash, hash]).unwrap());
        assert!(!h.accepts(&[0, hash]).unwrap());
        let h2 = hash_pair_string(&forb(&["ab"]), &Dfa::universal(ab())).unwrap();
        assert!(h2.accepts(&[1, 0, hash, 0, 1]).unwrap());
        assert!(!h2.accepts(&[0, 1, hash, 0, 1]).unwrap());
        assert!(!h2.accepts(&[0, 1]).unwrap());
        assert!(!h2.accepts(&[0, hash, 0, hash]).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let m = forb(&["ab"]);
        let back = Dfa::parse_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        let missing = "alphabet: a b\nstates: 1\nstart: 0\naccept: 0\ntrans: 0 a 0\n";
        assert!(Dfa::parse_text(missing).is_err());
        let conflicting = "alphabet: a\nstates: 2\nstart: 0\naccept:\ntrans: 0 a 0\ntrans: 0 a 1\ntrans: 1 a 1\n";
        match Dfa::parse_text(conflicting).unwrap_err() {
            JepError::Parse { line, .. } => assert_eq!(line, 6),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn word_formatting() {
        assert_eq!(format_word(&ab(), &[]), "ε");
        assert_eq!(format_word(&ab(), &w("ba")), "ba");
        let long = LabelSet::parse("foo bar").unwrap();
        assert_eq!(parse_word(&long, "bar foo").unwrap(), vec![1, 0]);
        assert_eq!(format_word(&long, &[1, 0]), "bar foo");
    }
}
