//! Reference automata for testing.
//!
//! Works from raw parse trees only and shares nothing with the background:
//! expressions become ε-free automata whose start state has no incoming
//! transition (so fragments compose by copying start transitions), extended
//! operators go through determinization and a product, and questions are
//! answered on subset-constructed machines. Meant for correctness, not
//! speed.

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::FxHashMap;

use crate::error::ParseError;
use crate::syntax::{parse_raw, RawExpr};

type StateSet = BTreeSet<usize>;

/// A nondeterministic automaton without ε-transitions.
#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet: Vec<char>,
    edges: Vec<Vec<(usize, usize)>>,
    finals: Vec<bool>,
    start: usize,
}

#[derive(Debug, Clone)]
struct Fragment {
    start: usize,
    finals: Vec<usize>,
}

struct Builder<'a> {
    alphabet: &'a [char],
    edges: Vec<Vec<(usize, usize)>>,
}

impl Builder<'_> {
    fn state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn copy_edges(&mut self, from: usize, to: usize) {
        let es = self.edges[from].clone();
        for e in es {
            if !self.edges[to].contains(&e) {
                self.edges[to].push(e);
            }
        }
    }

    fn build(&mut self, e: &RawExpr) -> Fragment {
        match e {
            RawExpr::Zero => {
                let s = self.state();
                Fragment { start: s, finals: vec![] }
            }
            RawExpr::One => {
                let s = self.state();
                Fragment { start: s, finals: vec![s] }
            }
            RawExpr::Letter(c) => {
                let sym = self.alphabet.iter().position(|x| x == c).expect("letter in alphabet");
                let s = self.state();
                let t = self.state();
                self.edges[s].push((sym, t));
                Fragment { start: s, finals: vec![t] }
            }
            RawExpr::Union(l, r) => {
                let a = self.build(l);
                let b = self.build(r);
                let s = self.state();
                self.copy_edges(a.start, s);
                self.copy_edges(b.start, s);
                let mut finals: Vec<usize> = Vec::new();
                let mut accepts_empty = false;
                for f in a.finals.iter().chain(&b.finals) {
                    if *f == a.start || *f == b.start {
                        accepts_empty = true;
                    } else {
                        finals.push(*f);
                    }
                }
                if accepts_empty {
                    finals.push(s);
                }
                Fragment { start: s, finals }
            }
            RawExpr::Concat(l, r) => {
                let a = self.build(l);
                let b = self.build(r);
                for &f in &a.finals {
                    self.copy_edges(b.start, f);
                }
                let b_empty = b.finals.contains(&b.start);
                let mut finals: Vec<usize> =
                    b.finals.iter().copied().filter(|&f| f != b.start).collect();
                if b_empty {
                    finals.extend_from_slice(&a.finals);
                }
                Fragment { start: a.start, finals }
            }
            RawExpr::Star(inner) => {
                let a = self.build(inner);
                for &f in &a.finals {
                    if f != a.start {
                        self.copy_edges(a.start, f);
                    }
                }
                let mut finals = a.finals.clone();
                if !finals.contains(&a.start) {
                    finals.push(a.start);
                }
                Fragment { start: a.start, finals }
            }
            RawExpr::Diff(l, r) | RawExpr::And(l, r) | RawExpr::SymDiff(l, r) => {
                let dl = Dfa::from_nfa(&Nfa::build(l, self.alphabet));
                let dr = Dfa::from_nfa(&Nfa::build(r, self.alphabet));
                let op = |x: bool, y: bool| match e {
                    RawExpr::Diff(..) => x && !y,
                    RawExpr::And(..) => x && y,
                    _ => x != y,
                };
                let p = dl.product(&dr, op);
                self.embed(&p)
            }
        }
    }

    /// Copies a deterministic machine in, behind a fresh start state.
    fn embed(&mut self, d: &Dfa) -> Fragment {
        let base = self.edges.len();
        for _ in 0..d.len() {
            self.state();
        }
        for (q, row) in d.next.iter().enumerate() {
            for (sym, &t) in row.iter().enumerate() {
                self.edges[base + q].push((sym, base + t));
            }
        }
        let s = self.state();
        self.copy_edges(base + d.start, s);
        let mut finals: Vec<usize> = (0..d.len())
            .filter(|&q| d.accepting[q])
            .map(|q| base + q)
            .collect();
        if d.accepting[d.start] {
            finals.push(s);
        }
        Fragment { start: s, finals }
    }
}

impl Nfa {
    /// Automaton of `e` over `alphabet`, which must contain every letter of `e`.
    pub fn build(e: &RawExpr, alphabet: &[char]) -> Nfa {
        let mut b = Builder {
            alphabet,
            edges: Vec::new(),
        };
        let frag = b.build(e);
        let mut finals = vec![false; b.edges.len()];
        for f in frag.finals {
            finals[f] = true;
        }
        Nfa {
            alphabet: alphabet.to_vec(),
            edges: b.edges,
            finals,
            start: frag.start,
        }
    }

    fn step(&self, set: &StateSet, sym: usize) -> StateSet {
        let mut out = StateSet::new();
        for &q in set {
            for &(s, t) in &self.edges[q] {
                if s == sym {
                    out.insert(t);
                }
            }
        }
        out
    }

    fn accepts_set(&self, set: &StateSet) -> bool {
        set.iter().any(|&q| self.finals[q])
    }

    pub fn accepts(&self, word: &str) -> bool {
        let mut cur = StateSet::from([self.start]);
        for c in word.chars() {
            let Some(sym) = self.alphabet.iter().position(|&x| x == c) else {
                return false;
            };
            cur = self.step(&cur, sym);
        }
        self.accepts_set(&cur)
    }
}

/// A complete deterministic automaton over the reachable subsets.
#[derive(Debug, Clone)]
pub struct Dfa {
    next: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    start: usize,
}

impl Dfa {
    pub fn from_nfa(nfa: &Nfa) -> Dfa {
        let k = nfa.alphabet.len();
        let mut ids: FxHashMap<StateSet, usize> = FxHashMap::default();
        let mut sets: Vec<StateSet> = Vec::new();
        let start = StateSet::from([nfa.start]);
        ids.insert(start.clone(), 0);
        sets.push(start);
        let mut next: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = Vec::with_capacity(k);
            for sym in 0..k {
                let t = nfa.step(&sets[i], sym);
                let id = match ids.get(&t) {
                    Some(&id) => id,
                    None => {
                        ids.insert(t.clone(), sets.len());
                        sets.push(t);
                        sets.len() - 1
                    }
                };
                row.push(id);
            }
            next.push(row);
            i += 1;
        }
        let accepting = sets.iter().map(|s| nfa.accepts_set(s)).collect();
        Dfa {
            next,
            accepting,
            start: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    /// Reachable part of the synchronous product.
    fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Dfa {
        let k = self.next.first().map_or(0, Vec::len);
        let mut ids: FxHashMap<(usize, usize), usize> = FxHashMap::default();
        let mut pairs = vec![(self.start, other.start)];
        ids.insert(pairs[0], 0);
        let mut next = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let mut row = Vec::with_capacity(k);
            for sym in 0..k {
                let t = (self.next[p][sym], other.next[q][sym]);
                let id = *ids.entry(t).or_insert_with(|| {
                    pairs.push(t);
                    pairs.len() - 1
                });
                row.push(id);
            }
            next.push(row);
            i += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(p, q)| op(self.accepting[p], other.accepting[q]))
            .collect();
        Dfa {
            next,
            accepting,
            start: 0,
        }
    }

    /// Number of states of the minimal complete automaton.
    pub fn minimal_states(&self) -> usize {
        let n = self.len();
        let mut block: Vec<usize> = self.accepting.iter().map(|&a| a as usize).collect();
        let mut count = block.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut ids: FxHashMap<Vec<usize>, usize> = FxHashMap::default();
            let mut nb = vec![0; n];
            for q in 0..n {
                let mut sig = vec![block[q]];
                sig.extend(self.next[q].iter().map(|&t| block[t]));
                let fresh = ids.len();
                nb[q] = *ids.entry(sig).or_insert(fresh);
            }
            block = nb;
            if ids.len() == count {
                return count;
            }
            count = ids.len();
        }
    }
}

fn alphabet_of(exprs: &[&RawExpr]) -> Vec<char> {
    let mut out: Vec<char> = Vec::new();
    for e in exprs {
        for c in e.letters() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// Language equality. On inequality, returns a shortest word in exactly one
/// of the two languages.
pub fn equal_with_witness(t1: &str, t2: &str) -> Result<Option<String>, ParseError> {
    let (e1, e2) = (parse_raw(t1)?, parse_raw(t2)?);
    let alphabet = alphabet_of(&[&e1, &e2]);
    let d1 = Dfa::from_nfa(&Nfa::build(&e1, &alphabet));
    let d2 = Dfa::from_nfa(&Nfa::build(&e2, &alphabet));
    Ok(distinguish(&d1, &d2, &alphabet, usize::MAX))
}

fn distinguish(d1: &Dfa, d2: &Dfa, alphabet: &[char], max_len: usize) -> Option<String> {
    let mut parent: FxHashMap<(usize, usize), Option<((usize, usize), char)>> =
        FxHashMap::default();
    let start = (d1.start, d2.start);
    parent.insert(start, None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some(((p, q), len)) = queue.pop_front() {
        if d1.accepting[p] != d2.accepting[q] {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, c))) = parent.get(&cur) {
                word.push(*c);
                cur = *prev;
            }
            return Some(word.into_iter().rev().collect());
        }
        if len >= max_len {
            continue;
        }
        for (sym, &c) in alphabet.iter().enumerate() {
            let t = (d1.next[p][sym], d2.next[q][sym]);
            if !parent.contains_key(&t) {
                parent.insert(t, Some(((p, q), c)));
                queue.push_back((t, len + 1));
            }
        }
    }
    None
}

/// True iff both texts denote the same language.
pub fn oracle_equal(t1: &str, t2: &str) -> Result<bool, ParseError> {
    Ok(equal_with_witness(t1, t2)?.is_none())
}

/// True iff every word of `t1` is a word of `t2`.
pub fn oracle_includes(t1: &str, t2: &str) -> Result<bool, ParseError> {
    let (e1, e2) = (parse_raw(t1)?, parse_raw(t2)?);
    let alphabet = alphabet_of(&[&e1, &e2]);
    let d1 = Dfa::from_nfa(&Nfa::build(&e1, &alphabet));
    let d2 = Dfa::from_nfa(&Nfa::build(&e2, &alphabet));
    let diff = d1.product(&d2, |x, y| x && !y);
    Ok(diff.accepting.iter().all(|&a| !a))
}

/// Membership of `word` by direct simulation.
pub fn oracle_member(t: &str, word: &str) -> Result<bool, ParseError> {
    let e = parse_raw(t)?;
    let mut alphabet = alphabet_of(&[&e]);
    for c in word.chars() {
        if !alphabet.contains(&c) {
            alphabet.push(c);
        }
    }
    Ok(Nfa::build(&e, &alphabet).accepts(word))
}

/// States of the minimal complete automaton over the letters of `t`,
/// a reachable dead state included.
pub fn oracle_min_states(t: &str) -> Result<usize, ParseError> {
    let e = parse_raw(t)?;
    let alphabet = alphabet_of(&[&e]);
    Ok(Dfa::from_nfa(&Nfa::build(&e, &alphabet)).minimal_states())
}

/// As [`oracle_min_states`] over a given alphabet, which must contain the
/// letters of `t`.
pub fn oracle_min_states_over(t: &str, alphabet: &[char]) -> Result<usize, ParseError> {
    let e = parse_raw(t)?;
    Ok(Dfa::from_nfa(&Nfa::build(&e, alphabet)).minimal_states())
}

/// Compares the two languages on words up to `max_len` letters only, by a
/// breadth-first walk over pairs of state sets. For expressions whose full
/// deterministic machines are too large to build.
pub fn oracle_equal_up_to(t1: &str, t2: &str, max_len: usize) -> Result<Option<String>, ParseError> {
    let (e1, e2) = (parse_raw(t1)?, parse_raw(t2)?);
    let alphabet = alphabet_of(&[&e1, &e2]);
    let n1 = Nfa::build(&e1, &alphabet);
    let n2 = Nfa::build(&e2, &alphabet);
    let start = (StateSet::from([n1.start]), StateSet::from([n2.start]));
    let mut seen: FxHashMap<(StateSet, StateSet), ()> = FxHashMap::default();
    seen.insert(start.clone(), ());
    let mut queue = VecDeque::from([(start, String::new())]);
    while let Some(((s1, s2), word)) = queue.pop_front() {
        if n1.accepts_set(&s1) != n2.accepts_set(&s2) {
            return Ok(Some(word));
        }
        if word.chars().count() >= max_len {
            continue;
        }
        for (sym, &c) in alphabet.iter().enumerate() {
            let t = (n1.step(&s1, sym), n2.step(&s2, sym));
            if !seen.contains_key(&t) {
                seen.insert(t.clone(), ());
                let mut w = word.clone();
                w.push(c);
                queue.push_back((t, w));
            }
        }
    }
    Ok(None)
}
