//! Finite automata over the tagged alphabet `{1,2} × Σ`.
//!
//! Automata are partial by default; [`Dfa::complete`] adds a sink on demand.
//! Every construction explores states in breadth-first order with sorted
//! successors, so state numbering and names are stable across runs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Reserved symbol used for both endmarkers (on the input and on the output tape).
pub const ENDMARK: char = '⊣';

pub type StateId = usize;

/// Tape tag of a letter: `1` is input, `2` is output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tape {
    Input,
    Output,
}

impl Tape {
    pub fn other(self) -> Tape {
        match self {
            Tape::Input => Tape::Output,
            Tape::Output => Tape::Input,
        }
    }

    pub fn digit(self) -> char {
        match self {
            Tape::Input => '1',
            Tape::Output => '2',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedLetter {
    pub tape: Tape,
    pub symbol: char,
}

impl TaggedLetter {
    pub fn new(tape: Tape, symbol: char) -> Self {
        TaggedLetter { tape, symbol }
    }
    pub fn input(symbol: char) -> Self {
        Self::new(Tape::Input, symbol)
    }
    pub fn output(symbol: char) -> Self {
        Self::new(Tape::Output, symbol)
    }
    pub fn is_input(&self) -> bool {
        self.tape == Tape::Input
    }
}

impl fmt::Display for TaggedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tape.digit(), self.symbol)
    }
}

/// A synchronization: a word over tagged letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncWord(pub Vec<TaggedLetter>);

impl SyncWord {
    pub fn new(letters: Vec<TaggedLetter>) -> Self {
        SyncWord(letters)
    }

    /// Parses the compact notation `1a2d1b`: every letter is preceded by its tape digit.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() % 2 != 0 {
            return Err(Error::Parse(format!("odd length sync word '{s}'")));
        }
        let mut out = Vec::new();
        for pair in chars.chunks(2) {
            let tape = match pair[0] {
                '1' => Tape::Input,
                '2' => Tape::Output,
                c => return Err(Error::Parse(format!("bad tape tag '{c}' in '{s}'"))),
            };
            out.push(TaggedLetter::new(tape, pair[1]));
        }
        Ok(SyncWord(out))
    }

    /// Convolution of a tag word with a symbol word of the same length.
    pub fn convolve(tags: &[Tape], symbols: &[char]) -> Option<Self> {
        if tags.len() != symbols.len() {
            return None;
        }
        Some(SyncWord(
            tags.iter()
                .zip(symbols)
                .map(|(&t, &s)| TaggedLetter::new(t, s))
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn letters(&self) -> &[TaggedLetter] {
        &self.0
    }

    pub fn tags(&self) -> Vec<Tape> {
        self.0.iter().map(|l| l.tape).collect()
    }

    pub fn project(&self, tape: Tape) -> String {
        self.0
            .iter()
            .filter(|l| l.tape == tape)
            .map(|l| l.symbol)
            .collect()
    }

    /// The pair `(π_i(w), π_o(w))` this word synchronizes.
    pub fn decode(&self) -> (String, String) {
        (self.project(Tape::Input), self.project(Tape::Output))
    }

    /// Inverse of [`decode`](Self::decode) given the tag sequence.
    pub fn recompose(tags: &[Tape], input: &str, output: &str) -> Option<Self> {
        let mut ins = input.chars();
        let mut outs = output.chars();
        let mut letters = Vec::with_capacity(tags.len());
        for &t in tags {
            let c = match t {
                Tape::Input => ins.next()?,
                Tape::Output => outs.next()?,
            };
            letters.push(TaggedLetter::new(t, c));
        }
        if ins.next().is_some() || outs.next().is_some() {
            return None;
        }
        Some(SyncWord(letters))
    }

    pub fn concat(&self, other: &SyncWord) -> SyncWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SyncWord(v)
    }
}

impl fmt::Display for SyncWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for l in &self.0 {
            write!(f, "{}{}", l.tape.digit(), l.symbol)?;
        }
        Ok(())
    }
}

/// Pure-tape word as tagged letters.
pub fn tape_word(tape: Tape, s: &str) -> Vec<TaggedLetter> {
    s.chars().map(|c| TaggedLetter::new(tape, c)).collect()
}

/// Base alphabets of the two tapes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    pub input: BTreeSet<char>,
    pub output: BTreeSet<char>,
}

impl Alphabet {
    pub fn new(input: &str, output: &str) -> Self {
        Alphabet {
            input: input.chars().collect(),
            output: output.chars().collect(),
        }
    }

    pub fn letters(&self) -> Vec<TaggedLetter> {
        let mut v: Vec<TaggedLetter> = self.input.iter().map(|&c| TaggedLetter::input(c)).collect();
        v.extend(self.output.iter().map(|&c| TaggedLetter::output(c)));
        v
    }

    pub fn tape_letters(&self, tape: Tape) -> Vec<TaggedLetter> {
        let set = match tape {
            Tape::Input => &self.input,
            Tape::Output => &self.output,
        };
        set.iter().map(|&c| TaggedLetter::new(tape, c)).collect()
    }

    pub fn contains(&self, l: TaggedLetter) -> bool {
        match l.tape {
            Tape::Input => self.input.contains(&l.symbol),
            Tape::Output => self.output.contains(&l.symbol),
        }
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet {
            input: self.input.union(&other.input).copied().collect(),
            output: self.output.union(&other.output).copied().collect(),
        }
    }

    pub fn input_only(&self) -> Alphabet {
        Alphabet { input: self.input.clone(), output: BTreeSet::new() }
    }
}

/// Nondeterministic automaton with a single initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub alphabet: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: Vec<bool>,
    delta: Vec<BTreeMap<TaggedLetter, BTreeSet<StateId>>>,
}

impl Nfa {
    /// An automaton with one (initial, non-final) state.
    pub fn new(alphabet: Alphabet) -> Self {
        let mut a = Nfa { alphabet, names: Vec::new(), initial: 0, finals: Vec::new(), delta: Vec::new() };
        a.add_state("q0");
        a
    }

    pub fn empty_with_states(alphabet: Alphabet) -> Self {
        Nfa { alphabet, names: Vec::new(), initial: 0, finals: Vec::new(), delta: Vec::new() }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.finals.push(false);
        self.delta.push(BTreeMap::new());
        self.names.len() - 1
    }

    pub fn add_transition(&mut self, from: StateId, letter: TaggedLetter, to: StateId) {
        self.delta[from].entry(letter).or_default().insert(to);
    }

    pub fn set_final(&mut self, q: StateId, yes: bool) {
        self.finals[q] = yes;
    }
    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }
    pub fn set_name(&mut self, q: StateId, name: impl Into<String>) {
        self.names[q] = name.into();
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }
    pub fn num_states(&self) -> usize {
        self.names.len()
    }
    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }
    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }
    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.finals[q])
    }
    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn out(&self, q: StateId) -> &BTreeMap<TaggedLetter, BTreeSet<StateId>> {
        &self.delta[q]
    }

    pub fn successors(&self, q: StateId, l: TaggedLetter) -> impl Iterator<Item = StateId> + '_ {
        self.delta[q].get(&l).into_iter().flat_map(|s| s.iter().copied())
    }

    /// All transitions in (from, letter, to) order.
    pub fn transitions(&self) -> Vec<(StateId, TaggedLetter, StateId)> {
        let mut v = Vec::new();
        for (q, m) in self.delta.iter().enumerate() {
            for (&l, tos) in m {
                for &t in tos {
                    v.push((q, l, t));
                }
            }
        }
        v
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(|m| m.values().map(|s| s.len()).sum::<usize>()).sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().all(|m| m.values().all(|s| s.len() <= 1))
    }

    pub fn step(&self, set: &BTreeSet<StateId>, l: TaggedLetter) -> BTreeSet<StateId> {
        set.iter().flat_map(|&q| self.successors(q, l)).collect()
    }

    pub fn reach_set(&self, word: &[TaggedLetter]) -> BTreeSet<StateId> {
        let mut cur = BTreeSet::from([self.initial]);
        for &l in word {
            cur = self.step(&cur, l);
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    pub fn accepts(&self, word: &[TaggedLetter]) -> bool {
        self.reach_set(word).iter().any(|&q| self.finals[q])
    }

    pub fn accepts_word(&self, w: &SyncWord) -> bool {
        self.accepts(&w.0)
    }

    /// Letters used by transitions, plus the declared alphabet.
    pub fn letters(&self) -> Vec<TaggedLetter> {
        let mut s: BTreeSet<TaggedLetter> = self.alphabet.letters().into_iter().collect();
        for m in &self.delta {
            s.extend(m.keys().copied());
        }
        s.into_iter().collect()
    }

    pub fn with_initial(&self, q: StateId) -> Nfa {
        let mut a = self.clone();
        a.initial = q;
        a
    }

    /// States reachable from `q` (including `q`) using only letters of `tape`.
    pub fn tape_closure(&self, q: StateId, tape: Tape) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for (l, tos) in &self.delta[p] {
                if l.tape == tape {
                    for &t in tos {
                        if seen.insert(t) {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        seen
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(p) = stack.pop() {
            for tos in self.delta[p].values() {
                for &t in tos {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, _, t) in self.transitions() {
            rev[t].push(q);
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<StateId> = self.finals().collect();
        while let Some(p) = stack.pop() {
            for &q in &rev[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen
    }

    /// Keeps the states given by `keep` (the initial state is always kept).
    pub fn restrict(&self, keep: &[bool]) -> Nfa {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut out = Nfa::empty_with_states(self.alphabet.clone());
        for q in self.states() {
            if keep[q] || q == self.initial {
                map[q] = out.add_state(self.names[q].clone());
                out.finals[map[q]] = self.finals[q];
            }
        }
        out.initial = map[self.initial];
        for (q, l, t) in self.transitions() {
            if map[q] != usize::MAX && map[t] != usize::MAX && keep[q] && keep[t] {
                out.add_transition(map[q], l, map[t]);
            }
        }
        out
    }

    /// Renames states `s0, s1, …` in their current order.
    pub fn renamed(mut self, prefix: &str) -> Nfa {
        for (i, n) in self.names.iter_mut().enumerate() {
            *n = format!("{prefix}{i}");
        }
        self
    }

    pub fn to_dfa(&self) -> Option<Dfa> {
        if !self.is_deterministic() {
            return None;
        }
        let delta = self
            .delta
            .iter()
            .map(|m| m.iter().map(|(&l, s)| (l, *s.iter().next().unwrap())).collect())
            .collect();
        Some(Dfa {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initial: self.initial,
            finals: self.finals.clone(),
            delta,
        })
    }
}

/// Deterministic automaton; partial unless [`Dfa::complete`] was applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    names: Vec<String>,
    initial: StateId,
    finals: Vec<bool>,
    delta: Vec<BTreeMap<TaggedLetter, StateId>>,
}

impl Dfa {
    pub fn new(alphabet: Alphabet) -> Self {
        let mut d = Dfa { alphabet, names: Vec::new(), initial: 0, finals: Vec::new(), delta: Vec::new() };
        d.add_state("q0");
        d
    }

    pub fn empty_with_states(alphabet: Alphabet) -> Self {
        Dfa { alphabet, names: Vec::new(), initial: 0, finals: Vec::new(), delta: Vec::new() }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.finals.push(false);
        self.delta.push(BTreeMap::new());
        self.names.len() - 1
    }

    /// Sets `δ(from, letter) = to`, replacing an existing transition.
    pub fn set_transition(&mut self, from: StateId, letter: TaggedLetter, to: StateId) {
        self.delta[from].insert(letter, to);
    }

    pub fn set_final(&mut self, q: StateId, yes: bool) {
        self.finals[q] = yes;
    }
    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }
    pub fn set_name(&mut self, q: StateId, name: impl Into<String>) {
        self.names[q] = name.into();
    }
    pub fn initial(&self) -> StateId {
        self.initial
    }
    pub fn num_states(&self) -> usize {
        self.names.len()
    }
    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }
    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }
    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }
    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&q| self.finals[q])
    }
    pub fn out(&self, q: StateId) -> &BTreeMap<TaggedLetter, StateId> {
        &self.delta[q]
    }

    pub fn delta(&self, q: StateId, l: TaggedLetter) -> Option<StateId> {
        self.delta[q].get(&l).copied()
    }

    /// `δ*(q, w)`, `None` when the run blocks.
    pub fn run_from(&self, q: StateId, word: &[TaggedLetter]) -> Option<StateId> {
        word.iter().try_fold(q, |p, &l| self.delta(p, l))
    }

    pub fn run(&self, word: &[TaggedLetter]) -> Option<StateId> {
        self.run_from(self.initial, word)
    }

    pub fn accepts(&self, word: &[TaggedLetter]) -> bool {
        self.run(word).is_some_and(|q| self.finals[q])
    }

    pub fn transitions(&self) -> Vec<(StateId, TaggedLetter, StateId)> {
        let mut v = Vec::new();
        for (q, m) in self.delta.iter().enumerate() {
            for (&l, &t) in m {
                v.push((q, l, t));
            }
        }
        v
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(|m| m.len()).sum()
    }

    pub fn is_complete(&self) -> bool {
        let letters = self.alphabet.letters();
        self.delta.iter().all(|m| letters.iter().all(|l| m.contains_key(l)))
            && self.delta.iter().all(|m| m.keys().all(|l| self.alphabet.contains(*l)))
    }

    /// Totalizes over the declared alphabet with a fresh sink when needed.
    pub fn complete(&self) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let mut d = self.clone();
        for l in d.letters() {
            d.alphabet.input.extend((l.tape == Tape::Input).then_some(l.symbol));
            d.alphabet.output.extend((l.tape == Tape::Output).then_some(l.symbol));
        }
        let sink = d.add_state("⊥");
        let letters = d.alphabet.letters();
        for q in d.states() {
            for &l in &letters {
                d.delta[q].entry(l).or_insert(sink);
            }
        }
        d
    }

    pub fn letters(&self) -> Vec<TaggedLetter> {
        let mut s: BTreeSet<TaggedLetter> = self.alphabet.letters().into_iter().collect();
        for m in &self.delta {
            s.extend(m.keys().copied());
        }
        s.into_iter().collect()
    }

    pub fn to_nfa(&self) -> Nfa {
        Nfa {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initial: self.initial,
            finals: self.finals.clone(),
            delta: self
                .delta
                .iter()
                .map(|m| m.iter().map(|(&l, &t)| (l, BTreeSet::from([t]))).collect())
                .collect(),
        }
    }

    /// Reachable and co-reachable part; stays deterministic.
    pub fn trim(&self) -> Dfa {
        trim(&self.to_nfa()).to_dfa().expect("trim preserves determinism")
    }

    pub fn with_initial(&self, q: StateId) -> Dfa {
        let mut d = self.clone();
        d.initial = q;
        d
    }
}

/// Minimal trimmed DFA by Moore partition refinement; missing transitions
/// count as going to an implicit sink. States are named `m0, m1, …`
/// in breadth-first order.
pub fn minimize(d: &Dfa) -> Dfa {
    let d = d.trim();
    let letters = d.letters();
    let mut class: Vec<usize> = d.states().map(|q| usize::from(d.is_final(q))).collect();
    loop {
        let mut sig: BTreeMap<(usize, Vec<Option<usize>>), usize> = BTreeMap::new();
        let next: Vec<usize> = d
            .states()
            .map(|q| {
                let key = (class[q], letters.iter().map(|&l| d.delta(q, l).map(|t| class[t])).collect());
                let n = sig.len();
                *sig.entry(key).or_insert(n)
            })
            .collect();
        let stable = sig.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }
    let mut order: BTreeMap<usize, StateId> = BTreeMap::new();
    let mut out = Dfa::empty_with_states(d.alphabet.clone());
    let mut queue = std::collections::VecDeque::from([d.initial()]);
    let mut rep: Vec<StateId> = Vec::new();
    order.insert(class[d.initial()], 0);
    out.add_state("m0");
    rep.push(d.initial());
    while let Some(q) = queue.pop_front() {
        let id = order[&class[q]];
        out.set_final(id, d.is_final(q));
        for &l in &letters {
            if let Some(t) = d.delta(q, l) {
                let tid = match order.get(&class[t]) {
                    Some(&x) => x,
                    None => {
                        let x = out.add_state(format!("m{}", rep.len()));
                        order.insert(class[t], x);
                        rep.push(t);
                        queue.push_back(t);
                        x
                    }
                };
                out.set_transition(id, l, tid);
            }
        }
    }
    out
}

/// Breadth-first construction of an automaton from an implicit state space.
///
/// `succ` lists the outgoing transitions of a state; order within the list is
/// irrelevant. States are numbered in discovery order.
pub fn explore<S, F, G>(alphabet: Alphabet, init: S, mut succ: F, mut is_final: G, cap: usize) -> Result<(Nfa, Vec<S>)>
where
    S: Clone + Ord,
    F: FnMut(&S) -> Vec<(TaggedLetter, S)>,
    G: FnMut(&S) -> bool,
{
    let mut index: BTreeMap<S, StateId> = BTreeMap::new();
    let mut order: Vec<S> = Vec::new();
    let mut nfa = Nfa::empty_with_states(alphabet);
    index.insert(init.clone(), 0);
    order.push(init);
    nfa.add_state("s0");
    let mut next = 0;
    while next < order.len() {
        let cur = order[next].clone();
        let fin = is_final(&cur);
        nfa.set_final(next, fin);
        let mut edges = succ(&cur);
        edges.sort();
        edges.dedup();
        for (l, s) in edges {
            let id = match index.get(&s) {
                Some(&id) => id,
                None => {
                    if order.len() >= cap {
                        return Err(Error::StateCapExceeded { what: "automaton".into(), cap });
                    }
                    let id = order.len();
                    index.insert(s.clone(), id);
                    order.push(s);
                    nfa.add_state(format!("s{id}"));
                    id
                }
            };
            nfa.add_transition(next, l, id);
        }
        next += 1;
    }
    Ok((nfa, order))
}

/// Default cap on explored state spaces.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

/// Subset construction. States are named by the sorted subset they stand for.
pub fn determinize(a: &Nfa) -> Dfa {
    let init: BTreeSet<StateId> = BTreeSet::from([a.initial()]);
    let letters = a.letters();
    let (nfa, order) = explore(
        a.alphabet.clone(),
        init,
        |set| {
            letters
                .iter()
                .filter_map(|&l| {
                    let next = a.step(set, l);
                    (!next.is_empty()).then_some((l, next))
                })
                .collect()
        },
        |set| set.iter().any(|&q| a.is_final(q)),
        usize::MAX,
    )
    .expect("uncapped");
    let mut d = nfa.to_dfa().expect("subset construction is deterministic");
    for (i, set) in order.iter().enumerate() {
        let parts: Vec<&str> = set.iter().map(|&q| a.name(q)).collect();
        d.names[i] = format!("{{{}}}", parts.join(","));
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    Intersect,
    /// Union; both operands are completed with a sink first.
    Union,
}

/// Synchronous product of two automata.
pub fn product(a: &Nfa, b: &Nfa, mode: ProductMode) -> Nfa {
    const SINK: StateId = usize::MAX;
    let alphabet = a.alphabet.union(&b.alphabet);
    let mut letters: BTreeSet<TaggedLetter> = a.letters().into_iter().collect();
    letters.extend(b.letters());
    let letters: Vec<TaggedLetter> = letters.into_iter().collect();
    let succ_of = |x: &Nfa, q: StateId, l: TaggedLetter| -> Vec<StateId> {
        if q == SINK {
            return vec![SINK];
        }
        let v: Vec<StateId> = x.successors(q, l).collect();
        if v.is_empty() && mode == ProductMode::Union {
            vec![SINK]
        } else {
            v
        }
    };
    let fin = |x: &Nfa, q: StateId| q != SINK && x.is_final(q);
    let (nfa, order) = explore(
        alphabet,
        (a.initial(), b.initial()),
        |&(p, q)| {
            let mut v = Vec::new();
            for &l in &letters {
                for p2 in succ_of(a, p, l) {
                    for &q2 in &succ_of(b, q, l) {
                        if !(p2 == SINK && q2 == SINK) {
                            v.push((l, (p2, q2)));
                        }
                    }
                }
            }
            v
        },
        |&(p, q)| match mode {
            ProductMode::Intersect => fin(a, p) && fin(b, q),
            ProductMode::Union => fin(a, p) || fin(b, q),
        },
        usize::MAX,
    )
    .expect("uncapped");
    let mut nfa = nfa;
    let nm = |x: &Nfa, q: StateId| if q == SINK { "⊥".to_string() } else { x.name(q).to_string() };
    for (i, &(p, q)) in order.iter().enumerate() {
        nfa.names[i] = format!("({},{})", nm(a, p), nm(b, q));
    }
    nfa
}

pub fn intersect(a: &Nfa, b: &Nfa) -> Nfa {
    product(a, b, ProductMode::Intersect)
}

pub fn union(a: &Nfa, b: &Nfa) -> Nfa {
    product(a, b, ProductMode::Union)
}

/// Complement of a complete DFA.
pub fn complement(d: &Dfa) -> Result<Dfa> {
    if !d.is_complete() {
        return Err(Error::NotComplete);
    }
    let mut c = d.clone();
    for q in c.states() {
        c.finals[q] = !c.finals[q];
    }
    Ok(c)
}

fn bfs_witness<S: Clone + Ord>(
    init: S,
    mut succ: impl FnMut(&S) -> Vec<(TaggedLetter, S)>,
    mut goal: impl FnMut(&S) -> bool,
) -> Option<SyncWord> {
    let mut parent: BTreeMap<S, Option<(S, TaggedLetter)>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    parent.insert(init.clone(), None);
    queue.push_back(init);
    while let Some(cur) = queue.pop_front() {
        if goal(&cur) {
            let mut word = Vec::new();
            let mut at = cur;
            while let Some(Some((p, l))) = parent.get(&at).cloned() {
                word.push(l);
                at = p;
            }
            word.reverse();
            return Some(SyncWord(word));
        }
        let mut edges = succ(&cur);
        edges.sort();
        for (l, s) in edges {
            if !parent.contains_key(&s) {
                parent.insert(s.clone(), Some((cur.clone(), l)));
                queue.push_back(s);
            }
        }
    }
    None
}

/// A shortest accepted word, or `None` when the language is empty.
pub fn shortest_word(a: &Nfa) -> Option<SyncWord> {
    bfs_witness(
        a.initial(),
        |&q| a.out(q).iter().flat_map(|(&l, ts)| ts.iter().map(move |&t| (l, t))).collect(),
        |&q| a.is_final(q),
    )
}

pub fn is_empty(a: &Nfa) -> bool {
    shortest_word(a).is_none()
}

/// Keeps exactly the reachable and co-reachable states (and the initial state).
pub fn trim(a: &Nfa) -> Nfa {
    let r = a.reachable();
    let c = a.coreachable();
    let keep: Vec<bool> = r.iter().zip(&c).map(|(x, y)| *x && *y).collect();
    a.restrict(&keep)
}

/// `Ok(())` if `L(a) ⊆ L(b)`, otherwise a shortest word of `L(a) \ L(b)`.
pub fn inclusion(a: &Nfa, b: &Nfa) -> std::result::Result<(), SyncWord> {
    let letters = a.letters();
    let init = (a.initial(), BTreeSet::from([b.initial()]));
    match bfs_witness(
        init,
        |(p, set)| {
            let mut v = Vec::new();
            for &l in &letters {
                let next = b.step(set, l);
                for p2 in a.successors(*p, l) {
                    v.push((l, (p2, next.clone())));
                }
            }
            v
        },
        |(p, set)| a.is_final(*p) && !set.iter().any(|&q| b.is_final(q)),
    ) {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

/// Language equality, with a shortest word in the symmetric difference.
pub fn equivalent(a: &Nfa, b: &Nfa) -> std::result::Result<(), SyncWord> {
    let x = inclusion(a, b).err();
    let y = inclusion(b, a).err();
    match (x, y) {
        (None, None) => Ok(()),
        (Some(w), None) | (None, Some(w)) => Err(w),
        (Some(w1), Some(w2)) => Err(if w1.len() <= w2.len() { w1 } else { w2 }),
    }
}

/// Concatenation `L(a)·L(b)` without ε-transitions.
pub fn concat(a: &Nfa, b: &Nfa) -> Nfa {
    let mut out = Nfa::empty_with_states(a.alphabet.union(&b.alphabet));
    for q in a.states() {
        out.add_state(format!("L.{}", a.name(q)));
    }
    let off = a.num_states();
    for q in b.states() {
        out.add_state(format!("R.{}", b.name(q)));
    }
    out.initial = a.initial();
    for (q, l, t) in a.transitions() {
        out.add_transition(q, l, t);
    }
    for (q, l, t) in b.transitions() {
        out.add_transition(q + off, l, t + off);
    }
    let b0_final = b.is_final(b.initial());
    for q in a.finals().collect::<Vec<_>>() {
        for (&l, ts) in b.out(b.initial()) {
            for &t in ts {
                out.add_transition(q, l, t + off);
            }
        }
        if b0_final {
            out.finals[q] = true;
        }
    }
    for q in b.finals() {
        out.finals[q + off] = true;
    }
    trim(&out)
}

/// The input automaton: accepts `π_i(L(a))`, as an automaton over input letters.
///
/// Final states are closed under pure-output reachability so that trailing
/// output letters do not get lost.
pub fn project_input(a: &Nfa) -> Nfa {
    let mut out = Nfa::empty_with_states(a.alphabet.input_only());
    for q in a.states() {
        out.add_state(a.name(q).to_string());
    }
    out.initial = a.initial();
    let closures: Vec<BTreeSet<StateId>> = a.states().map(|q| a.tape_closure(q, Tape::Output)).collect();
    for q in a.states() {
        out.finals[q] = closures[q].iter().any(|&p| a.is_final(p));
        for &p in &closures[q] {
            for (&l, ts) in a.out(p) {
                if l.tape != Tape::Input {
                    continue;
                }
                for &t in ts {
                    for &t2 in &closures[t] {
                        out.add_transition(q, l, t2);
                    }
                }
            }
        }
    }
    trim(&out)
}

/// Adds endmarkers: accepts `w₁(1,⊣)w₂(2,⊣)` for `w₁w₂ ∈ L(a)` with `w₂`
/// output-only. Outputs after the last input may sit on either side of `(1,⊣)`.
pub fn add_endmarkers(a: &Nfa) -> Result<Nfa> {
    for l in a.letters() {
        if l.symbol == ENDMARK {
            return Err(Error::ReservedSymbolClash { symbol: ENDMARK });
        }
    }
    let mut alphabet = a.alphabet.clone();
    alphabet.input.insert(ENDMARK);
    alphabet.output.insert(ENDMARK);
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum St {
        Pre(StateId),
        Post(StateId),
        Done,
    }
    let (nfa, order) = explore(
        alphabet,
        St::Pre(a.initial()),
        |st| {
            let mut v = Vec::new();
            match *st {
                St::Pre(q) => {
                    for (&l, ts) in a.out(q) {
                        v.extend(ts.iter().map(|&t| (l, St::Pre(t))));
                    }
                    v.push((TaggedLetter::input(ENDMARK), St::Post(q)));
                }
                St::Post(q) => {
                    for (&l, ts) in a.out(q) {
                        if l.tape == Tape::Output {
                            v.extend(ts.iter().map(|&t| (l, St::Post(t))));
                        }
                    }
                    if a.is_final(q) {
                        v.push((TaggedLetter::output(ENDMARK), St::Done));
                    }
                }
                St::Done => {}
            }
            v
        },
        |st| *st == St::Done,
        usize::MAX,
    )?;
    let mut nfa = nfa;
    for (i, st) in order.iter().enumerate() {
        nfa.names[i] = match *st {
            St::Pre(q) => a.name(q).to_string(),
            St::Post(q) => format!("{}'", a.name(q)),
            St::Done => "⊣".into(),
        };
    }
    Ok(trim(&nfa))
}

/// Whether the letters of `a` include both endmarkers.
pub fn is_endmarked(a: &Nfa) -> bool {
    let ls = a.letters();
    ls.contains(&TaggedLetter::input(ENDMARK)) && ls.contains(&TaggedLetter::output(ENDMARK))
}

/// Deletes both endmarkers from every word: `⊣` transitions become silent.
pub fn erase_endmarkers(a: &Nfa) -> Nfa {
    let mut alphabet = a.alphabet.clone();
    alphabet.input.remove(&ENDMARK);
    alphabet.output.remove(&ENDMARK);
    let silent = |l: &TaggedLetter| l.symbol == ENDMARK;
    let closure = |q: StateId| {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(p) = stack.pop() {
            for (_, ts) in a.out(p).iter().filter(|(l, _)| silent(l)) {
                for &t in ts {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        seen
    };
    let mut out = Nfa::empty_with_states(alphabet);
    for q in a.states() {
        out.add_state(a.name(q).to_string());
    }
    out.initial = a.initial();
    for q in a.states() {
        for p in closure(q) {
            out.finals[q] |= a.is_final(p);
            for (&l, ts) in a.out(p).iter().filter(|(l, _)| !silent(l)) {
                for &t in ts {
                    out.add_transition(q, l, t);
                }
            }
        }
    }
    trim(&out)
}

/// Whether some synchronization of `(x, y)` is accepted by `a`.
pub fn relation_contains(a: &Nfa, x: &[char], y: &[char]) -> bool {
    let (n, m) = (x.len(), y.len());
    let mut grid = vec![vec![BTreeSet::new(); m + 1]; n + 1];
    grid[0][0].insert(a.initial());
    for i in 0..=n {
        for j in 0..=m {
            let here = std::mem::take(&mut grid[i][j]);
            if i < n {
                let next = a.step(&here, TaggedLetter::input(x[i]));
                grid[i + 1][j].extend(next);
            }
            if j < m {
                let next = a.step(&here, TaggedLetter::output(y[j]));
                grid[i][j + 1].extend(next);
            }
            grid[i][j] = here;
        }
    }
    grid[n][m].iter().any(|&q| a.is_final(q))
}

/// States of a sequential DFA split by which tape they read.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub input_states: BTreeSet<StateId>,
    pub output_states: BTreeSet<StateId>,
}

/// A DFA whose states are split into input and output states, output
/// states having at most one outgoing transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentialDfa {
    dfa: Dfa,
    partition: Partition,
}

impl SequentialDfa {
    pub fn new(dfa: Dfa, partition: Partition) -> Result<Self> {
        for q in dfa.states() {
            let is_in = partition.input_states.contains(&q);
            let is_out = partition.output_states.contains(&q);
            if is_in == is_out {
                return Err(Error::PartitionViolation { state: dfa.name(q).to_string() });
            }
            let tape = if is_in { Tape::Input } else { Tape::Output };
            if dfa.out(q).keys().any(|l| l.tape != tape) {
                return Err(Error::PartitionViolation { state: dfa.name(q).to_string() });
            }
            if is_out && dfa.out(q).len() > 1 {
                return Err(Error::EmissionNondeterminism { state: dfa.name(q).to_string() });
            }
        }
        if partition.input_states.iter().chain(&partition.output_states).any(|&q| q >= dfa.num_states()) {
            return Err(Error::PartitionViolation { state: "<out of range>".into() });
        }
        Ok(SequentialDfa { dfa, partition })
    }

    /// Uses the evident partition: states reading output letters are output states.
    pub fn infer(dfa: Dfa) -> Result<Self> {
        let p = infer_partition(&dfa)?;
        Self::new(dfa, p)
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }
    pub fn partition(&self) -> &Partition {
        &self.partition
    }
    pub fn is_output_state(&self, q: StateId) -> bool {
        self.partition.output_states.contains(&q)
    }

    /// Feeds an input word and follows forced emissions; returns the emitted
    /// sync word if the run accepts.
    pub fn transduce(&self, input: &[char]) -> Option<SyncWord> {
        let d = &self.dfa;
        let mut q = d.initial();
        let mut word = Vec::new();
        let mut idx = 0;
        let mut guard = 0usize;
        loop {
            if self.is_output_state(q) {
                let (&l, &t) = d.out(q).iter().next()?;
                word.push(l);
                q = t;
                guard += 1;
                if guard > d.num_states() * (input.len() + 1) + 1 {
                    return None;
                }
                continue;
            }
            if idx == input.len() {
                break;
            }
            let l = TaggedLetter::input(input[idx]);
            q = d.delta(q, l)?;
            word.push(l);
            idx += 1;
            guard = 0;
        }
        d.is_final(q).then_some(SyncWord(word))
    }
}

pub fn make_sequential_check(d: &Dfa, partition: Partition) -> Result<SequentialDfa> {
    SequentialDfa::new(d.clone(), partition)
}

/// Output states are those with outgoing output letters only.
pub fn infer_partition(d: &Dfa) -> Result<Partition> {
    let mut p = Partition::default();
    for q in d.states() {
        let out = d.out(q);
        let has_in = out.keys().any(|l| l.tape == Tape::Input);
        let has_out = out.keys().any(|l| l.tape == Tape::Output);
        if has_in && has_out {
            return Err(Error::PartitionViolation { state: d.name(q).to_string() });
        }
        if has_out {
            p.output_states.insert(q);
        } else {
            p.input_states.insert(q);
        }
    }
    Ok(p)
}

/// All words over `letters` of length at most `max_len`, shortest first.
pub fn words_upto(letters: &[TaggedLetter], max_len: usize) -> Vec<Vec<TaggedLetter>> {
    let mut all = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &l in letters {
                let mut v: Vec<TaggedLetter> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}
