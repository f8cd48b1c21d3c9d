//! Synchronization measures (lag, shift, shiftlag) on words and languages.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::automata::{concat, explore, inclusion, trim, Alphabet, Dfa, Nfa, StateId, SyncWord, TaggedLetter, Tape};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SyncMeasures {
    pub lag: usize,
    pub shift: usize,
    pub shiftlag: usize,
}

/// Signed lag `#₁ − #₂` after each prefix `w[1..=i]`.
pub fn prefix_lags(tags: &[Tape]) -> Vec<i64> {
    let mut d = 0i64;
    tags.iter()
        .map(|t| {
            d += if *t == Tape::Input { 1 } else { -1 };
            d
        })
        .collect()
}

/// Lag, shift and shiftlag of a tag word.
///
/// A shift is a position `i` with `w[i] ≠ w[i+1]`; its lag is that of the
/// prefix ending at `i`. `shiftlag` is the largest `n` such that `n`
/// consecutive shifts all have lag at least `n`.
pub fn measures_tags(tags: &[Tape]) -> SyncMeasures {
    let lags = prefix_lags(tags);
    let lag = lags.iter().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0);
    let shift_lags: Vec<usize> = (0..tags.len().saturating_sub(1))
        .filter(|&i| tags[i] != tags[i + 1])
        .map(|i| lags[i].unsigned_abs() as usize)
        .collect();
    let shift = shift_lags.len();
    let mut shiftlag = 0;
    for n in 1..=shift {
        let ok = shift_lags.windows(n).any(|w| w.iter().all(|&l| l >= n));
        if ok {
            shiftlag = n;
        }
    }
    SyncMeasures { lag, shift, shiftlag }
}

pub fn measures(w: &SyncWord) -> SyncMeasures {
    measures_tags(&w.tags())
}

/// Parses a tag word such as `1122`.
pub fn tags(s: &str) -> Vec<Tape> {
    s.chars()
        .map(|c| match c {
            '1' => Tape::Input,
            '2' => Tape::Output,
            _ => panic!("tag words use only 1 and 2"),
        })
        .collect()
}

/// A pumpable pattern `prefix · first^a · middle · second^b · suffix` inside a language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpWitness {
    pub prefix: String,
    pub first: String,
    pub middle: String,
    pub second: String,
    pub suffix: String,
    #[serde(skip)]
    words: [SyncWord; 5],
}

impl PumpWitness {
    fn new(words: [SyncWord; 5]) -> Self {
        PumpWitness {
            prefix: words[0].to_string(),
            first: words[1].to_string(),
            middle: words[2].to_string(),
            second: words[3].to_string(),
            suffix: words[4].to_string(),
            words,
        }
    }

    pub fn parts(&self) -> &[SyncWord; 5] {
        &self.words
    }

    /// `prefix · first^a · middle · second^b · suffix`.
    pub fn pump(&self, a: usize, b: usize) -> SyncWord {
        let [p, c1, m, c2, s] = &self.words;
        let mut v = p.0.clone();
        for _ in 0..a {
            v.extend_from_slice(&c1.0);
        }
        v.extend_from_slice(&m.0);
        for _ in 0..b {
            v.extend_from_slice(&c2.0);
        }
        v.extend_from_slice(&s.0);
        SyncWord(v)
    }

    /// A word of the language whose shiftlag is at least `n` (shiftlag witnesses only).
    pub fn pump_shiftlag(&self, n: usize) -> SyncWord {
        let [p, c1, m, c2, _] = &self.words;
        let d = prefix_lags(&c1.tags()).last().copied().unwrap_or(0).unsigned_abs().max(1) as usize;
        let need = n * (c2.len() + 1) + p.len() + m.len() + 1;
        self.pump(need.div_ceil(d), n.max(1))
    }
}

impl fmt::Display for PumpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·({})*·{}·({})*·{}", self.prefix, self.first, self.middle, self.second, self.suffix)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ShiftFiniteness {
    Finite { bound: usize },
    /// The pattern pumps its second cycle; the first cycle is empty.
    Infinite { witness: PumpWitness },
}

impl ShiftFiniteness {
    pub fn is_finite(&self) -> bool {
        matches!(self, ShiftFiniteness::Finite { .. })
    }
}

/// Graph over `(state, last tape)` of a trimmed automaton.
struct TagGraph {
    nodes: Vec<(StateId, Option<Tape>)>,
    edges: Vec<Vec<(TaggedLetter, usize)>>,
    finals: Vec<bool>,
}

impl TagGraph {
    fn build(a: &Nfa) -> TagGraph {
        let (nfa, order) = explore(
            a.alphabet.clone(),
            (a.initial(), None::<Tape>),
            |&(q, _)| {
                a.out(q)
                    .iter()
                    .flat_map(|(&l, ts)| ts.iter().map(move |&t| (l, (t, Some(l.tape)))))
                    .collect()
            },
            |&(q, _)| a.is_final(q),
            usize::MAX,
        )
        .expect("uncapped");
        let edges = nfa
            .states()
            .map(|q| nfa.out(q).iter().flat_map(|(&l, ts)| ts.iter().map(move |&t| (l, t))).collect())
            .collect();
        let finals = nfa.states().map(|q| nfa.is_final(q)).collect();
        TagGraph { nodes: order, edges, finals }
    }

    fn is_shift(&self, from: usize, l: TaggedLetter) -> bool {
        matches!(self.nodes[from].1, Some(t) if t != l.tape)
    }

    /// Tarjan SCCs; components are numbered in reverse topological order.
    fn sccs(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut counter = 0;
        let mut ncomp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < self.edges[v].len() {
                    let w = self.edges[v][*i].1;
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on[w] = true;
                        call.push((w, 0));
                    } else if on[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on[w] = false;
                            comp[w] = ncomp;
                            if w == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Shortest path `from → to` restricted to nodes accepted by `allow`.
    fn path(&self, from: usize, to: usize, allow: impl Fn(usize) -> bool) -> Option<Vec<TaggedLetter>> {
        let mut parent: BTreeMap<usize, (usize, TaggedLetter)> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            if v == to {
                let mut word = Vec::new();
                let mut at = v;
                while at != from {
                    let (p, l) = parent[&at];
                    word.push(l);
                    at = p;
                }
                word.reverse();
                return Some(word);
            }
            for &(l, w) in &self.edges[v] {
                if allow(w) && seen.insert(w) {
                    parent.insert(w, (v, l));
                    q.push_back(w);
                }
            }
        }
        None
    }

    fn path_to_final(&self, from: usize) -> Vec<TaggedLetter> {
        (0..self.nodes.len())
            .filter(|&t| self.finals[t])
            .filter_map(|t| self.path(from, t, |_| true))
            .min_by_key(|p| p.len())
            .expect("trimmed automaton: every node reaches a final node")
    }

    /// A cycle through edge `from -l-> to` inside the component of `from`.
    fn cycle_through(&self, comp: &[usize], from: usize, l: TaggedLetter, to: usize) -> Vec<TaggedLetter> {
        let c = comp[from];
        let mut cyc = vec![l];
        cyc.extend(self.path(to, from, |v| comp[v] == c).expect("edge inside a component"));
        cyc
    }
}

fn net_lag(word: &[TaggedLetter]) -> i64 {
    word.iter().map(|l| if l.tape == Tape::Input { 1 } else { -1 }).sum()
}

/// Decides whether `shift(L(a))` is finite.
pub fn shift_finiteness(a: &Nfa) -> ShiftFiniteness {
    let a = trim(a);
    if a.finals().next().is_none() {
        return ShiftFiniteness::Finite { bound: 0 };
    }
    let g = TagGraph::build(&a);
    let comp = g.sccs();
    for v in 0..g.nodes.len() {
        for &(l, w) in &g.edges[v] {
            if comp[v] == comp[w] && g.is_shift(v, l) {
                let prefix = g.path(0, v, |_| true).unwrap();
                let cycle = g.cycle_through(&comp, v, l, w);
                let suffix = g.path_to_final(v);
                return ShiftFiniteness::Infinite {
                    witness: PumpWitness::new([
                        SyncWord(prefix),
                        SyncWord::default(),
                        SyncWord::default(),
                        SyncWord(cycle),
                        SyncWord(suffix),
                    ]),
                };
            }
        }
    }
    // Longest path counted in shift edges; components are in reverse topological order.
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    let mut best: Vec<Option<usize>> = vec![None; ncomp];
    best[comp[0]] = Some(0);
    let mut by_comp: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for v in 0..g.nodes.len() {
        by_comp[comp[v]].push(v);
    }
    let mut bound = 0;
    for c in (0..ncomp).rev() {
        let Some(here) = best[c] else { continue };
        bound = bound.max(here);
        for &v in &by_comp[c] {
            for &(l, w) in &g.edges[v] {
                if comp[w] != c {
                    let cand = here + usize::from(g.is_shift(v, l));
                    best[comp[w]] = Some(best[comp[w]].map_or(cand, |b| b.max(cand)));
                }
            }
        }
    }
    ShiftFiniteness::Finite { bound }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ShiftlagVerdict {
    /// `L ⊆ L_≤ν · (1*+2*)^m`.
    Finite { m: usize, nu: usize },
    Infinite { witness: PumpWitness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftlagCertificate {
    #[serde(flatten)]
    pub verdict: ShiftlagVerdict,
    /// State count of the trimmed automaton the bound refers to.
    pub states: usize,
}

impl ShiftlagCertificate {
    pub fn is_finite(&self) -> bool {
        matches!(self.verdict, ShiftlagVerdict::Finite { .. })
    }
    pub fn finite_params(&self) -> Option<(usize, usize)> {
        match self.verdict {
            ShiftlagVerdict::Finite { m, nu } => Some((m, nu)),
            ShiftlagVerdict::Infinite { .. } => None,
        }
    }
}

/// `ν = 2(m(|Q|+1)+1)`.
pub fn form_nu(m: usize, states: usize) -> usize {
    2 * (m * (states + 1) + 1)
}

/// Number of certificate candidates tried against an infinite witness.
const INFINITE_CROSS_CHECK: usize = 3;

/// Searches for a net-lag cycle followed by a shift-carrying cycle.
fn shiftlag_witness(a: &Nfa) -> Option<PumpWitness> {
    let g = TagGraph::build(a);
    let comp = g.sccs();
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    // Potentials inside each component; an inconsistent edge closes a non-zero cycle.
    let mut pot: Vec<Option<i64>> = vec![None; g.nodes.len()];
    let mut tree: Vec<Option<(usize, TaggedLetter)>> = vec![None; g.nodes.len()];
    let mut unbalanced: Vec<Option<Vec<TaggedLetter>>> = vec![None; ncomp];
    let mut shifty: Vec<Option<(usize, Vec<TaggedLetter>)>> = vec![None; ncomp];
    let mut base: Vec<usize> = vec![usize::MAX; ncomp];
    let step = |l: TaggedLetter| if l.tape == Tape::Input { 1 } else { -1 };
    for v in 0..g.nodes.len() {
        let c = comp[v];
        if pot[v].is_some() {
            continue;
        }
        base[c] = v;
        pot[v] = Some(0);
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            for &(l, w) in &g.edges[u] {
                if comp[w] != c {
                    continue;
                }
                let want = pot[u].unwrap() + step(l);
                match pot[w] {
                    None => {
                        pot[w] = Some(want);
                        tree[w] = Some((u, l));
                        q.push_back(w);
                    }
                    Some(have) if have != want && unbalanced[c].is_none() => {
                        unbalanced[c] = Some(Vec::new());
                    }
                    _ => {}
                }
            }
        }
    }
    for v in 0..g.nodes.len() {
        let c = comp[v];
        for &(l, w) in &g.edges[v] {
            if comp[w] != c {
                continue;
            }
            if shifty[c].is_none() && g.is_shift(v, l) {
                shifty[c] = Some((v, g.cycle_through(&comp, v, l, w)));
            }
            if matches!(&unbalanced[c], Some(cy) if cy.is_empty()) && pot[w] != Some(pot[v].unwrap() + step(l)) {
                // Two cycles through the component base differ in net lag; one is non-zero.
                let b = base[c];
                let to_v = g.path(b, v, |x| comp[x] == c).unwrap();
                let to_w = g.path(b, w, |x| comp[x] == c).unwrap();
                let back = g.path(w, b, |x| comp[x] == c).unwrap();
                let mut c1 = to_v.clone();
                c1.push(l);
                c1.extend(back.iter().copied());
                let mut c2 = to_w;
                c2.extend(back);
                let cyc = if net_lag(&c1) != 0 { c1 } else { c2 };
                debug_assert!(net_lag(&cyc) != 0);
                unbalanced[c] = Some(cyc);
            }
        }
    }
    // Reachability between components.
    for x in 0..ncomp {
        let Some(c1) = unbalanced[x].clone() else { continue };
        let bx = base[x];
        // components reachable from x, nearest first
        let mut best: Option<(usize, Vec<TaggedLetter>)> = None;
        for (y, s) in shifty.iter().enumerate() {
            let Some((sv, _)) = s else { continue };
            if let Some(p) = g.path(bx, *sv, |_| true) {
                if best.as_ref().is_none_or(|(_, bp)| p.len() < bp.len()) {
                    best = Some((y, p));
                }
            }
        }
        let Some((y, middle)) = best else { continue };
        let (sv, c2) = shifty[y].clone().unwrap();
        let prefix = g.path(0, bx, |_| true).unwrap();
        let suffix = g.path_to_final(sv);
        return Some(PumpWitness::new([
            SyncWord(prefix),
            SyncWord(c1),
            SyncWord(middle),
            SyncWord(c2),
            SyncWord(suffix),
        ]));
    }
    None
}

/// The automaton of `T_≤ν · (Σ_i* + Σ_o*)^m` used by certificates.
pub fn form_automaton(nu: usize, m: usize, alphabet: &Alphabet) -> Nfa {
    let lag = trim(&build_lag_bounded(nu, alphabet).to_nfa());
    concat(&lag, &build_blocks(m, None, alphabet))
}

/// Smallest `ν' ≤ ν` with `L(a) ⊆ L_≤ν' · (Σ_i*+Σ_o*)^m`, assuming it holds for `ν`.
pub fn tight_lag_bound(a: &Nfa, nu: usize, m: usize) -> usize {
    let (mut lo, mut hi) = (0, nu);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if inclusion(a, &form_automaton(mid, m, &a.alphabet)).is_ok() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    hi
}

/// Decides finiteness of `shiftlag(L(a))` and produces a certificate.
///
/// `max_blocks` bounds the certificate search (default `(|Q|+1)²`).
pub fn shiftlag_finiteness(a: &Nfa, max_blocks: Option<usize>) -> Result<ShiftlagCertificate> {
    let a = trim(a);
    let q = a.num_states();
    let bound = max_blocks.unwrap_or((q + 1) * (q + 1));
    if a.finals().next().is_none() {
        return Ok(ShiftlagCertificate { verdict: ShiftlagVerdict::Finite { m: 1, nu: form_nu(1, q) }, states: q });
    }
    let witness = shiftlag_witness(&a);
    let limit = if witness.is_some() { bound.min(INFINITE_CROSS_CHECK) } else { bound };
    let mut found = None;
    for m in 1..=limit {
        let nu = form_nu(m, q);
        if inclusion(&a, &form_automaton(nu, m, &a.alphabet)).is_ok() {
            found = Some((m, nu));
            break;
        }
    }
    match (witness, found) {
        (Some(w), None) => Ok(ShiftlagCertificate { verdict: ShiftlagVerdict::Infinite { witness: w }, states: q }),
        (None, Some((m, nu))) => Ok(ShiftlagCertificate { verdict: ShiftlagVerdict::Finite { m, nu }, states: q }),
        (None, None) => Err(Error::BoundExhausted { bound }),
        (Some(w), Some((m, _))) => {
            panic!("shiftlag procedures disagree: witness {w} but certificate with m = {m}")
        }
    }
}

/// DFA of `{w : lag(w) ≤ ν}` with a counter over `[−ν, ν]` and a sink.
pub fn build_lag_bounded(nu: usize, alphabet: &Alphabet) -> Dfa {
    let nu = nu as i64;
    let mut d = Dfa::empty_with_states(alphabet.clone());
    for v in -nu..=nu {
        let id = d.add_state(format!("lag{v:+}"));
        d.set_final(id, true);
    }
    let sink = d.add_state("⊥");
    d.set_initial(nu as usize);
    for v in -nu..=nu {
        let q = (v + nu) as usize;
        for l in alphabet.letters() {
            let nv = v + if l.tape == Tape::Input { 1 } else { -1 };
            let t = if nv.abs() <= nu { (nv + nu) as usize } else { sink };
            d.set_transition(q, l, t);
        }
    }
    for l in alphabet.letters() {
        d.set_transition(sink, l, sink);
    }
    d
}

/// NFA of `(Σ_i* + Σ_o^≤cap)^n`; `cap = None` means unbounded output blocks.
pub fn build_blocks(n: usize, cap: Option<usize>, alphabet: &Alphabet) -> Nfa {
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum St {
        Start,
        In(usize),
        Out(usize, usize),
    }
    let letters = alphabet.letters();
    let (mut nfa, order) = explore(
        alphabet.clone(),
        St::Start,
        |st| {
            let used = match *st {
                St::Start => 0,
                St::In(j) | St::Out(j, _) => j,
            };
            let mut v = Vec::new();
            for &l in &letters {
                match (l.tape, st) {
                    (Tape::Input, St::In(j)) => v.push((l, St::In(*j))),
                    (Tape::Output, St::Out(j, c)) if cap.is_none_or(|k| c + 1 <= k) => {
                        v.push((l, St::Out(*j, if cap.is_some() { c + 1 } else { 0 })))
                    }
                    _ => {}
                }
                if used < n {
                    match l.tape {
                        Tape::Input => v.push((l, St::In(used + 1))),
                        Tape::Output if cap.is_none_or(|k| k >= 1) => {
                            v.push((l, St::Out(used + 1, if cap.is_some() { 1 } else { 0 })))
                        }
                        Tape::Output => {}
                    }
                }
            }
            v
        },
        |_| true,
        usize::MAX,
    )
    .expect("uncapped");
    for (i, st) in order.iter().enumerate() {
        let name = match st {
            St::Start => "start".to_string(),
            St::In(j) => format!("in{j}"),
            St::Out(j, c) => format!("out{j}.{c}"),
        };
        nfa.set_name(i, name);
    }
    nfa
}

/// Two distinct tag words of `L` with the same Parikh image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParikhWitness {
    pub left: String,
    pub right: String,
}

/// `Ok(())` if no two distinct words of `L` (compared on their tag sequence)
/// share a Parikh image. `counter_bound` defaults to `(|Q|²)²`.
pub fn parikh_injective(l: &Nfa, counter_bound: Option<usize>) -> std::result::Result<(), ParikhWitness> {
    let a = trim(l);
    let q = a.num_states();
    let k = counter_bound.unwrap_or((q * q) * (q * q)) as i64;
    let tape_succ = |p: StateId, t: Tape| -> BTreeSet<StateId> {
        a.out(p).iter().filter(|(l, _)| l.tape == t).flat_map(|(_, ts)| ts.iter().copied()).collect()
    };
    type Cfg = (StateId, StateId, i64, bool);
    let init: Cfg = (a.initial(), a.initial(), 0, false);
    let mut parent: BTreeMap<Cfg, Option<(Cfg, Tape, Tape)>> = BTreeMap::new();
    parent.insert(init, None);
    let mut queue = VecDeque::from([init]);
    while let Some(cur) = queue.pop_front() {
        let (p, r, d, diff) = cur;
        if diff && d == 0 && a.is_final(p) && a.is_final(r) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, tl, tr))) = parent.get(&at).copied() {
                left.push(tl);
                right.push(tr);
                at = prev;
            }
            left.reverse();
            right.reverse();
            let show = |v: &[Tape]| v.iter().map(|t| t.digit()).collect::<String>();
            return Err(ParikhWitness { left: show(&left), right: show(&right) });
        }
        for tl in [Tape::Input, Tape::Output] {
            for tr in [Tape::Input, Tape::Output] {
                let nd = d + i64::from(tl == Tape::Input) - i64::from(tr == Tape::Input);
                if nd.abs() > k {
                    continue;
                }
                for p2 in tape_succ(p, tl) {
                    for r2 in tape_succ(r, tr) {
                        let next = (p2, r2, nd, diff || tl != tr);
                        if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(next) {
                            e.insert(Some((cur, tl, tr)));
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// DFA of the tag shape `(12)*(1*+2*)`.
pub fn canonical_shape(alphabet: &Alphabet) -> Dfa {
    // 0: balanced, 1: after an unanswered input, 2: input tail, 3: output tail
    let mut d = Dfa::empty_with_states(alphabet.clone());
    for n in ["bal", "open", "tail1", "tail2"] {
        let q = d.add_state(n);
        d.set_final(q, true);
    }
    for l in alphabet.letters() {
        match l.tape {
            Tape::Input => {
                d.set_transition(0, l, 1);
                d.set_transition(1, l, 2);
                d.set_transition(2, l, 2);
            }
            Tape::Output => {
                d.set_transition(1, l, 0);
                d.set_transition(0, l, 3);
                d.set_transition(3, l, 3);
            }
        }
    }
    d
}

/// DFA of the tag shape `1*2*`.
pub fn input_first_shape(alphabet: &Alphabet) -> Dfa {
    let mut d = Dfa::empty_with_states(alphabet.clone());
    let a = d.add_state("in");
    let b = d.add_state("out");
    d.set_final(a, true);
    d.set_final(b, true);
    for l in alphabet.letters() {
        match l.tape {
            Tape::Input => d.set_transition(a, l, a),
            Tape::Output => {
                d.set_transition(a, l, b);
                d.set_transition(b, l, b);
            }
        }
    }
    d
}

/// `Ok(())` if every word of `a` has its tag sequence accepted by `shape`.
pub fn check_controlled(a: &Nfa, shape: &Dfa) -> std::result::Result<(), SyncWord> {
    // Shapes only look at tags; extend to every letter of `a`.
    let mut ext = Dfa::empty_with_states(a.alphabet.union(&shape.alphabet));
    for q in shape.states() {
        let id = ext.add_state(shape.name(q));
        ext.set_final(id, shape.is_final(q));
    }
    ext.set_initial(shape.initial());
    for q in shape.states() {
        for l in a.letters().into_iter().chain(shape.letters()) {
            let rep = shape.out(q).iter().find(|(k, _)| k.tape == l.tape).map(|(_, &t)| t);
            if let Some(t) = rep {
                ext.set_transition(q, l, t);
            }
        }
    }
    inclusion(a, &ext.to_nfa())
}
