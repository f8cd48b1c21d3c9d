//! Canonical `(12)*(1*+2*)` synchronizations and conversion of bounded-shiftlag languages into them.

use std::collections::BTreeSet;

use crate::automata::{explore, inclusion, minimize, trim, Dfa, Nfa, StateId, SyncWord, TaggedLetter, Tape, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::sync::{self, canonical_shape, check_controlled, form_automaton, input_first_shape, ShiftFiniteness, ShiftlagCertificate};

/// Alternates `u` and `v` letter by letter (input first), then appends the longer tail.
pub fn canonical_sync(u: &str, v: &str) -> SyncWord {
    let u: Vec<char> = u.chars().collect();
    let v: Vec<char> = v.chars().collect();
    let mut w = Vec::with_capacity(u.len() + v.len());
    let k = u.len().min(v.len());
    for i in 0..k {
        w.push(TaggedLetter::input(u[i]));
        w.push(TaggedLetter::output(v[i]));
    }
    w.extend(u[k..].iter().map(|&c| TaggedLetter::input(c)));
    w.extend(v[k..].iter().map(|&c| TaggedLetter::output(c)));
    SyncWord(w)
}

/// A DFA whose language is `(12)*(1*+2*)`-controlled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDfa {
    dfa: Dfa,
}

impl CanonicalDfa {
    /// Wraps the trimmed `dfa` after checking its tag shape.
    pub fn new(dfa: Dfa) -> Result<Self> {
        let shape = canonical_shape(&dfa.alphabet);
        check_controlled(&dfa.to_nfa(), &shape).map_err(|w| Error::ShapeViolation {
            expected: "(12)*(1*+2*)".into(),
            witness: w.to_string(),
        })?;
        Ok(CanonicalDfa { dfa: dfa.trim() })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn into_dfa(self) -> Dfa {
        self.dfa
    }

    /// `δ*(q, (x, y))`: the run from `q` on `canonical_sync(x, y)`.
    pub fn run_pair(&self, q: StateId, x: &str, y: &str) -> Option<StateId> {
        self.dfa.run_from(q, &canonical_sync(x, y).0)
    }

    pub fn accepts_pair(&self, x: &str, y: &str) -> bool {
        self.run_pair(self.dfa.initial(), x, y).is_some_and(|q| self.dfa.is_final(q))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Cfg {
    /// Simulating the leading factor. `pending` holds letters already read
    /// but not yet consumed, all from one tape.
    Lead { q: StateId, lag: i64, pending: Vec<TaggedLetter> },
    Blocks(BlockCfg),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct BlockCfg {
    /// Hand-off states `r_0..=r_m`.
    hand: Vec<StateId>,
    start: Tape,
    input: Runner,
    output: Runner,
}

/// Inside block `block` (1-based, `> m` once done) in state `state`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Runner {
    block: usize,
    state: StateId,
}

struct Reader<'a> {
    s: &'a Nfa,
    nu: i64,
    m: usize,
}

impl Reader<'_> {

    fn first_block(&self, start: Tape, t: Tape) -> usize {
        if start == t {
            1
        } else {
            2
        }
    }

    /// Runners obtained by closing the current block and skipping empty ones.
    fn advances(&self, hand: &[StateId], r: Runner) -> Vec<Runner> {
        let mut v = vec![r];
        let mut cur = r;
        while cur.block <= self.m && cur.state == hand[cur.block] {
            let next = cur.block + 2;
            if next > self.m {
                v.push(Runner { block: self.m + 1, state: cur.state });
                break;
            }
            cur = Runner { block: next, state: hand[next - 1] };
            v.push(cur);
        }
        v
    }

    fn feed(&self, hand: &[StateId], r: Runner, l: TaggedLetter) -> Vec<Runner> {
        let mut out = Vec::new();
        for a in self.advances(hand, r) {
            if a.block <= self.m {
                for t in self.s.successors(a.state, l) {
                    out.push(Runner { block: a.block, state: t });
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn runner_done(&self, hand: &[StateId], r: Runner) -> bool {
        self.advances(hand, r).iter().any(|a| a.block > self.m)
    }

    fn feed_block(&self, b: &BlockCfg, l: TaggedLetter) -> Vec<BlockCfg> {
        let r = if l.tape == Tape::Input { b.input } else { b.output };
        self.feed(&b.hand, r, l)
            .into_iter()
            .map(|nr| {
                let mut nb = b.clone();
                if l.tape == Tape::Input {
                    nb.input = nr;
                } else {
                    nb.output = nr;
                }
                nb
            })
            .collect()
    }

    /// All block configurations that take over after a leading factor ending in `q`.
    fn switch(&self, q: StateId, pending: &[TaggedLetter], out: &mut BTreeSet<Cfg>) {
        let n = self.s.num_states();
        let finals: Vec<StateId> = self.s.finals().collect();
        let mut hands: Vec<Vec<StateId>> = vec![vec![q]];
        for j in 1..=self.m {
            let choices: Vec<StateId> = if j == self.m { finals.clone() } else { (0..n).collect() };
            hands = hands
                .into_iter()
                .flat_map(|h| {
                    choices.iter().map(move |&c| {
                        let mut h = h.clone();
                        h.push(c);
                        h
                    })
                })
                .collect();
        }
        for hand in hands {
            for start in [Tape::Input, Tape::Output] {
                let runner = |t: Tape| {
                    let k = self.first_block(start, t);
                    if k > self.m {
                        Runner { block: self.m + 1, state: hand[self.m] }
                    } else {
                        Runner { block: k, state: hand[k - 1] }
                    }
                };
                let mut layer =
                    vec![BlockCfg { hand: hand.clone(), start, input: runner(Tape::Input), output: runner(Tape::Output) }];
                for &l in pending {
                    layer = layer.iter().flat_map(|b| self.feed_block(b, l)).collect();
                    layer.sort();
                    layer.dedup();
                }
                out.extend(layer.into_iter().map(Cfg::Blocks));
            }
        }
    }

    /// Closes a leading configuration under consumption; `out` keeps the normalized ones.
    fn lead_closure(&self, q: StateId, lag: i64, pin: Vec<TaggedLetter>, pout: Vec<TaggedLetter>, consumed: bool, out: &mut BTreeSet<Cfg>) {
        let mut stack = vec![(q, lag, pin, pout, consumed)];
        let mut seen = BTreeSet::new();
        while let Some((q, lag, pin, pout, consumed)) = stack.pop() {
            if !seen.insert((q, lag, pin.clone(), pout.clone(), consumed)) {
                continue;
            }
            if consumed {
                let rest: Vec<TaggedLetter> = pin.iter().chain(&pout).copied().collect();
                self.switch(q, &rest, out);
            }
            if pin.is_empty() || pout.is_empty() {
                let pending = if pin.is_empty() { pout.clone() } else { pin.clone() };
                if pending.len() as i64 <= self.nu + 1 {
                    out.insert(Cfg::Lead { q, lag, pending });
                }
            }
            if let Some(&l) = pin.first() {
                if lag < self.nu {
                    for t in self.s.successors(q, l) {
                        stack.push((t, lag + 1, pin[1..].to_vec(), pout.clone(), true));
                    }
                }
            }
            if let Some(&l) = pout.first() {
                if lag > -self.nu {
                    for t in self.s.successors(q, l) {
                        stack.push((t, lag - 1, pin.clone(), pout[1..].to_vec(), true));
                    }
                }
            }
        }
    }

    fn initial(&self) -> BTreeSet<Cfg> {
        let mut out = BTreeSet::new();
        self.lead_closure(self.s.initial(), 0, Vec::new(), Vec::new(), true, &mut out);
        out
    }

    fn step(&self, set: &BTreeSet<Cfg>, l: TaggedLetter) -> BTreeSet<Cfg> {
        let mut out = BTreeSet::new();
        for c in set {
            match c {
                Cfg::Lead { q, lag, pending } => {
                    let (mut pin, mut pout) = match pending.first() {
                        Some(p) if p.tape == Tape::Output => (Vec::new(), pending.clone()),
                        _ => (pending.clone(), Vec::new()),
                    };
                    if l.tape == Tape::Input {
                        pin.push(l)
                    } else {
                        pout.push(l)
                    }
                    self.lead_closure(*q, *lag, pin, pout, false, &mut out);
                }
                Cfg::Blocks(b) => out.extend(self.feed_block(b, l).into_iter().map(Cfg::Blocks)),
            }
        }
        out
    }

    fn accepting(&self, set: &BTreeSet<Cfg>) -> bool {
        set.iter().any(|c| match c {
            Cfg::Lead { q, pending, .. } => pending.is_empty() && self.s.is_final(*q),
            Cfg::Blocks(b) => {
                self.s.is_final(b.hand[self.m]) && self.runner_done(&b.hand, b.input) && self.runner_done(&b.hand, b.output)
            }
        })
    }
}

/// Reads words of tag shape `shape` and accepts those whose pair is in `⟦s⟧`,
/// assuming `L(s) ⊆ L_≤nu · (Σ_i*+Σ_o*)^m`.
fn shape_reader(s: &Nfa, nu: usize, m: usize, shape: &Dfa, cap: usize) -> Result<Dfa> {
    let s = trim(s);
    let reader = Reader { s: &s, nu: nu as i64, m: m.max(1) };
    let letters = s.alphabet.letters();
    let init = (shape.initial(), reader.initial());
    let (nfa, _) = explore(
        s.alphabet.clone(),
        init,
        |(sh, set)| {
            let mut v = Vec::new();
            for &l in &letters {
                let Some(sh2) = shape.delta(*sh, l) else { continue };
                let next = reader.step(set, l);
                if !next.is_empty() {
                    v.push((l, (sh2, next)));
                }
            }
            v
        },
        |(sh, set)| shape.is_final(*sh) && reader.accepting(set),
        cap,
    )?;
    let dfa = trim(&nfa).to_dfa().expect("subset construction is deterministic");
    Ok(minimize(&dfa))
}

/// Builds the canonical automaton `S_can` with `⟦S_can⟧ = ⟦s⟧`.
pub fn canonicalize(s: &Nfa, cert: &ShiftlagCertificate) -> Result<CanonicalDfa> {
    canonicalize_capped(s, cert, DEFAULT_STATE_CAP)
}

pub fn canonicalize_capped(s: &Nfa, cert: &ShiftlagCertificate, cap: usize) -> Result<CanonicalDfa> {
    let (m, nu) = cert
        .finite_params()
        .ok_or_else(|| Error::InvalidCertificate { reason: "certificate reports infinite shiftlag".into() })?;
    let s = trim(s);
    if let Err(w) = inclusion(&s, &form_automaton(nu, m, &s.alphabet)) {
        return Err(Error::InvalidCertificate { reason: format!("{w} is not covered by the certified form") });
    }
    let nu = sync::tight_lag_bound(&s, nu, m);
    let dfa = shape_reader(&s, nu, m, &canonical_shape(&s.alphabet), cap)?;
    Ok(CanonicalDfa { dfa })
}

/// The `1*2*`-controlled automaton with the same relation as a finite-shift `s`.
pub fn input_first(s: &Nfa) -> Result<Dfa> {
    input_first_capped(s, DEFAULT_STATE_CAP)
}

pub fn input_first_capped(s: &Nfa, cap: usize) -> Result<Dfa> {
    match sync::shift_finiteness(s) {
        ShiftFiniteness::Finite { bound } => shape_reader(s, 0, bound + 1, &input_first_shape(&s.alphabet), cap),
        ShiftFiniteness::Infinite { witness } => Err(Error::ShapeViolation {
            expected: "finite shift".into(),
            witness: witness.to_string(),
        }),
    }
}
