//! The block-capped targets `T_i` and the resynchronized sources `T_i(S)`.

use serde::Serialize;

use crate::automata::{explore, intersect, trim, Dfa, Nfa, StateId, TaggedLetter, Tape, DEFAULT_STATE_CAP};
use crate::canonical::CanonicalDfa;
use crate::error::{Error, Result};
use crate::sync::{self, build_blocks, build_lag_bounded, check_controlled, input_first_shape, ShiftlagCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResyncParams {
    /// `shiftlag(T) < n`.
    pub n: usize,
    /// States of the target DFA.
    pub qb: usize,
    /// `2(n(|Q_B|+1)+1)`.
    pub gamma: usize,
    /// Lag bound actually used for the leading factor; `lead ≤ gamma` and
    /// `T ⊆ T_≤lead · (Σ_i*+Σ_o*)^n`.
    pub lead: usize,
    /// Output-block cap.
    pub i: usize,
}

pub fn gamma_for(n: usize, qb: usize) -> usize {
    2 * (n * (qb + 1) + 1)
}

impl ResyncParams {
    pub fn new(n: usize, qb: usize, i: usize) -> Self {
        let gamma = gamma_for(n, qb);
        ResyncParams { n, qb, gamma, lead: gamma, i }
    }

    /// `n = m + 1` from the target's certificate, with the lead bound tightened
    /// to the least value for which the target still factors.
    pub fn for_target(t: &Dfa, cert: &ShiftlagCertificate, i: usize) -> Result<Self> {
        let (m, _) = cert
            .finite_params()
            .ok_or_else(|| Error::InvalidCertificate { reason: "target has infinite shiftlag".into() })?;
        let mut p = Self::new(m + 1, t.num_states(), i);
        let tn = trim(&t.to_nfa());
        if crate::automata::inclusion(&tn, &sync::form_automaton(p.gamma, p.n, &tn.alphabet)).is_ok() {
            p.lead = sync::tight_lag_bound(&tn, p.gamma, p.n);
        }
        Ok(p)
    }

    pub fn with_i(self, i: usize) -> Self {
        ResyncParams { i, ..self }
    }

    /// Total output letters allowed after the leading factor.
    pub fn output_budget(&self) -> usize {
        self.i * self.n
    }
}

/// `T ∩ (T_≤lead · (Σ_i* + Σ_o^≤i)^n)`.
pub fn build_ti(t: &Dfa, p: &ResyncParams) -> Nfa {
    let form = crate::automata::concat(
        &trim(&build_lag_bounded(p.lead, &t.alphabet).to_nfa()),
        &build_blocks(p.n, Some(p.i), &t.alphabet),
    );
    trim(&intersect(&t.to_nfa(), &form))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Mode {
    /// Before the split; the canonical stream is rebuilt from a bounded buffer.
    Lead,
    /// After the split. `owed` are output letters already fed to the canonical
    /// automaton that must still appear; `tail` means no further outputs.
    Rest { owed: Vec<char>, count: usize, tail: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Sim {
    a: StateId,
    next: Tape,
    pin: Vec<char>,
    pout: Vec<char>,
    mode: Mode,
}

struct Resync<'a> {
    a: &'a Dfa,
    buffer: usize,
    budget: usize,
}

impl Resync<'_> {
    fn feed(&self, s: &mut Sim, l: TaggedLetter) -> bool {
        match self.a.delta(s.a, l) {
            Some(q) => {
                s.a = q;
                true
            }
            None => false,
        }
    }

    /// Whether the trimmed automaton can still read the buffered letters.
    fn viable(&self, s: &Sim) -> bool {
        let (tape, pending) = if s.pin.is_empty() { (Tape::Output, &s.pout) } else { (Tape::Input, &s.pin) };
        let mut set = std::collections::BTreeSet::from([s.a]);
        for &c in pending {
            let l = TaggedLetter::new(tape, c);
            let mut widened = set.clone();
            for &q in &set {
                widened.extend(self.a.out(q).iter().filter(|(k, _)| k.tape != tape).map(|(_, &t)| t));
            }
            set = widened.into_iter().filter_map(|q| self.a.delta(q, l)).collect();
            if set.is_empty() {
                return false;
            }
        }
        true
    }

    /// Feeds buffered letters in canonical order as far as possible.
    fn settle(&self, mut s: Sim, out: &mut Vec<Sim>) {
        loop {
            let tail = matches!(s.mode, Mode::Rest { tail: true, .. });
            if s.next == Tape::Input || tail {
                if s.pin.is_empty() {
                    break;
                }
                let c = s.pin.remove(0);
                if !self.feed(&mut s, TaggedLetter::input(c)) {
                    return;
                }
                if !tail {
                    s.next = Tape::Output;
                }
                continue;
            }
            if !s.pout.is_empty() {
                let c = s.pout.remove(0);
                if !self.feed(&mut s, TaggedLetter::output(c)) {
                    return;
                }
                s.next = Tape::Input;
                continue;
            }
            let Mode::Rest { owed, count, .. } = &s.mode else { break };
            if s.pin.is_empty() {
                break;
            }
            // An output is needed before it has been read: guess it or end the outputs.
            let (owed, count) = (owed.clone(), *count);
            if count + owed.len() < self.budget {
                for (&l, &q) in self.a.out(s.a) {
                    if l.tape == Tape::Output {
                        let mut g = s.clone();
                        g.a = q;
                        g.next = Tape::Input;
                        let mut o = owed.clone();
                        o.push(l.symbol);
                        g.mode = Mode::Rest { owed: o, count, tail: false };
                        self.settle(g, out);
                    }
                }
            }
            s.mode = Mode::Rest { owed, count, tail: true };
        }
        if s.mode == Mode::Lead && (s.pin.len() > self.buffer || s.pout.len() > self.buffer || !self.viable(&s)) {
            return;
        }
        out.push(s);
    }

    fn step(&self, s: &Sim, l: TaggedLetter) -> Vec<Sim> {
        let mut s = s.clone();
        let mut out = Vec::new();
        match (&mut s.mode, l.tape) {
            (_, Tape::Input) => s.pin.push(l.symbol),
            (Mode::Lead, Tape::Output) => s.pout.push(l.symbol),
            (Mode::Rest { owed, count, tail }, Tape::Output) => {
                if let Some(&c) = owed.first() {
                    if c != l.symbol {
                        return out;
                    }
                    owed.remove(0);
                    *count += 1;
                } else if *tail || *count + 1 > self.budget {
                    return out;
                } else {
                    *count += 1;
                    s.pout.push(l.symbol);
                }
            }
        }
        self.settle(s, &mut out);
        out
    }

    fn split(&self, s: &Sim) -> Vec<Sim> {
        let mut g = s.clone();
        g.mode = Mode::Rest { owed: Vec::new(), count: 0, tail: false };
        let mut out = Vec::new();
        self.settle(g, &mut out);
        out
    }

    fn accepting(&self, s: &Sim) -> bool {
        if let Mode::Rest { owed, .. } = &s.mode {
            if !owed.is_empty() {
                return false;
            }
        }
        let mut q = s.a;
        for l in s.pin.iter().map(|&c| TaggedLetter::input(c)).chain(s.pout.iter().map(|&c| TaggedLetter::output(c))) {
            match self.a.delta(q, l) {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.a.is_final(q)
    }
}

/// `T_i(S) = {w ∈ T_i : ⟦w⟧ ∈ ⟦S⟧}` for `S = L(a)` canonical.
pub fn build_tis(a: &CanonicalDfa, ti: &Nfa, p: &ResyncParams) -> Result<Nfa> {
    build_tis_capped(a, ti, p, DEFAULT_STATE_CAP)
}

pub fn build_tis_capped(a: &CanonicalDfa, ti: &Nfa, p: &ResyncParams, cap: usize) -> Result<Nfa> {
    let dfa = a.dfa();
    let r = Resync { a: dfa, buffer: p.lead + 1, budget: p.output_budget() };
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    struct St {
        t: StateId,
        sim: Sim,
    }
    let init = St { t: ti.initial(), sim: Sim { a: dfa.initial(), next: Tape::Input, pin: vec![], pout: vec![], mode: Mode::Lead } };
    let alphabet = ti.alphabet.union(&dfa.alphabet);
    let letters = alphabet.letters();
    let (nfa, _) = explore(
        alphabet,
        init,
        |st| {
            let mut v = Vec::new();
            for &l in &letters {
                let ts: Vec<StateId> = ti.successors(st.t, l).collect();
                if ts.is_empty() {
                    continue;
                }
                let mut sims = r.step(&st.sim, l);
                if st.sim.mode == Mode::Lead {
                    for g in r.split(&st.sim) {
                        sims.extend(r.step(&g, l));
                    }
                }
                sims.sort();
                sims.dedup();
                for sim in sims {
                    for &t in &ts {
                        v.push((l, St { t, sim: sim.clone() }));
                    }
                }
            }
            v
        },
        |st| ti.is_final(st.t) && r.accepting(&st.sim),
        cap,
    )?;
    Ok(trim(&nfa))
}

/// `T' = {w ∈ T : ⟦w⟧ ∈ ⟦S⟧}` for a `1*2*`-controlled `s`.
pub fn build_tprime_recognizable(s: &Dfa, t: &Dfa) -> Result<Nfa> {
    check_controlled(&s.to_nfa(), &input_first_shape(&s.alphabet))
        .map_err(|w| Error::ShapeViolation { expected: "1*2*".into(), witness: w.to_string() })?;
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum St {
        Start,
        /// Guessed midpoint, input-side run, output-side run, target state.
        Run(StateId, StateId, StateId, StateId),
    }
    let alphabet = s.alphabet.union(&t.alphabet);
    let letters = alphabet.letters();
    let advance = |pi: StateId, po: StateId, l: TaggedLetter| -> Option<(StateId, StateId)> {
        match l.tape {
            Tape::Input => s.delta(pi, l).map(|q| (q, po)),
            Tape::Output => s.delta(po, l).map(|q| (pi, q)),
        }
    };
    let (nfa, _) = explore(
        alphabet,
        St::Start,
        |st| {
            let mut v = Vec::new();
            for &l in &letters {
                match *st {
                    St::Start => {
                        let Some(tq) = t.delta(t.initial(), l) else { continue };
                        for mid in s.states() {
                            if let Some((pi, po)) = advance(s.initial(), mid, l) {
                                v.push((l, St::Run(mid, pi, po, tq)));
                            }
                        }
                    }
                    St::Run(mid, pi, po, tq) => {
                        let Some(tq2) = t.delta(tq, l) else { continue };
                        if let Some((pi2, po2)) = advance(pi, po, l) {
                            v.push((l, St::Run(mid, pi2, po2, tq2)));
                        }
                    }
                }
            }
            v
        },
        |st| match *st {
            St::Start => s.is_final(s.initial()) && t.is_final(t.initial()),
            St::Run(mid, pi, po, tq) => pi == mid && s.is_final(po) && t.is_final(tq),
        },
        DEFAULT_STATE_CAP,
    )?;
    Ok(trim(&nfa))
}
