//! The uniformization game searched directly over reach sets of the endmarked
//! NFA, without building an arena.

use std::collections::{BTreeSet, HashMap, VecDeque};

use syncsynth::automata::{add_endmarkers, Nfa, TaggedLetter, Tape, ENDMARK};
use syncsynth::canonical::{canonicalize, input_first};
use syncsynth::corpus::{self, build};
use syncsynth::resync::{build_ti, build_tis, build_tprime_recognizable, ResyncParams};
use syncsynth::sync::shiftlag_finiteness;
use syncsynth::{Alphabet, Dfa};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Config {
    /// Live states reached on the word so far.
    sp: BTreeSet<usize>,
    /// Live states reachable on the input so far with any outputs.
    dom: BTreeSet<usize>,
    post: bool,
    out_turn: bool,
    burst: usize,
}

enum Next {
    Win,
    Lose,
    Go(Config),
}

pub struct Oracle<'a> {
    a: &'a Nfa,
    live: Vec<bool>,
    inputs: Vec<char>,
    outputs: Vec<char>,
    cap: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(a: &'a Nfa) -> Self {
        let live = a.coreachable();
        let inputs = a.alphabet.input.iter().copied().filter(|&c| c != ENDMARK).collect();
        let outputs = a.alphabet.output.iter().copied().filter(|&c| c != ENDMARK).collect();
        let mut o = Oracle { a, live, inputs, outputs, cap: 0 };
        // Distinct (sp, dom) pairs bound any useful run of emissions; with
        // cap 0 bursts are not counted.
        o.cap = o.reachable().iter().map(|c| (&c.sp, &c.dom)).collect::<BTreeSet<_>>().len() + 1;
        o
    }

    fn keep_live(&self, s: BTreeSet<usize>) -> BTreeSet<usize> {
        s.into_iter().filter(|&q| self.live[q]).collect()
    }

    fn output_closure(&self, s: BTreeSet<usize>) -> BTreeSet<usize> {
        let mut seen = s.clone();
        let mut stack: Vec<usize> = s.into_iter().collect();
        while let Some(q) = stack.pop() {
            for (l, ts) in self.a.out(q) {
                if l.tape == Tape::Output && l.symbol != ENDMARK {
                    for &t in ts {
                        if seen.insert(t) {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        seen
    }

    fn initial(&self) -> Config {
        let init = BTreeSet::from([self.a.initial()]);
        Config { sp: self.keep_live(init.clone()), dom: self.keep_live(self.output_closure(init)), post: false, out_turn: true, burst: 0 }
    }

    fn moves(&self, c: &Config) -> Vec<Next> {
        let mut v = Vec::new();
        if c.out_turn {
            for &o in &self.outputs {
                let sp = self.keep_live(self.a.step(&c.sp, TaggedLetter::output(o)));
                let burst = if self.cap == 0 { 0 } else { c.burst + 1 };
                v.push(if sp.is_empty() || (self.cap > 0 && burst >= self.cap) {
                    Next::Lose
                } else {
                    Next::Go(Config { sp, burst, ..c.clone() })
                });
            }
            if c.post {
                let done = self.a.step(&c.sp, TaggedLetter::output(ENDMARK));
                if done.iter().any(|&q| self.a.is_final(q)) {
                    v.push(Next::Win);
                }
            } else {
                v.push(Next::Go(Config { out_turn: false, burst: 0, ..c.clone() }));
            }
        } else {
            for &i in self.inputs.iter().chain([&ENDMARK]) {
                let l = TaggedLetter::input(i);
                let dom = self.keep_live(self.output_closure(self.a.step(&c.dom, l)));
                let sp = self.keep_live(self.a.step(&c.sp, l));
                let post = i == ENDMARK;
                v.push(if dom.is_empty() {
                    Next::Win
                } else if sp.is_empty() {
                    Next::Lose
                } else {
                    Next::Go(Config { sp, dom, post, out_turn: true, burst: 0 })
                });
            }
        }
        v
    }

    fn reachable(&self) -> Vec<Config> {
        let mut seen = BTreeSet::from([self.initial()]);
        let mut queue = VecDeque::from([self.initial()]);
        while let Some(c) = queue.pop_front() {
            for n in self.moves(&c) {
                if let Next::Go(d) = n {
                    if seen.insert(d.clone()) {
                        queue.push_back(d);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Whether Out survives `depth` more moves from `c`.
    fn survives(&self, c: &Config, depth: usize, memo: &mut HashMap<(Config, usize), bool>) -> bool {
        if depth == 0 {
            return true;
        }
        if let Some(&r) = memo.get(&(c.clone(), depth)) {
            return r;
        }
        let mut results = self.moves(c).into_iter().map(|n| match n {
            Next::Win => true,
            Next::Lose => false,
            Next::Go(d) => self.survives(&d, depth - 1, memo),
        });
        let r = if c.out_turn { results.any(|x| x) } else { results.all(|x| x) };
        memo.insert((c.clone(), depth), r);
        r
    }

    /// Out wins iff In cannot force a loss within as many moves as there are
    /// configurations.
    pub fn out_wins(&self) -> bool {
        let n = self.reachable().len();
        self.survives(&self.initial(), n + 1, &mut HashMap::new())
    }

    pub fn configurations(&self) -> usize {
        self.reachable().len()
    }
}

pub fn tprime(s: Dfa, t: Dfa) -> Nfa {
    add_endmarkers(&build_tprime_recognizable(&input_first(&s.to_nfa()).unwrap(), &t).unwrap()).unwrap()
}

/// Tiny endmarked languages with the expected winner.
pub fn tiny_games() -> Vec<(&'static str, Nfa, bool)> {
    let de = || Alphabet::new("ab", "de");
    let mut v = vec![
        ("single word", add_endmarkers(&build(Alphabet::new("a", "d"), &["0", "1", "2"], &["2"], &[("0", "1a", "1"), ("1", "2d", "2")])).unwrap(), true),
        ("choice", tprime(corpus::choice_source(), corpus::choice_target()), true),
        ("early choice", tprime(corpus::early_choice_source(), corpus::early_choice_target()), false),
        ("constant output", tprime(corpus::constant_output_source(), corpus::input_first_target(Alphabet::new("a", "d"))), true),
        ("either output", tprime(corpus::either_output_source(), corpus::output_first_target()), true),
        ("block", tprime(corpus::block_source(), corpus::block_target()), true),
        (
            "answer before question",
            add_endmarkers(&build(de(), &["0", "1", "2", "3"], &["3"], &[("0", "2d", "1"), ("0", "2e", "2"), ("1", "1a", "3"), ("2", "1b", "3")])).unwrap(),
            false,
        ),
        (
            "answer after length",
            add_endmarkers(&build(de(), &["0", "1", "2", "3", "4"], &["2", "4"], &[("0", "1a", "1"), ("1", "2d", "2"), ("1", "1a", "3"), ("3", "2e", "4")])).unwrap(),
            true,
        ),
        (
            "optional preamble",
            add_endmarkers(&build(Alphabet::new("a", "d"), &["0", "1"], &["1"], &[("0", "2d", "0"), ("0", "1a", "1")])).unwrap(),
            true,
        ),
    ];
    let s = corpus::stride_source().to_nfa();
    let a = canonicalize(&s, &shiftlag_finiteness(&s, None).unwrap()).unwrap();
    let t = corpus::stride_target();
    let p = ResyncParams::for_target(&t, &shiftlag_finiteness(&t.to_nfa(), None).unwrap(), 1).unwrap();
    v.push(("stride at block cap 1", add_endmarkers(&build_tis(&a, &build_ti(&t, &p), &p).unwrap()).unwrap(), true));
    v
}
