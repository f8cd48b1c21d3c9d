//! Subset uniformization as a safety game between In and Out.
//!
//! In supplies input letters and finally `⊣`; Out answers with output
//! letters, yields the turn back or, after `⊣`, finishes with `⊣`. Out must
//! keep the synchronization alive in `S′` for as long as the input read so
//! far can still be completed to a word of the domain.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::automata::{
    determinize, erase_endmarkers, inclusion, is_endmarked, project_input, relation_contains, Dfa, Nfa, Partition,
    SequentialDfa, StateId, SyncWord, TaggedLetter, ENDMARK,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Owner {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Phase {
    Pre,
    Post,
}

/// Moves are ordered; the strategy takes the least winning one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Move {
    Yield,
    Emit(char),
    Finish,
    Read(char),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Yield => f.write_str("yield"),
            Move::Emit(c) => write!(f, "emit {c}"),
            Move::Finish => f.write_str("finish"),
            Move::Read(c) => write!(f, "read {c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vertex {
    Play { owner: Owner, sp: StateId, dom: StateId, phase: Phase, burst: usize },
    /// Out finished inside `S′`.
    Finished,
    /// The input left the domain; nothing is required any more.
    Vacuous,
    /// `S′` died while the input is still in the domain.
    Lost,
    /// Out emitted more than the cap without yielding.
    CapSink,
}

impl Vertex {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Vertex::Play { .. })
    }

    pub fn owner(&self) -> Option<Owner> {
        match self {
            Vertex::Play { owner, .. } => Some(*owner),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameArena {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Vec<(Move, usize)>>,
    pub initial: usize,
    pub cap: usize,
    /// Determinized `S′`.
    pub p: Dfa,
    /// Determinized input projection of `S′`.
    pub d: Dfa,
}

/// Default vertex limit for arena construction.
pub const DEFAULT_ARENA_CAP: usize = 2_000_000;

/// The arena with burst cap `|Q_P|·|Q_D| + 1`.
pub fn build_arena(s_prime: &Nfa) -> Result<GameArena> {
    if !is_endmarked(s_prime) {
        return Err(Error::MissingEndmarkers);
    }
    let p = determinize(s_prime);
    let d = determinize(&project_input(s_prime));
    let cap = p.num_states() * d.num_states() + 1;
    arena_from(p, d, cap, DEFAULT_ARENA_CAP)
}

/// The arena with an explicit burst cap and vertex limit.
pub fn build_arena_with(s_prime: &Nfa, cap: usize, limit: usize) -> Result<GameArena> {
    if !is_endmarked(s_prime) {
        return Err(Error::MissingEndmarkers);
    }
    arena_from(determinize(s_prime), determinize(&project_input(s_prime)), cap, limit)
}

fn arena_from(p: Dfa, d: Dfa, cap: usize, limit: usize) -> Result<GameArena> {
    let inputs: Vec<char> = p.alphabet.input.iter().copied().filter(|&c| c != ENDMARK).collect();
    let outputs: Vec<char> = p.alphabet.output.iter().copied().filter(|&c| c != ENDMARK).collect();
    let classify = |owner, sp: Option<StateId>, dom: Option<StateId>, phase, burst| match (sp, dom) {
        (_, None) => Vertex::Vacuous,
        (None, Some(_)) => Vertex::Lost,
        (Some(sp), Some(dom)) => Vertex::Play { owner, sp, dom, phase, burst },
    };
    let init = classify(Owner::Out, Some(p.initial()), Some(d.initial()), Phase::Pre, 0);
    let mut index: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut vertices = vec![init];
    let mut edges: Vec<Vec<(Move, usize)>> = vec![Vec::new()];
    index.insert(init, 0);
    let mut next = 0;
    while next < vertices.len() {
        let v = vertices[next];
        let mut moves: Vec<(Move, Vertex)> = Vec::new();
        if let Vertex::Play { owner, sp, dom, phase, burst } = v {
            match owner {
                Owner::Out => {
                    for &o in &outputs {
                        let target = if burst >= cap {
                            Vertex::CapSink
                        } else {
                            classify(Owner::Out, p.delta(sp, TaggedLetter::output(o)), Some(dom), phase, burst + 1)
                        };
                        moves.push((Move::Emit(o), target));
                    }
                    match phase {
                        Phase::Pre => moves.push((Move::Yield, Vertex::Play { owner: Owner::In, sp, dom, phase, burst: 0 })),
                        Phase::Post => {
                            if p.delta(sp, TaggedLetter::output(ENDMARK)).is_some_and(|f| p.is_final(f)) {
                                moves.push((Move::Finish, Vertex::Finished));
                            }
                        }
                    }
                }
                Owner::In => {
                    for &a in &inputs {
                        let l = TaggedLetter::input(a);
                        moves.push((Move::Read(a), classify(Owner::Out, p.delta(sp, l), d.delta(dom, l), Phase::Pre, 0)));
                    }
                    let l = TaggedLetter::input(ENDMARK);
                    moves.push((Move::Read(ENDMARK), classify(Owner::Out, p.delta(sp, l), d.delta(dom, l), Phase::Post, 0)));
                }
            }
        }
        for (m, w) in moves {
            let id = match index.get(&w) {
                Some(&id) => id,
                None => {
                    if vertices.len() >= limit {
                        return Err(Error::StateCapExceeded { what: "game arena".into(), cap: limit });
                    }
                    index.insert(w, vertices.len());
                    vertices.push(w);
                    edges.push(Vec::new());
                    vertices.len() - 1
                }
            };
            edges[next].push((m, id));
        }
        edges[next].sort();
        next += 1;
    }
    Ok(GameArena { vertices, edges, initial: 0, cap, p, d })
}

/// Out's positional strategy: one move per winning Out vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    pub moves: BTreeMap<usize, Move>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// `winning[v]` iff Out wins from `v`.
    pub winning: Vec<bool>,
    pub strategy: Strategy,
    pub iterations: usize,
}

impl Solution {
    pub fn out_wins(&self, arena: &GameArena) -> bool {
        self.winning[arena.initial]
    }

    pub fn region_size(&self) -> usize {
        self.winning.iter().filter(|&&w| w).count()
    }
}

/// Out's winning region and a positional strategy on it.
pub fn solve(arena: &GameArena) -> Solution {
    let n = arena.vertices.len();
    let mut win = vec![false; n];
    // Terminal vertices and the acyclic post-endmark part, deepest burst first.
    let mut post: Vec<usize> = Vec::new();
    let mut alive = vec![false; n];
    for (v, vx) in arena.vertices.iter().enumerate() {
        match vx {
            Vertex::Finished | Vertex::Vacuous => win[v] = true,
            Vertex::Play { phase: Phase::Post, .. } => post.push(v),
            Vertex::Play { phase: Phase::Pre, .. } => alive[v] = true,
            _ => {}
        }
    }
    let burst = |v: usize| match arena.vertices[v] {
        Vertex::Play { burst, .. } => burst,
        _ => 0,
    };
    post.sort_by_key(|&v| std::cmp::Reverse(burst(v)));
    for &v in &post {
        win[v] = arena.edges[v].iter().any(|&(_, w)| win[w]);
    }
    // Greatest fixpoint on the pre-endmark part.
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let good = |w: usize| win[w] || alive[w];
            let ok = match arena.vertices[v].owner() {
                Some(Owner::Out) => arena.edges[v].iter().any(|&(_, w)| good(w)),
                _ => arena.edges[v].iter().all(|&(_, w)| good(w)),
            };
            if !ok {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for v in 0..n {
        win[v] |= alive[v];
    }
    let mut strategy = Strategy::default();
    for v in 0..n {
        if win[v] && arena.vertices[v].owner() == Some(Owner::Out) {
            let m = arena.edges[v].iter().find(|&&(_, w)| win[w]).map(|&(m, _)| m).expect("winning Out vertex has a winning move");
            strategy.moves.insert(v, m);
        }
    }
    Solution { winning: win, strategy, iterations }
}

fn target(arena: &GameArena, v: usize, m: Move) -> usize {
    arena.edges[v].iter().find(|&&(mv, _)| mv == m).map(|&(_, w)| w).expect("move exists")
}

/// The sequential DFA that follows `strategy`. Inputs leaving the domain
/// lead to a non-accepting state that consumes everything.
pub fn extract_sdfa(arena: &GameArena, sol: &Solution) -> Result<SequentialDfa> {
    if !sol.out_wins(arena) {
        return Err(Error::NotWinning);
    }
    let mut d = Dfa::empty_with_states(arena.p.alphabet.clone());
    let mut partition = Partition::default();
    let mut state_of: BTreeMap<usize, StateId> = BTreeMap::new();
    let mut queue: Vec<usize> = Vec::new();
    let mut accept: Option<StateId> = None;
    let mut sink: Option<StateId> = None;
    // Out vertices that yield are represented by the In vertex they yield to.
    let resolve = |mut v: usize| {
        while sol.strategy.moves.get(&v) == Some(&Move::Yield) {
            v = target(arena, v, Move::Yield);
        }
        v
    };
    let start = resolve(arena.initial);
    let intern = |v: usize, d: &mut Dfa, queue: &mut Vec<usize>, state_of: &mut BTreeMap<usize, StateId>| {
        *state_of.entry(v).or_insert_with(|| {
            queue.push(v);
            d.add_state(format!("u{}", v))
        })
    };
    let s0 = intern(start, &mut d, &mut queue, &mut state_of);
    d.set_initial(s0);
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        let q = state_of[&v];
        match arena.vertices[v] {
            Vertex::Play { owner: Owner::Out, .. } => {
                partition.output_states.insert(q);
                match sol.strategy.moves[&v] {
                    Move::Emit(o) => {
                        let w = resolve(target(arena, v, Move::Emit(o)));
                        let t = intern(w, &mut d, &mut queue, &mut state_of);
                        d.set_transition(q, TaggedLetter::output(o), t);
                    }
                    Move::Finish => {
                        let t = *accept.get_or_insert_with(|| {
                            let t = d.add_state("accept");
                            d.set_final(t, true);
                            partition.input_states.insert(t);
                            t
                        });
                        d.set_transition(q, TaggedLetter::output(ENDMARK), t);
                    }
                    m => unreachable!("unexpected Out move {m}"),
                }
            }
            Vertex::Play { owner: Owner::In, .. } => {
                partition.input_states.insert(q);
                for &(m, w) in &arena.edges[v] {
                    let Move::Read(a) = m else { continue };
                    let t = if arena.vertices[w] == Vertex::Vacuous {
                        *sink.get_or_insert_with(|| {
                            let t = d.add_state("outside");
                            partition.input_states.insert(t);
                            t
                        })
                    } else {
                        intern(resolve(w), &mut d, &mut queue, &mut state_of)
                    };
                    d.set_transition(q, TaggedLetter::input(a), t);
                }
            }
            other => unreachable!("strategy reached terminal vertex {other:?}"),
        }
    }
    if let Some(t) = sink {
        for &a in &arena.p.alphabet.input {
            d.set_transition(t, TaggedLetter::input(a), t);
        }
    }
    // Stable names in state order.
    for q in d.states() {
        let name = match d.name(q) {
            "accept" | "outside" => d.name(q).to_string(),
            _ => format!("u{q}"),
        };
        d.set_name(q, name);
    }
    SequentialDfa::new(d, partition)
}

/// In's winning certificate: a move at each In vertex of the attractor and
/// ranks that strictly decrease along every play it allows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpoilingCertificate {
    pub in_moves: BTreeMap<usize, Move>,
    pub rank: BTreeMap<usize, usize>,
}

/// In's attractor to losing vertices, as a certificate, if it contains the
/// initial vertex.
pub fn spoiling_certificate(arena: &GameArena) -> Option<SpoilingCertificate> {
    let n = arena.vertices.len();
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut in_moves = BTreeMap::new();
    for (v, vx) in arena.vertices.iter().enumerate() {
        if matches!(vx, Vertex::Lost | Vertex::CapSink) {
            rank[v] = Some(0);
        }
    }
    let mut r = 0;
    loop {
        r += 1;
        let mut fresh = Vec::new();
        for v in 0..n {
            if rank[v].is_some() {
                continue;
            }
            match arena.vertices[v].owner() {
                Some(Owner::Out) => {
                    if arena.edges[v].iter().all(|&(_, w)| rank[w].is_some_and(|x| x < r)) {
                        fresh.push((v, None));
                    }
                }
                Some(Owner::In) => {
                    if let Some(&(m, _)) = arena.edges[v].iter().find(|&&(_, w)| rank[w].is_some_and(|x| x < r)) {
                        fresh.push((v, Some(m)));
                    }
                }
                None => {}
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (v, m) in fresh {
            rank[v] = Some(r);
            if let Some(m) = m {
                in_moves.insert(v, m);
            }
        }
    }
    rank[arena.initial]?;
    let rank = rank.iter().enumerate().filter_map(|(v, r)| r.map(|r| (v, r))).collect();
    Some(SpoilingCertificate { in_moves, rank })
}

/// Replays a certificate: from the initial vertex, In's moves and every Out
/// reply decrease the rank until a losing vertex is reached.
pub fn replay_spoiling(arena: &GameArena, cert: &SpoilingCertificate) -> bool {
    let mut stack = vec![arena.initial];
    let mut seen = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        let Some(&r) = cert.rank.get(&v) else { return false };
        let next: Vec<usize> = match arena.vertices[v] {
            Vertex::Lost | Vertex::CapSink => continue,
            Vertex::Finished | Vertex::Vacuous => return false,
            Vertex::Play { owner: Owner::In, .. } => match cert.in_moves.get(&v) {
                Some(&m) => match arena.edges[v].iter().find(|&&(mv, _)| mv == m) {
                    Some(&(_, w)) => vec![w],
                    None => return false,
                },
                None => return false,
            },
            Vertex::Play { owner: Owner::Out, .. } => arena.edges[v].iter().map(|&(_, w)| w).collect(),
        };
        for w in next {
            if cert.rank.get(&w).is_none_or(|&rw| rw >= r) {
                return false;
            }
            stack.push(w);
        }
    }
    true
}

/// The plays allowed by a certificate, unfolded into a tree; `None` if the
/// tree would exceed `limit` nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpoilingTree {
    pub vertex: usize,
    pub children: Vec<(Move, SpoilingTree)>,
}

pub fn spoiling_tree(arena: &GameArena, cert: &SpoilingCertificate, limit: usize) -> Option<SpoilingTree> {
    fn go(arena: &GameArena, cert: &SpoilingCertificate, v: usize, budget: &mut usize) -> Option<SpoilingTree> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let moves: Vec<(Move, usize)> = match arena.vertices[v] {
            Vertex::Play { owner: Owner::In, .. } => {
                let m = cert.in_moves[&v];
                vec![(m, target(arena, v, m))]
            }
            Vertex::Play { owner: Owner::Out, .. } => arena.edges[v].clone(),
            _ => Vec::new(),
        };
        let mut children = Vec::new();
        for (m, w) in moves {
            children.push((m, go(arena, cert, w, budget)?));
        }
        Some(SpoilingTree { vertex: v, children })
    }
    let mut budget = limit;
    go(arena, cert, arena.initial, &mut budget)
}

impl SpoilingTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.size()).sum::<usize>()
    }

    /// Every leaf is a losing vertex for Out.
    pub fn leaves_lose(&self, arena: &GameArena) -> bool {
        if self.children.is_empty() {
            return matches!(arena.vertices[self.vertex], Vertex::Lost | Vertex::CapSink | Vertex::Play { owner: Owner::Out, .. });
        }
        self.children.iter().all(|(_, c)| c.leaves_lose(arena))
    }
}

/// The first problem found by [`verify_uniformizer`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A word of the candidate lies outside the target.
    OutsideTarget { word: String },
    /// No output for a domain input.
    Missing { input: String },
    /// More than one accepted word for a domain input.
    Ambiguous { input: String },
    /// The produced pair is not in the source relation.
    OutsideRelation { input: String, output: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutsideTarget { word } => write!(f, "word {word} is not in the target"),
            Violation::Missing { input } => write!(f, "no output for domain input '{input}'"),
            Violation::Ambiguous { input } => write!(f, "several outputs for input '{input}'"),
            Violation::OutsideRelation { input, output } => write!(f, "pair ('{input}', '{output}') is not in the relation"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub depth: usize,
    pub inputs_checked: usize,
    pub violation: Option<Violation>,
}

/// Accepted words of `u` whose input projection is `input`, up to two.
fn runs_on(u: &SequentialDfa, input: &[char]) -> Vec<SyncWord> {
    let d = u.dfa();
    let mut found = Vec::new();
    let mut q = d.initial();
    let mut word = Vec::new();
    let mut idx = 0;
    let mut steps = 0usize;
    let bound = d.num_states() * (input.len() + 2) + 2;
    loop {
        if idx == input.len() && d.is_final(q) {
            found.push(SyncWord(word.clone()));
            if found.len() > 1 {
                return found;
            }
        }
        steps += 1;
        if steps > bound {
            return found;
        }
        if u.is_output_state(q) {
            let Some((&l, &t)) = d.out(q).iter().next() else { return found };
            word.push(l);
            q = t;
        } else if idx < input.len() {
            let l = TaggedLetter::input(input[idx]);
            let Some(t) = d.delta(q, l) else { return found };
            word.push(l);
            q = t;
            idx += 1;
        } else {
            return found;
        }
    }
}

/// Checks `L(u) ⊆ T` and, for every domain input up to `depth` letters, that
/// `u` produces exactly one pair and that it lies in `⟦S⟧`. Endmarkers in `u`
/// are fed after the input and erased before comparison.
pub fn verify_uniformizer(u: &SequentialDfa, s: &Nfa, t: &Nfa, depth: usize) -> VerifyReport {
    let marked = u.dfa().alphabet.input.contains(&ENDMARK);
    let lang = erase_endmarkers(&u.dfa().to_nfa());
    let mut report = VerifyReport { passed: false, depth, inputs_checked: 0, violation: None };
    if let Err(w) = inclusion(&lang, t) {
        report.violation = Some(Violation::OutsideTarget { word: w.to_string() });
        return report;
    }
    let dom = determinize(&project_input(s));
    let letters: Vec<char> = s.alphabet.input.iter().copied().filter(|&c| c != ENDMARK).collect();
    let mut layer: Vec<Vec<char>> = vec![Vec::new()];
    for len in 0..=depth {
        for x in &layer {
            let xs: String = x.iter().collect();
            if !dom.accepts(&x.iter().map(|&c| TaggedLetter::input(c)).collect::<Vec<_>>()) {
                continue;
            }
            report.inputs_checked += 1;
            let mut fed = x.clone();
            if marked {
                fed.push(ENDMARK);
            }
            let runs = runs_on(u, &fed);
            match runs.len() {
                0 => {
                    report.violation = Some(Violation::Missing { input: xs });
                    return report;
                }
                1 => {}
                _ => {
                    report.violation = Some(Violation::Ambiguous { input: xs });
                    return report;
                }
            }
            let (_, y) = runs[0].decode();
            let y: Vec<char> = y.chars().filter(|&c| c != ENDMARK).collect();
            if !relation_contains(s, x, &y) {
                report.violation = Some(Violation::OutsideRelation { input: xs, output: y.iter().collect() });
                return report;
            }
        }
        if len == depth {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|x| letters.iter().map(move |&c| {
                let mut y = x.clone();
                y.push(c);
                y
            }))
            .collect();
    }
    report.passed = true;
    report
}
