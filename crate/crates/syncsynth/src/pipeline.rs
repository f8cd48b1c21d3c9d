//! End-to-end decision procedure: does `S` have a `T`-controlled sequential
//! uniformizer?

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::automata::{
    add_endmarkers, determinize, equivalent, project_input, trim, Nfa, SequentialDfa, DEFAULT_STATE_CAP,
};
use crate::canonical::{canonicalize_capped, input_first_capped};
use crate::error::{Error, Result};
use crate::game::{
    build_arena_with, extract_sdfa, replay_spoiling, solve, spoiling_certificate, spoiling_tree, verify_uniformizer,
    GameArena, VerifyReport, DEFAULT_ARENA_CAP,
};
use crate::io::AutomatonJson;
use crate::profiles::{compute_k, KBound, DEFAULT_CLOSURE_CAP};
use crate::resync::{build_ti, build_tis_capped, build_tprime_recognizable, ResyncParams};
use crate::sync::{shift_finiteness, shiftlag_finiteness, ShiftlagCertificate, ShiftlagVerdict};

/// Environment variable mirroring `--cap`.
pub const CAP_ENV: &str = "SYNCSYNTH_CAP";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Replaces the computed `k`.
    pub k_override: Option<usize>,
    /// Verification depth for synthesized machines.
    pub depth: usize,
    /// Largest block cap actually built; a larger computed `k` is INCONCLUSIVE.
    pub k_cap: usize,
    pub closure_cap: usize,
    pub state_cap: usize,
    pub arena_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_override: None,
            depth: 8,
            k_cap: 3,
            closure_cap: DEFAULT_CLOSURE_CAP,
            state_cap: DEFAULT_STATE_CAP,
            arena_cap: DEFAULT_ARENA_CAP,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.k_cap == 0 || self.closure_cap == 0 || self.state_cap == 0 || self.arena_cap == 0 {
            return Err(Error::Config("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

impl Answer {
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Yes => 0,
            Answer::No => 1,
            Answer::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    General,
    Recognizable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KSource {
    Override,
    Computed,
}

/// Why a NO (or a negative best-effort run) was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "lowercase")]
pub enum Witness {
    /// An input in `dom(⟦S⟧)` that no target-controlled synchronization covers.
    Domain { input: String },
    /// In wins the uniformization game.
    Game { in_vertices: usize, max_rank: usize, replayed: bool, tree_size: Option<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub answer: Answer,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_used: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_source: Option<KSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bound: Option<KBound>,
    /// Output-block cap `i` the automata were built with.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_cap: Option<usize>,
    /// Outcome at `block_cap` when the answer is INCONCLUSIVE; a `No` here
    /// says nothing about the instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_effort: Option<Answer>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub sizes: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "machine_json")]
    pub machine: Option<SequentialDfa>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
    /// Wall-clock time per stage; kept out of JSON so reports are reproducible.
    #[serde(skip)]
    pub timings: Vec<(String, Duration)>,
}

fn machine_json<S: Serializer>(m: &Option<SequentialDfa>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(AutomatonJson::from_sequential).serialize(s)
}

impl Verdict {
    fn new(route: Route) -> Self {
        Verdict {
            answer: Answer::Inconclusive,
            route,
            k_used: None,
            k_source: None,
            k_bound: None,
            block_cap: None,
            best_effort: None,
            gamma: None,
            n: None,
            sizes: BTreeMap::new(),
            witness: None,
            machine: None,
            verification: None,
            timings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }

    fn size(&mut self, key: &str, v: usize) {
        self.sizes.insert(key.to_string(), v);
    }
}

struct Clock(Instant);

impl Clock {
    fn start() -> Self {
        Clock(Instant::now())
    }
    fn lap(&mut self, v: &mut Verdict, stage: &str) {
        let now = Instant::now();
        v.timings.push((stage.to_string(), now - self.0));
        self.0 = now;
    }
}

/// Shiftlag certificates of source and target, or the hypothesis they violate.
pub fn check_hypotheses(s: &Nfa, t: &Nfa) -> Result<(ShiftlagCertificate, ShiftlagCertificate)> {
    let cs = shiftlag_finiteness(s, None)?;
    let ct = shiftlag_finiteness(t, None)?;
    for (which, c) in [("source", &cs), ("target", &ct)] {
        if let ShiftlagVerdict::Infinite { witness } = &c.verdict {
            return Err(Error::OutsideHypotheses { which: which.into(), witness: witness.to_string() });
        }
    }
    Ok((cs, ct))
}

/// Decides the instance. A source with finitely many shifts takes the exact
/// recognizable route; otherwise both languages need finite shiftlag.
pub fn decide(s: &Nfa, t: &Nfa, cfg: &PipelineConfig) -> Result<Verdict> {
    cfg.validate()?;
    if shift_finiteness(s).is_finite() {
        return decide_recognizable(s, t, cfg);
    }
    decide_general(s, t, cfg)
}

/// The bounded-resynchronization procedure, never dispatching.
pub fn decide_general(s: &Nfa, t: &Nfa, cfg: &PipelineConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut v = Verdict::new(Route::General);
    let mut clock = Clock::start();
    let (cs, ct) = check_hypotheses(s, t)?;
    clock.lap(&mut v, "classify");
    let a = canonicalize_capped(s, &cs, cfg.state_cap)?;
    v.size("canonical_states", a.dfa().num_states());
    clock.lap(&mut v, "canonicalize");
    let tdfa = determinize(t);
    let base = ResyncParams::for_target(&tdfa, &ct, 0)?;
    v.n = Some(base.n);
    v.gamma = Some(base.gamma);

    // Block cap and whether a negative outcome at that cap is a NO.
    let (i, conclusive) = match cfg.k_override {
        Some(k) => {
            v.k_used = Some(k.to_string());
            v.k_source = Some(KSource::Override);
            (k, true)
        }
        None => {
            v.k_source = Some(KSource::Computed);
            let bound = compute_k(base.n, base.gamma, &a, &tdfa, cfg.closure_cap);
            clock.lap(&mut v, "profiles");
            let exact = bound.as_ref().ok().and_then(|b| {
                let k = b.k_usize()?;
                // With a tightened lead, T_k sits inside the capped language only at n·k + 2γ.
                let cap = if base.lead < base.gamma { base.n.checked_mul(k)?.checked_add(2 * base.gamma)? } else { k };
                Some(cap)
            });
            if let Ok(b) = bound {
                v.size("input_profiles", b.input_profiles);
                v.size("output_profiles", b.output_profiles);
                v.k_used = Some(b.k.to_string());
                v.k_bound = Some(b);
            }
            match exact {
                Some(cap) if cap <= cfg.k_cap => (cap, true),
                _ => (cfg.k_cap, false),
            }
        }
    };
    let p = base.with_i(i);
    v.block_cap = Some(i);
    let ti = build_ti(&tdfa, &p);
    v.size("ti_states", ti.num_states());
    let tis = build_tis_capped(&a, &ti, &p, cfg.state_cap)?;
    v.size("tis_states", tis.num_states());
    clock.lap(&mut v, "resync");
    let outcome = subset_game(s, t, &tis, cfg, &mut v, &mut clock)?;
    v.answer = if conclusive {
        outcome
    } else {
        v.best_effort = Some(outcome);
        if outcome == Answer::Yes {
            // T_i ⊆ T, so a machine at any cap is a uniformizer.
            Answer::Yes
        } else {
            Answer::Inconclusive
        }
    };
    Ok(v)
}

/// The exact procedure for a source with finitely many shifts.
pub fn decide_recognizable(s: &Nfa, t: &Nfa, cfg: &PipelineConfig) -> Result<Verdict> {
    cfg.validate()?;
    let mut v = Verdict::new(Route::Recognizable);
    let mut clock = Clock::start();
    let first = input_first_capped(s, cfg.state_cap)?;
    v.size("input_first_states", first.num_states());
    let tprime = build_tprime_recognizable(&first, &determinize(t))?;
    v.size("tprime_states", tprime.num_states());
    clock.lap(&mut v, "resync");
    v.answer = subset_game(s, t, &tprime, cfg, &mut v, &mut clock)?;
    Ok(v)
}

/// Domain equality, then the subset-uniformization game on `r ⊆ T`.
fn subset_game(s: &Nfa, t: &Nfa, r: &Nfa, cfg: &PipelineConfig, v: &mut Verdict, clock: &mut Clock) -> Result<Answer> {
    if let Some(input) = domain_gap(s, r) {
        v.witness = Some(Witness::Domain { input });
        clock.lap(v, "domain");
        return Ok(Answer::No);
    }
    clock.lap(v, "domain");
    let endmarked = add_endmarkers(&trim(r))?;
    let arena = arena_for(&endmarked, cfg)?;
    v.size("arena_vertices", arena.vertices.len());
    let sol = solve(&arena);
    v.size("winning_region", sol.region_size());
    v.size("solve_iterations", sol.iterations);
    clock.lap(v, "solve");
    if sol.out_wins(&arena) {
        let machine = extract_sdfa(&arena, &sol)?;
        v.size("machine_states", machine.dfa().num_states());
        let report = verify_uniformizer(&machine, s, t, cfg.depth);
        clock.lap(v, "verify");
        if !report.passed {
            let reason = report.violation.map(|w| w.to_string()).unwrap_or_default();
            return Err(Error::InvalidCertificate { reason: format!("synthesized machine failed verification: {reason}") });
        }
        v.machine = Some(machine);
        v.verification = Some(report);
        Ok(Answer::Yes)
    } else {
        v.witness = Some(spoiling_witness(&arena));
        clock.lap(v, "certificate");
        Ok(Answer::No)
    }
}

fn arena_for(endmarked: &Nfa, cfg: &PipelineConfig) -> Result<GameArena> {
    let p = determinize(endmarked);
    let d = determinize(&project_input(endmarked));
    build_arena_with(endmarked, p.num_states() * d.num_states() + 1, cfg.arena_cap)
}

/// An input of `dom(⟦s⟧)` outside `dom(⟦r⟧)`, or the reverse.
pub fn domain_gap(s: &Nfa, r: &Nfa) -> Option<String> {
    equivalent(&project_input(s), &project_input(r)).err().map(|w| w.decode().0)
}

fn spoiling_witness(arena: &GameArena) -> Witness {
    let cert = spoiling_certificate(arena).expect("determinacy: In wins where Out does not");
    let replayed = replay_spoiling(arena, &cert);
    let tree_size = spoiling_tree(arena, &cert, 100_000).map(|t| t.size());
    Witness::Game {
        in_vertices: cert.in_moves.len(),
        max_rank: cert.rank.values().copied().max().unwrap_or(0),
        replayed,
        tree_size,
    }
}
