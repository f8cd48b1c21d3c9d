//! Input and output profiles, their concatenation, closures and the bound `k`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use serde::Serialize;

use super::stt::{block_reach, AnnTree, Builder, Flavor, PairLabel, SttTree};
use super::tree::LabeledTree;
use crate::automata::{Dfa, StateId, TaggedLetter, Tape};
use crate::canonical::CanonicalDfa;
use crate::error::{Error, Result};

/// Default number of profiles a closure may discover.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

/// `τ_w`: `p ↦ δ*_B(p, w)`, `None` for ⊥.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateTransformationFn(pub Vec<Option<StateId>>);

impl StateTransformationFn {
    pub fn identity(n: usize) -> Self {
        StateTransformationFn((0..n).map(Some).collect())
    }

    pub fn apply(&self, p: StateId) -> Option<StateId> {
        self.0[p]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        StateTransformationFn(self.0.iter().map(|p| p.and_then(|p| next.0[p])).collect())
    }
}

/// `τ_w` for a single-tape word.
pub fn tau(w: &[TaggedLetter], b: &Dfa) -> Result<StateTransformationFn> {
    if w.windows(2).any(|p| p[0].tape != p[1].tape) {
        return Err(Error::MixedTapes);
    }
    Ok(StateTransformationFn(b.states().map(|p| b.run_from(p, w)).collect()))
}

/// What a profile was built over; concatenation requires equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProfileParams {
    pub n: usize,
    pub depth: usize,
    pub qa: usize,
    pub qb: usize,
}

/// Profile of an input word. Besides the trees at depth `⌈n/2⌉` it keeps
/// every shallower depth and both flavors, which concatenation consumes.
/// The empty word gets its own element, the monoid identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InputProfile {
    pub params: ProfileParams,
    pub empty: bool,
    pub tau: StateTransformationFn,
    top: Vec<Vec<SttTree>>,
    nested: Vec<Vec<SttTree>>,
}

impl InputProfile {
    /// Reduced `STT^⌈n/2⌉` for every `(p, q)`, indexed `p * |Q_A| + q`.
    pub fn trees(&self) -> &[SttTree] {
        &self.top[self.params.depth]
    }

    pub fn tree(&self, p: StateId, q: StateId) -> &SttTree {
        &self.trees()[p * self.params.qa + q]
    }
}

/// Profile of an output word: `τ_y` and the annotated trees. The stored
/// representative is not part of its identity.
#[derive(Clone, Debug, Serialize)]
pub struct OutputProfile {
    pub params: ProfileParams,
    pub empty: bool,
    pub tau: StateTransformationFn,
    pub trees: Vec<AnnTree>,
    pub representative: String,
}

impl PartialEq for OutputProfile {
    fn eq(&self, o: &Self) -> bool {
        (self.params, self.empty, &self.tau, &self.trees) == (o.params, o.empty, &o.tau, &o.trees)
    }
}

impl Eq for OutputProfile {}

impl Hash for OutputProfile {
    fn hash<H: Hasher>(&self, h: &mut H) {
        (self.params, self.empty, &self.tau, &self.trees).hash(h);
    }
}

/// Profile computations for fixed automata and `n`.
pub struct ProfileContext {
    a: Dfa,
    b: Dfa,
    params: ProfileParams,
    input_reach: Vec<BTreeSet<StateId>>,
    output_reach: Vec<BTreeSet<StateId>>,
}

impl ProfileContext {
    pub fn new(n: usize, a: &CanonicalDfa, b: &Dfa) -> Self {
        let a = a.dfa().clone();
        let params = ProfileParams { n, depth: n.div_ceil(2), qa: a.num_states(), qb: b.num_states() };
        ProfileContext {
            input_reach: block_reach(b, Tape::Input),
            output_reach: block_reach(b, Tape::Output),
            a,
            b: b.clone(),
            params,
        }
    }

    pub fn params(&self) -> ProfileParams {
        self.params
    }

    fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        let qa = self.params.qa;
        (0..self.params.qb).flat_map(move |p| (0..qa).map(move |q| (p, q)))
    }

    fn word(tape: Tape, w: &str) -> Vec<TaggedLetter> {
        w.chars().map(|c| TaggedLetter::new(tape, c)).collect()
    }

    pub fn input_profile(&self, x: &str) -> InputProfile {
        let mut bl = Builder::new(&self.a, &self.b, Tape::Input, x, &self.input_reach, true);
        let depths = 0..=self.params.depth;
        let mut build = |flavor| -> Vec<Vec<SttTree>> {
            depths.clone().map(|d| self.pairs().map(|(p, q)| bl.tree(0, p, q, d, flavor)).collect()).collect()
        };
        let top = build(Flavor::Top);
        let nested = build(Flavor::Nested);
        InputProfile {
            params: self.params,
            empty: x.is_empty(),
            tau: tau(&Self::word(Tape::Input, x), &self.b).expect("single tape"),
            top,
            nested,
        }
    }

    pub fn output_profile(&self, y: &str) -> OutputProfile {
        let mut bl = Builder::new(&self.a, &self.b, Tape::Output, y, &self.output_reach, true);
        let trees = self.pairs().map(|(p, q)| bl.annotated_root(p, q, self.params.depth).0).collect();
        OutputProfile {
            params: self.params,
            empty: y.is_empty(),
            tau: tau(&Self::word(Tape::Output, y), &self.b).expect("single tape"),
            trees,
            representative: y.to_string(),
        }
    }

    /// `P_{x₁x₂}` from `P_{x₁}` and `P_{x₂}` by splicing trees.
    pub fn concat(&self, p1: &InputProfile, p2: &InputProfile) -> Result<InputProfile> {
        if p1.params != self.params || p2.params != self.params {
            return Err(Error::ParameterMismatch);
        }
        if p1.empty {
            return Ok(p2.clone());
        }
        if p2.empty {
            return Ok(p1.clone());
        }
        let splice_all = |trees: &Vec<Vec<SttTree>>| -> Vec<Vec<SttTree>> {
            trees
                .iter()
                .enumerate()
                .map(|(d, row)| row.iter().map(|t| self.splice(t, 0, d, p2).expect("roots survive")).collect())
                .collect()
        };
        Ok(InputProfile {
            params: self.params,
            empty: false,
            tau: p1.tau.then(&p2.tau),
            top: splice_all(&p1.top),
            nested: splice_all(&p1.nested),
        })
    }

    /// Splices the node `u` at height `2i` of a depth-`d` tree of `x₁`.
    /// Leaves extend their output block into `x₂` through `u`, and continue
    /// with an input block when budget remains.
    fn splice(&self, u: &SttTree, i: usize, d: usize, p2: &InputProfile) -> Option<SttTree> {
        let qa = self.params.qa;
        let mut children = Vec::new();
        for v in &u.children {
            let PairLabel { p, q } = v.label;
            if v.is_leaf() {
                children.extend(p2.top[d - i][p * qa + q].children.iter().cloned());
                if i < d {
                    let gains: Vec<SttTree> = self.input_reach[p]
                        .iter()
                        .map(|&p1| &p2.nested[d - i - 1][p1 * qa + q])
                        .filter(|t| !t.is_leaf())
                        .cloned()
                        .collect();
                    if !gains.is_empty() {
                        children.push(LabeledTree::reduced_node(v.label, gains));
                    }
                }
            } else {
                let kids: Vec<SttTree> = v.children.iter().filter_map(|w| self.splice(w, i + 1, d, p2)).collect();
                if !kids.is_empty() {
                    children.push(LabeledTree::reduced_node(v.label, kids));
                }
            }
        }
        (i == 0 || !children.is_empty()).then(|| LabeledTree::reduced_node(u.label, children))
    }

    /// Output profiles concatenate through their representatives.
    pub fn concat_output(&self, p1: &OutputProfile, p2: &OutputProfile) -> Result<OutputProfile> {
        if p1.params != self.params || p2.params != self.params {
            return Err(Error::ParameterMismatch);
        }
        Ok(self.output_profile(&format!("{}{}", p1.representative, p2.representative)))
    }

    /// Shortest factor `x[i..=j]` (1-based) whose profile is idempotent.
    pub fn find_idempotent_factor(&self, x: &str) -> Option<(usize, usize)> {
        let chars: Vec<char> = x.chars().collect();
        let letters: Vec<InputProfile> = chars.iter().map(|c| self.input_profile(&c.to_string())).collect();
        // rows[i] holds the profile of x[i..i+len] for the current length.
        let mut rows: Vec<InputProfile> = letters.clone();
        for len in 1..=chars.len() {
            for (i, pf) in rows.iter().enumerate() {
                if &self.concat(pf, pf).expect("same context") == pf {
                    return Some((i + 1, i + len));
                }
            }
            rows = (0..chars.len().saturating_sub(len))
                .map(|i| self.concat(&rows[i], &letters[i + len]).expect("same context"))
                .collect();
        }
        None
    }

    /// A longest input word without an idempotent factor. Every longer word
    /// has one. Gives up with `None` past `limit` letters.
    pub fn longest_idempotent_free(&self, limit: usize) -> Option<String> {
        let letters: Vec<(char, InputProfile)> =
            self.b.alphabet.input.iter().map(|&c| (c, self.input_profile(&c.to_string()))).collect();
        let idem = |p: &InputProfile| &self.concat(p, p).expect("same context") == p;
        // Each frame: the word and the profiles of all its suffixes.
        let mut stack: Vec<(String, Vec<InputProfile>)> = vec![(String::new(), Vec::new())];
        let mut best = String::new();
        while let Some((w, suffixes)) = stack.pop() {
            if w.chars().count() > best.chars().count() {
                best = w.clone();
            }
            if best.chars().count() > limit {
                return None;
            }
            for (c, pc) in &letters {
                let mut next: Vec<InputProfile> =
                    suffixes.iter().map(|s| self.concat(s, pc).expect("same context")).collect();
                next.push(pc.clone());
                if !next.iter().any(idem) {
                    stack.push((format!("{w}{c}"), next));
                }
            }
        }
        Some(best)
    }

    pub fn input_closure(&self, cap: usize) -> Result<Closure<InputProfile>> {
        let letters: Vec<(char, InputProfile)> =
            self.b.alphabet.input.iter().map(|&c| (c, self.input_profile(&c.to_string()))).collect();
        closure(self.input_profile(""), cap, |p, _| {
            letters.iter().map(|(c, l)| (*c, self.concat(p, l).expect("same context"))).collect()
        })
    }

    pub fn output_closure(&self, cap: usize) -> Result<Closure<OutputProfile>> {
        let letters: Vec<char> = self.b.alphabet.output.iter().copied().collect();
        closure(self.output_profile(""), cap, |_, rep| {
            letters.iter().map(|&c| (c, self.output_profile(&format!("{rep}{c}")))).collect()
        })
    }
}

/// Reachable profiles with a shortest representative each.
#[derive(Clone, Debug)]
pub struct Closure<P> {
    pub profiles: Vec<(P, String)>,
    /// Maximum over profiles of the shortest representative length.
    pub radius: usize,
}

impl<P> Closure<P> {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

fn closure<P: Clone + Eq + Hash>(
    start: P,
    cap: usize,
    mut succ: impl FnMut(&P, &str) -> Vec<(char, P)>,
) -> Result<Closure<P>> {
    let mut seen: HashMap<P, usize> = HashMap::new();
    let mut profiles = vec![(start.clone(), String::new())];
    seen.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut radius = 0;
    while let Some(i) = queue.pop_front() {
        let (p, rep) = profiles[i].clone();
        for (c, next) in succ(&p, &rep) {
            if seen.contains_key(&next) {
                continue;
            }
            if profiles.len() >= cap {
                return Err(Error::ClosureCapExceeded { cap });
            }
            let rep2 = format!("{rep}{c}");
            radius = radius.max(rep2.chars().count());
            seen.insert(next.clone(), profiles.len());
            queue.push_back(profiles.len());
            profiles.push((next, rep2));
        }
    }
    Ok(Closure { profiles, radius })
}

/// `⌊e·c!⌋ + 1`, the multicolour triangle Ramsey bound.
pub fn ramsey_bound(c: usize) -> BigUint {
    if c == 0 {
        return BigUint::from(3u32);
    }
    // ⌊e·c!⌋ = Σ_{j ≤ c} c!/j! for c ≥ 1.
    let mut term = BigUint::from(1u32);
    let mut sum = BigUint::from(1u32);
    for j in (1..=c).rev() {
        term *= j;
        sum += &term;
    }
    sum + 1u32
}

/// The bound `k = r₁ + r₂` and what it was derived from.
#[derive(Clone, Debug, Serialize)]
pub struct KBound {
    pub input_profiles: usize,
    pub output_profiles: usize,
    #[serde(serialize_with = "decimal")]
    pub r1: BigUint,
    pub r2: usize,
    #[serde(serialize_with = "decimal")]
    pub k: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl KBound {
    /// `k` as a machine integer, if it fits.
    pub fn k_usize(&self) -> Option<usize> {
        usize::try_from(&self.k).ok()
    }
}

/// `k` from the profile closures, with both summands clamped above `γ`.
pub fn compute_k(n: usize, gamma: usize, a: &CanonicalDfa, b: &Dfa, cap: usize) -> Result<KBound> {
    let ctx = ProfileContext::new(n, a, b);
    let inputs = ctx.input_closure(cap)?;
    let outputs = ctx.output_closure(cap)?;
    Ok(k_from_counts(inputs.len(), outputs.len(), outputs.radius, gamma))
}

pub fn k_from_counts(input_profiles: usize, output_profiles: usize, radius: usize, gamma: usize) -> KBound {
    let floor = BigUint::from(gamma + 1);
    let r1 = ramsey_bound(input_profiles).max(floor.clone());
    let r2 = radius.max(gamma + 1);
    let k = &r1 + r2;
    KBound { input_profiles, output_profiles, r1, r2, k }
}

pub fn input_profile(x: &str, n: usize, a: &CanonicalDfa, b: &Dfa) -> InputProfile {
    ProfileContext::new(n, a, b).input_profile(x)
}

pub fn output_profile(y: &str, n: usize, a: &CanonicalDfa, b: &Dfa) -> OutputProfile {
    ProfileContext::new(n, a, b).output_profile(y)
}

pub fn find_idempotent_factor(x: &str, n: usize, a: &CanonicalDfa, b: &Dfa) -> Option<(usize, usize)> {
    ProfileContext::new(n, a, b).find_idempotent_factor(x)
}
