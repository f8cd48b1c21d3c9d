//! State transformation trees of input and output segments.
//!
//! A tree for a segment `z` rooted at `(p, q)` records the `(B, A)` states
//! reachable by pairing `z` with counterpart blocks in canonical order. Even
//! levels branch on counterpart blocks, odd levels on intermediate blocks of
//! the segment's own tape. Levels below the root only admit non-empty
//! counterpart blocks, and branches that die out are pruned.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::tree::LabeledTree;
use crate::automata::{Dfa, StateId, TaggedLetter, Tape};
use crate::canonical::CanonicalDfa;

/// `(p, q)` with `p ∈ Q_B` and `q ∈ Q_A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PairLabel {
    pub p: StateId,
    pub q: StateId,
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Child-index path from the root of a reference tree.
pub type NodeRef = Vec<usize>;

/// Label of an annotated output tree. `reached` is present on nodes entered
/// by a counterpart block and lists the reference nodes reached by prefixes
/// of the witnessing input word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AnnLabel {
    pub p: StateId,
    pub q: StateId,
    pub node: NodeRef,
    pub reached: Option<BTreeSet<NodeRef>>,
}

impl fmt::Display for AnnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}", self.p, self.q, node_name(&self.node))?;
        if let Some(s) = &self.reached {
            let names: Vec<String> = s.iter().map(|v| node_name(v)).collect();
            write!(f, ",{{{}}}", names.join(","))?;
        }
        f.write_str(")")
    }
}

/// `v` followed by the dot-separated child path; the root is `v`.
pub fn node_name(v: &NodeRef) -> String {
    let mut s = String::from("v");
    let parts: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    s.push_str(&parts.join("."));
    s
}

pub type SttTree = LabeledTree<PairLabel>;
pub type AnnTree = LabeledTree<AnnLabel>;

/// Whether the first counterpart block may be empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Flavor {
    Top,
    Nested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputStt {
    pub tree: SttTree,
    pub depth: usize,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputStt {
    pub tree: SttTree,
    pub depth: usize,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnnotatedOutputStt {
    pub tree: AnnTree,
    /// The reduced output tree the annotations point into.
    pub reference: SttTree,
    pub depth: usize,
    pub word: String,
}

/// States reachable from each `p` by one or more letters of `tape`.
pub(crate) fn block_reach(b: &Dfa, tape: Tape) -> Vec<BTreeSet<StateId>> {
    let letters = b.alphabet.tape_letters(tape);
    b.states()
        .map(|p| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<StateId> = letters.iter().filter_map(|&l| b.delta(p, l)).collect();
            while let Some(r) = stack.pop() {
                if seen.insert(r) {
                    stack.extend(letters.iter().filter_map(|&l| b.delta(r, l)));
                }
            }
            seen
        })
        .collect()
}

type Key = (usize, StateId, StateId, usize, Flavor);

/// Tree builder for one segment word.
pub(crate) struct Builder<'a> {
    a: &'a Dfa,
    b: &'a Dfa,
    tape: Tape,
    word: Vec<TaggedLetter>,
    counter: Vec<TaggedLetter>,
    reach: &'a [BTreeSet<StateId>],
    reduced: bool,
    memo: HashMap<Key, SttTree>,
}

impl<'a> Builder<'a> {
    pub(crate) fn new(a: &'a Dfa, b: &'a Dfa, tape: Tape, word: &str, reach: &'a [BTreeSet<StateId>], reduced: bool) -> Self {
        Builder {
            a,
            b,
            tape,
            word: word.chars().map(|c| TaggedLetter::new(tape, c)).collect(),
            counter: a.alphabet.tape_letters(tape.other()),
            reach,
            reduced,
            memo: HashMap::new(),
        }
    }

    fn mk(&self, label: PairLabel, children: Vec<SttTree>) -> SttTree {
        if self.reduced {
            LabeledTree::reduced_node(label, children)
        } else {
            LabeledTree::node(label, children)
        }
    }

    /// One canonical round: a segment letter and a counterpart letter, in tape order.
    fn round(&self, p: StateId, q: StateId, z: TaggedLetter) -> Vec<(StateId, StateId)> {
        let mut out = Vec::new();
        for &c in &self.counter {
            let Some(p2) = self.b.delta(p, c) else { continue };
            let q2 = match self.tape {
                Tape::Input => self.a.delta(q, z).and_then(|r| self.a.delta(r, c)),
                Tape::Output => self.a.delta(q, c).and_then(|r| self.a.delta(r, z)),
            };
            if let Some(q2) = q2 {
                out.push((p2, q2));
            }
        }
        out
    }

    /// `S_j` for `j = 0..=|suffix|`: pairs after `j` rounds starting at `off`.
    pub(crate) fn layers(&self, off: usize, p: StateId, q: StateId) -> Vec<BTreeSet<(StateId, StateId)>> {
        let mut layers = vec![BTreeSet::from([(p, q)])];
        for &z in &self.word[off..] {
            let last = layers.last().unwrap();
            let next: BTreeSet<_> = last.iter().flat_map(|&(p, q)| self.round(p, q, z)).collect();
            layers.push(next);
        }
        layers
    }

    /// A state after reading the rest of the segment alone.
    pub(crate) fn tail(&self, q: StateId, from: usize) -> Option<StateId> {
        self.a.run_from(q, &self.word[from..])
    }

    /// The subtree entered by a block that stops counterpart-consumption after
    /// segment position `at`, or `None` when nothing survives below it.
    pub(crate) fn partial(&mut self, at: usize, p: StateId, q: StateId, depth: usize) -> Option<SttTree> {
        let reach = self.reach;
        let kids: Vec<SttTree> = reach[p]
            .iter()
            .map(|&p2| self.tree(at, p2, q, depth - 1, Flavor::Nested))
            .filter(|t| !t.is_leaf())
            .collect();
        (!kids.is_empty()).then(|| self.mk(PairLabel { p, q }, kids))
    }

    /// The tree for the suffix starting at `off`.
    pub(crate) fn tree(&mut self, off: usize, p: StateId, q: StateId, depth: usize, flavor: Flavor) -> SttTree {
        let key = (off, p, q, depth, flavor);
        if let Some(t) = self.memo.get(&key) {
            return t.clone();
        }
        let n = self.word.len() - off;
        let layers = self.layers(off, p, q);
        let lo = if flavor == Flavor::Top { 0 } else { 1 };
        let mut leaves = BTreeSet::new();
        for (j, layer) in layers.iter().enumerate().skip(lo) {
            for &(p1, q1) in layer {
                if let Some(q2) = self.tail(q1, off + j) {
                    leaves.insert(PairLabel { p: p1, q: q2 });
                }
            }
        }
        let mut children: Vec<SttTree> = leaves.into_iter().map(LabeledTree::leaf).collect();
        if depth > 0 {
            for (j, layer) in layers.iter().enumerate().take(n).skip(1) {
                for &(p1, q1) in layer {
                    if let Some(t) = self.partial(off + j, p1, q1, depth) {
                        children.push(t);
                    }
                }
            }
        }
        let t = self.mk(PairLabel { p, q }, children);
        self.memo.insert(key, t.clone());
        t
    }

    /// Annotated tree relative to `reference`, the reduced tree at node `at`.
    fn annotated(&mut self, off: usize, p: StateId, q: StateId, depth: usize, flavor: Flavor, reference: &SttTree, at: &NodeRef) -> AnnTree {
        let n = self.word.len() - off;
        let lo = if flavor == Flavor::Top { 0 } else { 1 };
        let extend = |v: &NodeRef, i: usize| {
            let mut w = v.clone();
            w.push(i);
            w
        };
        let mut frontier: BTreeSet<(StateId, StateId, BTreeSet<NodeRef>)> = BTreeSet::from([(p, q, BTreeSet::new())]);
        let mut children = Vec::new();
        for j in 0..=n {
            if j > 0 {
                let z = self.word[off + j - 1];
                frontier = frontier
                    .iter()
                    .flat_map(|(p1, q1, s)| self.round(*p1, *q1, z).into_iter().map(move |(p2, q2)| (p2, q2, s.clone())))
                    .collect();
            }
            let mut next = BTreeSet::new();
            for (p1, q1, mut s) in std::mem::take(&mut frontier) {
                let full = if j >= lo {
                    self.tail(q1, off + j).and_then(|q2| {
                        let leaf = LabeledTree::leaf(PairLabel { p: p1, q: q2 });
                        reference.child_index(&leaf).map(|i| (extend(at, i), q2))
                    })
                } else {
                    None
                };
                let part = if j >= 1 && j < n && depth > 0 {
                    self.partial(off + j, p1, q1, depth)
                        .and_then(|t| reference.child_index(&t))
                        .map(|i| (extend(at, i), i))
                } else {
                    None
                };
                s.extend(full.iter().map(|(v, _)| v.clone()));
                s.extend(part.iter().map(|(v, _)| v.clone()));
                if let Some((v, q2)) = &full {
                    children.push(LabeledTree::leaf(AnnLabel { p: p1, q: *q2, node: v.clone(), reached: Some(s.clone()) }));
                }
                if let Some((v, i)) = &part {
                    let sub = &reference.children[*i];
                    let mut kids = Vec::new();
                    for (ci, c) in sub.children.iter().enumerate() {
                        if c.label.q == q1 && self.reach[p1].contains(&c.label.p) {
                            let t = self.annotated(off + j, c.label.p, q1, depth - 1, Flavor::Nested, c, &extend(v, ci));
                            if !t.is_leaf() {
                                kids.push(t);
                            }
                        }
                    }
                    if !kids.is_empty() {
                        children.push(LabeledTree::reduced_node(
                            AnnLabel { p: p1, q: q1, node: v.clone(), reached: Some(s.clone()) },
                            kids,
                        ));
                    }
                }
                next.insert((p1, q1, s));
            }
            frontier = next;
        }
        LabeledTree::reduced_node(AnnLabel { p, q, node: at.clone(), reached: None }, children)
    }

    pub(crate) fn annotated_root(&mut self, p: StateId, q: StateId, depth: usize) -> (AnnTree, SttTree) {
        let reference = self.tree(0, p, q, depth, Flavor::Top);
        let ann = self.annotated(0, p, q, depth, Flavor::Top, &reference, &Vec::new());
        (ann, reference)
    }
}

/// `STT^i(x, p, q)` over the canonical source `a` and target `b`.
pub fn input_stt(x: &str, p: StateId, q: StateId, i: usize, a: &CanonicalDfa, b: &Dfa) -> InputStt {
    let reach = block_reach(b, Tape::Input);
    let mut bl = Builder::new(a.dfa(), b, Tape::Input, x, &reach, false);
    InputStt { tree: bl.tree(0, p, q, i, Flavor::Top), depth: i, word: x.to_string() }
}

/// The output-segment dual of [`input_stt`].
pub fn output_stt(y: &str, p: StateId, q: StateId, i: usize, a: &CanonicalDfa, b: &Dfa) -> OutputStt {
    let reach = block_reach(b, Tape::Output);
    let mut bl = Builder::new(a.dfa(), b, Tape::Output, y, &reach, false);
    OutputStt { tree: bl.tree(0, p, q, i, Flavor::Top), depth: i, word: y.to_string() }
}

/// `annSTT^i(y, p, q, v)` with `v` the root of the reduced output tree.
pub fn annotated_output_stt(y: &str, p: StateId, q: StateId, i: usize, a: &CanonicalDfa, b: &Dfa) -> AnnotatedOutputStt {
    let reach = block_reach(b, Tape::Output);
    let mut bl = Builder::new(a.dfa(), b, Tape::Output, y, &reach, true);
    let (tree, reference) = bl.annotated_root(p, q, i);
    AnnotatedOutputStt { tree, reference, depth: i, word: y.to_string() }
}

/// Drops annotations, keeping `(p, q)`.
pub fn strip_annotations(t: &AnnTree) -> SttTree {
    t.map(&|l: &AnnLabel| PairLabel { p: l.p, q: l.q })
}

/// Relabels a tree with state names of `a` and `b`.
pub fn named(t: &SttTree, a: &Dfa, b: &Dfa) -> LabeledTree<String> {
    t.map(&|l: &PairLabel| format!("({},{})", b.name(l.p), a.name(l.q)))
}

/// Relabels an annotated tree with state names.
pub fn named_annotated(t: &AnnTree, a: &Dfa, b: &Dfa) -> LabeledTree<String> {
    t.map(&|l: &AnnLabel| {
        let mut s = format!("({},{},{}", b.name(l.p), a.name(l.q), node_name(&l.node));
        if let Some(r) = &l.reached {
            let names: Vec<String> = r.iter().map(node_name).collect();
            s.push_str(&format!(",{{{}}}", names.join(",")));
        }
        s.push(')');
        s
    })
}
