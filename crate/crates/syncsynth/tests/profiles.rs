mod common;

use std::collections::{BTreeSet, HashSet};

use common::strings;
use proptest::prelude::*;
use syncsynth::automata::{tape_word, Dfa, StateId, Tape};
use syncsynth::canonical::{canonical_sync, canonicalize, CanonicalDfa};
use syncsynth::corpus;
use syncsynth::profiles::*;
use syncsynth::sync::shiftlag_finiteness;

type Path = Vec<(StateId, StateId)>;

fn instances() -> Vec<(&'static str, CanonicalDfa, Dfa)> {
    let canon = |s: Dfa| {
        let s = s.to_nfa();
        canonicalize(&s, &shiftlag_finiteness(&s, None).unwrap()).unwrap()
    };
    vec![
        ("stride", CanonicalDfa::new(corpus::stride_source()).unwrap(), corpus::stride_target()),
        ("block", CanonicalDfa::new(corpus::block_source()).unwrap(), corpus::block_target()),
        ("choice", canon(corpus::choice_source()), corpus::choice_target()),
    ]
}

fn id(d: &Dfa, s: &str) -> StateId {
    d.state_by_name(s).unwrap()
}

/// States reachable from `p` by a non-empty word over `tape`, by enumeration.
fn block_targets(b: &Dfa, p: StateId, tape: Tape) -> BTreeSet<StateId> {
    let letters = match tape {
        Tape::Input => &b.alphabet.input,
        Tape::Output => &b.alphabet.output,
    };
    strings(letters, b.num_states())
        .into_iter()
        .filter(|w| !w.is_empty())
        .filter_map(|w| b.run_from(p, &tape_word(tape, &w)))
        .collect()
}

/// Root-to-leaf label paths of the tree for segment `z`, straight from the
/// definition: enumerate counterpart words and splits.
fn oracle(a: &Dfa, b: &Dfa, tape: Tape, z: &str, p: StateId, q: StateId, i: usize, nested: bool) -> BTreeSet<Path> {
    let counter = match tape {
        Tape::Input => &b.alphabet.output,
        Tape::Output => &b.alphabet.input,
    };
    let sync = |seg: &str, other: &str| match tape {
        Tape::Input => canonical_sync(seg, other),
        Tape::Output => canonical_sync(other, seg),
    };
    let zs: Vec<char> = z.chars().collect();
    let mut paths = BTreeSet::new();
    let mut any = false;
    for w in strings(counter, zs.len()) {
        if nested && w.is_empty() {
            continue;
        }
        let q2 = a.run_from(q, &sync(z, &w).0);
        let p2 = b.run_from(p, &tape_word(tape.other(), &w));
        if let (Some(p2), Some(q2)) = (p2, q2) {
            paths.insert(vec![(p, q), (p2, q2)]);
            any = true;
        }
    }
    if i > 0 {
        for j in 1..zs.len() {
            let (head, rest): (String, String) = (zs[..j].iter().collect(), zs[j..].iter().collect());
            for w in strings(counter, j).into_iter().filter(|w| w.chars().count() == j) {
                let q2 = a.run_from(q, &sync(&head, &w).0);
                let p2 = b.run_from(p, &tape_word(tape.other(), &w));
                let (Some(p2), Some(q2)) = (p2, q2) else { continue };
                for p3 in block_targets(b, p2, tape) {
                    let sub = oracle(a, b, tape, &rest, p3, q2, i - 1, true);
                    for s in sub.into_iter().filter(|s| s.len() > 1) {
                        let mut path = vec![(p, q), (p2, q2)];
                        path.extend(s);
                        paths.insert(path);
                        any = true;
                    }
                }
            }
        }
    }
    if !any {
        paths.insert(vec![(p, q)]);
    }
    paths
}

fn paths_of(t: &SttTree) -> BTreeSet<Path> {
    t.label_paths().into_iter().map(|p| p.into_iter().map(|l| (l.p, l.q)).collect()).collect()
}

#[test]
fn stride_golden_tree() {
    let a = CanonicalDfa::new(corpus::stride_source()).unwrap();
    let b = corpus::stride_target();
    let t = input_stt("aa", id(&b, "p1"), id(a.dfa(), "q0"), 1, &a, &b);
    let l = |s: &str| LabeledTree::leaf(s.to_string());
    let n = |s: &str, c| LabeledTree::node(s.to_string(), c);
    let expected = n(
        "(p1,q0)",
        vec![
            l("(p2,q1)"),
            l("(p2,q0)"),
            l("(p2,q2)"),
            n("(p2,q0)", vec![n("(p3,q0)", vec![l("(p3,q0)"), l("(p3,q2)")])]),
        ],
    );
    assert_eq!(named(&t.tree, a.dfa(), &b), expected);
    assert_eq!(t.tree.size(), 8);
}

#[test]
fn block_golden_trees() {
    let a = CanonicalDfa::new(corpus::block_source()).unwrap();
    let b = corpus::block_target();
    let (p0, q0) = (id(&b, "p0"), id(a.dfa(), "q0"));
    let red = output_stt("cc", p0, q0, 0, &a, &b).tree.reduce();
    assert_eq!(named(&red, a.dfa(), &b).serialize(), "(p0,q0)((p1,q5),(p1,q6),(p2,q6))");

    let ann = annotated_output_stt("cc", p0, q0, 0, &a, &b);
    assert_eq!(ann.reference, red);
    let node = |p: &str, q: &str| {
        let leaf = LabeledTree::leaf(PairLabel { p: id(&b, p), q: id(a.dfa(), q) });
        vec![red.child_index(&leaf).unwrap()]
    };
    let (v1, v2, v3) = (node("p1", "q6"), node("p1", "q5"), node("p2", "q6"));
    let child = |p: &str, q: &str, v: &Vec<usize>, s: &[&Vec<usize>]| {
        LabeledTree::leaf(AnnLabel {
            p: id(&b, p),
            q: id(a.dfa(), q),
            node: v.clone(),
            reached: Some(s.iter().map(|v| (*v).clone()).collect()),
        })
    };
    let expected = LabeledTree::node(
        AnnLabel { p: p0, q: q0, node: vec![], reached: None },
        vec![
            child("p1", "q6", &v1, &[&v1]),
            child("p1", "q5", &v2, &[&v2]),
            child("p2", "q6", &v3, &[&v1, &v3]),
            child("p2", "q6", &v3, &[&v2, &v3]),
        ],
    );
    assert_eq!(ann.tree, expected);
    assert_eq!(ann.tree.size(), 5);
    assert_eq!(strip_annotations(&ann.tree).reduce(), red);
}

#[test]
fn single_counterpart_letter_trees_match_enumeration() {
    let a = CanonicalDfa::new(corpus::block_source()).unwrap();
    let b = corpus::block_target();
    let (p0, q0) = (id(&b, "p0"), id(a.dfa(), "q0"));
    let t = input_stt("a", p0, q0, 0, &a, &b);
    assert_eq!(named(&t.tree, a.dfa(), &b).serialize(), "(p0,q0)((p0,q1),(p0,q2))");
    let t = output_stt("c", p0, q0, 0, &a, &b);
    assert_eq!(paths_of(&t.tree), oracle(a.dfa(), &b, Tape::Output, "c", p0, q0, 0, false));
}

#[test]
fn tree_paths_match_definition() {
    for (name, a, b) in instances() {
        for tape in [Tape::Input, Tape::Output] {
            let letters = match tape {
                Tape::Input => &b.alphabet.input,
                Tape::Output => &b.alphabet.output,
            };
            for z in strings(letters, 3) {
                for i in 0..=1 {
                    for p in b.states() {
                        for q in a.dfa().states() {
                            let tree = match tape {
                                Tape::Input => input_stt(&z, p, q, i, &a, &b).tree,
                                Tape::Output => output_stt(&z, p, q, i, &a, &b).tree,
                            };
                            assert!(tree.height() <= 2 * i + 2);
                            let want = oracle(a.dfa(), &b, tape, &z, p, q, i, false);
                            assert_eq!(paths_of(&tree), want, "{name} {tape:?} z={z} i={i} p={p} q={q}");
                            assert_eq!(paths_of(&tree.reduce()), want);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn annotations_project_onto_reference() {
    for (_, a, b) in instances() {
        for y in strings(&b.alphabet.output, 3) {
            for p in b.states() {
                for q in a.dfa().states() {
                    let ann = annotated_output_stt(&y, p, q, 1, &a, &b);
                    assert_eq!(strip_annotations(&ann.tree).reduce(), ann.reference);
                    for (_, node) in ann.tree.nodes() {
                        let r = ann.reference.at(&node.label.node).expect("annotation names a reference node");
                        assert_eq!((r.label.p, r.label.q), (node.label.p, node.label.q));
                    }
                }
            }
        }
    }
}

#[test]
fn splice_equals_direct_profile() {
    for (name, a, b) in instances() {
        for n in [2, 4] {
            let ctx = ProfileContext::new(n, &a, &b);
            for x in strings(&b.alphabet.input, 4) {
                let direct = ctx.input_profile(&x);
                let cs: Vec<char> = x.chars().collect();
                for cut in 0..=cs.len() {
                    let (x1, x2): (String, String) = (cs[..cut].iter().collect(), cs[cut..].iter().collect());
                    let spliced = ctx.concat(&ctx.input_profile(&x1), &ctx.input_profile(&x2)).unwrap();
                    assert_eq!(spliced, direct, "{name} n={n} {x1}·{x2}");
                }
            }
        }
    }
}

#[test]
fn concatenation_is_associative() {
    for (name, a, b) in instances() {
        let ctx = ProfileContext::new(3, &a, &b);
        let words = strings(&b.alphabet.input, 2);
        let ps: Vec<InputProfile> = words.iter().map(|w| ctx.input_profile(w)).collect();
        for x in &ps {
            for y in &ps {
                let xy = ctx.concat(x, y).unwrap();
                for z in &ps {
                    let l = ctx.concat(&xy, z).unwrap();
                    let r = ctx.concat(x, &ctx.concat(y, z).unwrap()).unwrap();
                    assert_eq!(l, r, "{name}");
                }
            }
        }
    }
}

#[test]
fn identity_element() {
    for (_, a, b) in instances() {
        let ctx = ProfileContext::new(2, &a, &b);
        let e = ctx.input_profile("");
        for x in strings(&b.alphabet.input, 2) {
            let p = ctx.input_profile(&x);
            assert_eq!(ctx.concat(&e, &p).unwrap(), p);
            assert_eq!(ctx.concat(&p, &e).unwrap(), p);
        }
        for (i, t) in e.trees().iter().enumerate() {
            assert_eq!(t.children.len(), 1, "pair {i}");
            assert_eq!(t.children[0].label, t.label);
        }
    }
}

#[test]
fn single_letter_idempotency_on_stride() {
    let a = CanonicalDfa::new(corpus::stride_source()).unwrap();
    let b = corpus::stride_target();
    let ctx = ProfileContext::new(2, &a, &b);
    let (pa, paa) = (ctx.input_profile("a"), ctx.input_profile("aa"));
    assert_eq!(ctx.concat(&pa, &pa).unwrap(), paa);
    let found = find_idempotent_factor("a", 2, &a, &b);
    assert_eq!(found.is_some(), pa == paa);
    assert_eq!(find_idempotent_factor("", 2, &a, &b), None);
}

#[test]
fn closure_matches_enumeration() {
    for (name, a, b) in instances() {
        let ctx = ProfileContext::new(2, &a, &b);
        let ic = ctx.input_closure(DEFAULT_CLOSURE_CAP).unwrap();
        let seen: HashSet<InputProfile> =
            strings(&b.alphabet.input, ic.radius).iter().map(|w| ctx.input_profile(w)).collect();
        assert_eq!(seen.len(), ic.len(), "{name} input");
        let longer: HashSet<InputProfile> =
            strings(&b.alphabet.input, ic.radius + 1).iter().map(|w| ctx.input_profile(w)).collect();
        assert_eq!(longer.len(), ic.len(), "{name} input radius+1");

        let oc = ctx.output_closure(DEFAULT_CLOSURE_CAP).unwrap();
        let seen: HashSet<OutputProfile> =
            strings(&b.alphabet.output, oc.radius + 1).iter().map(|w| ctx.output_profile(w)).collect();
        assert_eq!(seen.len(), oc.len(), "{name} output");
        for (p, rep) in &oc.profiles {
            assert_eq!(&ctx.output_profile(rep), p);
        }
    }
}

#[test]
fn one_letter_output_closure_stops_at_first_repeat() {
    let a = CanonicalDfa::new(corpus::build(
        syncsynth::Alphabet::new("a", "c"),
        &["q0", "q1", "q2"],
        &["q0", "q2"],
        &[("q0", "1a", "q1"), ("q1", "2c", "q2"), ("q2", "2c", "q2")],
    ).to_dfa().unwrap())
    .unwrap();
    let b = corpus::build(syncsynth::Alphabet::new("a", "c"), &["p"], &["p"], &[("p", "2c", "p")]).to_dfa().unwrap();
    let ctx = ProfileContext::new(2, &a, &b);
    let closure = ctx.output_closure(100).unwrap();
    let mut m = 0;
    let mut prev = ctx.output_profile("");
    loop {
        let next = ctx.output_profile(&"c".repeat(m + 1));
        if next == prev {
            break;
        }
        prev = next;
        m += 1;
    }
    assert_eq!(closure.len(), m + 1);
    assert_eq!(closure.radius, m);
}

#[test]
fn empty_output_alphabet_closure_is_trivial() {
    let s = corpus::build(syncsynth::Alphabet::new("a", ""), &["q"], &["q"], &[("q", "1a", "q")]).to_dfa().unwrap();
    let a = CanonicalDfa::new(s).unwrap();
    let b = corpus::build(syncsynth::Alphabet::new("a", ""), &["p"], &["p"], &[("p", "1a", "p")]).to_dfa().unwrap();
    let closure = ProfileContext::new(2, &a, &b).output_closure(10).unwrap();
    assert_eq!((closure.len(), closure.radius), (1, 0));
}

#[test]
fn long_words_contain_idempotent_factors() {
    let a = CanonicalDfa::new(corpus::block_source()).unwrap();
    let b = corpus::block_target();
    let ctx = ProfileContext::new(2, &a, &b);
    let c = ctx.input_closure(DEFAULT_CLOSURE_CAP).unwrap().len();
    let r1 = ramsey_bound(c);
    let free = ctx.longest_idempotent_free(64).expect("idempotent-free words are short");
    assert!(num_bigint::BigUint::from(free.chars().count()) < r1);
    assert!(free.chars().count() < (c + 1) * (c + 1));
    assert_eq!(ctx.find_idempotent_factor(&free), None);
}

#[test]
fn k_exceeds_gamma() {
    for (_, a, b) in instances() {
        for gamma in [0, 5, 50] {
            let k = compute_k(2, gamma, &a, &b, DEFAULT_CLOSURE_CAP).unwrap();
            assert!(k.r1 > num_bigint::BigUint::from(gamma) && k.r2 > gamma);
            assert_eq!(k.k, &k.r1 + k.r2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profiles_compose_like_words(x in "[ab]{0,5}", y in "[ab]{0,5}") {
        let a = CanonicalDfa::new(corpus::block_source()).unwrap();
        let b = corpus::block_target();
        let ctx = ProfileContext::new(3, &a, &b);
        let xy = ctx.concat(&ctx.input_profile(&x), &ctx.input_profile(&y)).unwrap();
        prop_assert_eq!(xy, ctx.input_profile(&format!("{x}{y}")));
    }

    #[test]
    fn found_factors_are_idempotent(x in "[ab]{1,12}") {
        let a = CanonicalDfa::new(corpus::block_source()).unwrap();
        let b = corpus::block_target();
        let ctx = ProfileContext::new(2, &a, &b);
        if let Some((i, j)) = ctx.find_idempotent_factor(&x) {
            let f: String = x.chars().skip(i - 1).take(j + 1 - i).collect();
            prop_assert_eq!(ctx.input_profile(&f), ctx.input_profile(&format!("{f}{f}")));
        } else {
            prop_assert!(x.chars().count() <= ctx.longest_idempotent_free(64).unwrap().chars().count());
        }
    }

    #[test]
    fn reduce_is_idempotent_and_keeps_paths(x in "[ab]{0,4}", p in 0usize..3, q in 0usize..7) {
        let a = CanonicalDfa::new(corpus::block_source()).unwrap();
        let b = corpus::block_target();
        let t = input_stt(&x, p, q.min(a.dfa().num_states() - 1), 2, &a, &b).tree;
        let r = t.reduce();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert_eq!(r.label_paths(), t.label_paths());
    }
}
