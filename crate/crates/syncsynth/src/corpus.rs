//! Small hand-built automata used by the examples, the CLI demos and the tests.

use crate::automata::{determinize, Alphabet, Dfa, Nfa, SyncWord};

/// Builds an automaton from edges `(from, "1a", to)`; several letters may be
/// listed at once, as in `"2d2e"`. The first listed state is initial.
pub fn build(alphabet: Alphabet, states: &[&str], finals: &[&str], edges: &[(&str, &str, &str)]) -> Nfa {
    let mut a = Nfa::empty_with_states(alphabet);
    for s in states {
        a.add_state(*s);
    }
    a.set_initial(0);
    let id = |a: &Nfa, s: &str| a.state_by_name(s).unwrap_or_else(|| panic!("unknown state {s}"));
    for f in finals {
        let q = id(&a, f);
        a.set_final(q, true);
    }
    for (p, letters, q) in edges {
        let (p, q) = (id(&a, p), id(&a, q));
        for l in SyncWord::parse(letters).expect("letter list").0 {
            a.add_transition(p, l, q);
        }
    }
    a
}

fn det(a: Nfa) -> Dfa {
    a.to_dfa().expect("deterministic by construction")
}

/// Output `d` or `e` first, then any `a`s, then `b` (after `d`) or `c` (after `e`),
/// then more `a`s and a nonempty tail of outputs.
pub fn choice_source() -> Dfa {
    det(build(
        Alphabet::new("abc", "de"),
        &["0", "1", "2", "3", "4"],
        &["3", "4"],
        &[
            ("0", "2d", "1"),
            ("0", "2e", "2"),
            ("1", "1a", "1"),
            ("1", "1b", "3"),
            ("2", "1a", "2"),
            ("2", "1c", "3"),
            ("3", "1a", "3"),
            ("3", "2d2e", "4"),
            ("4", "2d2e", "4"),
        ],
    ))
}

/// `Σ_i* (Σ_i Σ_o)^+`, determinized.
pub fn choice_target() -> Dfa {
    let nfa = build(
        Alphabet::new("abc", "de"),
        &["t0", "t1", "t2", "t3"],
        &["t2"],
        &[
            ("t0", "1a1b1c", "t0"),
            ("t0", "1a1b1c", "t1"),
            ("t1", "2d2e", "t2"),
            ("t2", "1a1b1c", "t3"),
            ("t3", "2d2e", "t2"),
        ],
    );
    determinize(&nfa)
}

/// A uniformizer of [`choice_source`] that reads `b`/`c` first and answers afterwards.
pub fn choice_uniformizer() -> Dfa {
    det(build(
        Alphabet::new("abc", "de"),
        &["0", "1", "2", "3", "4"],
        &["3"],
        &[
            ("0", "1a", "0"),
            ("0", "1b", "1"),
            ("0", "1c", "2"),
            ("1", "2d", "3"),
            ("2", "2e", "3"),
            ("3", "1a", "4"),
            ("4", "2d", "3"),
        ],
    ))
}

/// Source over `{a}` and `{b, c}`: `(ab)*` or `(ab)*·ac·a*`.
pub fn stride_source() -> Dfa {
    det(build(
        Alphabet::new("a", "bc"),
        &["q0", "q1", "q2"],
        &["q0", "q2"],
        &[("q0", "1a", "q1"), ("q1", "2b", "q0"), ("q1", "2c", "q2"), ("q2", "1a", "q2")],
    ))
}

/// Target paired with [`stride_source`].
pub fn stride_target() -> Dfa {
    det(build(
        Alphabet::new("a", "bc"),
        &["p0", "p1", "p2", "p3"],
        &["p0", "p2", "p3"],
        &[
            ("p0", "1a", "p1"),
            ("p1", "1a", "p1"),
            ("p1", "2b", "p2"),
            ("p2", "2b2c", "p2"),
            ("p2", "1a", "p3"),
            ("p3", "2b2c", "p3"),
        ],
    ))
}

/// Source over `{a, b}` and `{c}` whose words have at most four blocks.
pub fn block_source() -> Dfa {
    det(build(
        Alphabet::new("ab", "c"),
        &["q0", "q1", "q2", "q3", "q4", "q5", "q6"],
        &["q0", "q1", "q2", "q3", "q4", "q5", "q6"],
        &[
            ("q0", "1a", "q1"),
            ("q0", "1b", "q3"),
            ("q1", "2c", "q2"),
            ("q2", "1b", "q5"),
            ("q2", "2c", "q6"),
            ("q3", "2c", "q4"),
            ("q4", "1a2c", "q5"),
            ("q5", "2c", "q6"),
        ],
    ))
}

/// Target paired with [`block_source`].
pub fn block_target() -> Dfa {
    det(build(
        Alphabet::new("ab", "c"),
        &["p0", "p1", "p2"],
        &["p0", "p1", "p2"],
        &[("p0", "2c", "p0"), ("p0", "1a1b", "p1"), ("p1", "2c", "p1"), ("p1", "1a1b", "p2"), ("p2", "1a1b", "p2")],
    ))
}

/// Tag languages over `{a}` and `{b}` used to classify synchronization shapes,
/// as `(shape, automaton)`: `1*2*`, `(12)*`, `(12)*(1*+2*)`, `1*2*1*2*`, `(1*2*)*`.
pub fn families() -> Vec<(&'static str, Nfa)> {
    let al = || Alphabet::new("a", "b");
    vec![
        ("1*2*", build(al(), &["0", "1"], &["0", "1"], &[("0", "1a", "0"), ("0", "2b", "1"), ("1", "2b", "1")])),
        ("(12)*", build(al(), &["0", "1"], &["0"], &[("0", "1a", "1"), ("1", "2b", "0")])),
        (
            "(12)*(1*+2*)",
            build(
                al(),
                &["0", "1", "2", "3"],
                &["0", "1", "2", "3"],
                &[("0", "1a", "1"), ("1", "2b", "0"), ("0", "1a", "2"), ("2", "1a", "2"), ("0", "2b", "3"), ("3", "2b", "3")],
            ),
        ),
        (
            "1*2*1*2*",
            build(
                al(),
                &["0", "1", "2", "3"],
                &["0", "1", "2", "3"],
                &[
                    ("0", "1a", "0"),
                    ("0", "2b", "1"),
                    ("1", "2b", "1"),
                    ("1", "1a", "2"),
                    ("2", "1a", "2"),
                    ("2", "2b", "3"),
                    ("3", "2b", "3"),
                ],
            ),
        ),
        ("(1*2*)*", build(al(), &["0"], &["0"], &[("0", "1a2b", "0")])),
    ]
}

/// `{(ab, d), (ac, e)}` written input-first.
pub fn early_choice_source() -> Dfa {
    det(build(
        Alphabet::new("abc", "de"),
        &["0", "1", "2", "3", "4"],
        &["4"],
        &[("0", "1a", "1"), ("1", "1b", "2"), ("1", "1c", "3"), ("2", "2d", "4"), ("3", "2e", "4")],
    ))
}

/// One input, one output, one input: the output is due before the choice is read.
pub fn early_choice_target() -> Dfa {
    det(build(
        Alphabet::new("abc", "de"),
        &["0", "1", "2", "3"],
        &["3"],
        &[("0", "1a1b1c", "1"), ("1", "2d2e", "2"), ("2", "1a1b1c", "3")],
    ))
}

/// `a* × {d}`.
pub fn constant_output_source() -> Dfa {
    det(build(Alphabet::new("a", "d"), &["0", "1"], &["1"], &[("0", "1a", "0"), ("0", "2d", "1")]))
}

/// `Σ_i* Σ_o*`: all inputs, then all outputs.
pub fn input_first_target(alphabet: Alphabet) -> Dfa {
    let letters = |tape: &str, set: &std::collections::BTreeSet<char>| set.iter().map(|c| format!("{tape}{c}")).collect::<String>();
    let (i, o) = (letters("1", &alphabet.input), letters("2", &alphabet.output));
    det(build(alphabet, &["0", "1"], &["0", "1"], &[("0", &i, "0"), ("0", &o, "1"), ("1", &o, "1")]))
}

/// `{(a, d), (a, e)}`.
pub fn either_output_source() -> Dfa {
    det(build(Alphabet::new("a", "de"), &["0", "1", "2"], &["2"], &[("0", "1a", "1"), ("1", "2d2e", "2")]))
}

/// `Σ_o Σ_i`: one output strictly before one input.
pub fn output_first_target() -> Dfa {
    det(build(Alphabet::new("a", "de"), &["0", "1", "2"], &["2"], &[("0", "2d2e", "1"), ("1", "1a", "2")]))
}

/// `{(a, d), (b, d)}`.
pub fn two_inputs_source() -> Dfa {
    det(build(Alphabet::new("ab", "d"), &["0", "1", "2"], &["2"], &[("0", "1a1b", "1"), ("1", "2d", "2")]))
}

/// Only `(1,a)(2,d)`: the input `b` has no admissible synchronization.
pub fn only_a_target() -> Dfa {
    det(build(Alphabet::new("ab", "d"), &["0", "1", "2"], &["2"], &[("0", "1a", "1"), ("1", "2d", "2")]))
}

/// `{(aⁿ, bⁿ)}`, synchronized letter by letter.
pub fn echo_source() -> Dfa {
    det(build(Alphabet::new("a", "b"), &["0", "1"], &["0"], &[("0", "1a", "1"), ("1", "2b", "0")]))
}

/// `Σ_o* Σ_i*`: every output before every input.
pub fn outputs_first_target(alphabet: Alphabet) -> Dfa {
    let letters = |tape: &str, set: &std::collections::BTreeSet<char>| set.iter().map(|c| format!("{tape}{c}")).collect::<String>();
    let (i, o) = (letters("1", &alphabet.input), letters("2", &alphabet.output));
    det(build(alphabet, &["0", "1"], &["0", "1"], &[("0", &o, "0"), ("0", &i, "1"), ("1", &i, "1")]))
}

/// Every synchronization; its shiftlag is infinite.
pub fn universal_target(alphabet: Alphabet) -> Dfa {
    let letters: String = alphabet.letters().iter().map(|l| format!("{}{}", l.tape.digit(), l.symbol)).collect();
    det(build(alphabet, &["0"], &["0"], &[("0", &letters, "0")]))
}

/// Every named instance `(name, source, target)`, for the CLI data files and
/// batch runs.
pub fn instances() -> Vec<(&'static str, Dfa, Dfa)> {
    vec![
        ("choice", choice_source(), choice_target()),
        ("stride", stride_source(), stride_target()),
        ("block", block_source(), block_target()),
        ("early_choice", early_choice_source(), early_choice_target()),
        ("constant_output", constant_output_source(), input_first_target(Alphabet::new("a", "d"))),
        ("either_output", either_output_source(), output_first_target()),
        ("two_inputs", two_inputs_source(), only_a_target()),
        ("echo_ahead", echo_source(), outputs_first_target(Alphabet::new("a", "b"))),
        ("stride_universal", stride_source(), universal_target(Alphabet::new("a", "bc"))),
    ]
}
