//! JSON automaton files and DOT rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, Nfa, Partition, SequentialDfa, TaggedLetter, Tape};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlphabetJson {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransitionJson {
    pub from: String,
    pub tape: String,
    pub letter: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PartitionJson {
    pub input_states: Vec<String>,
    pub output_states: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AutomatonJson {
    pub alphabet: AlphabetJson,
    pub states: Vec<String>,
    pub initial: String,
    pub finals: Vec<String>,
    pub transitions: Vec<TransitionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionJson>,
}

fn one_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!("letter '{s}' must be a single character"))),
    }
}

impl AutomatonJson {
    pub fn from_nfa(a: &Nfa) -> Self {
        let letters_of = |set: &BTreeSet<char>| set.iter().map(|c| c.to_string()).collect();
        AutomatonJson {
            alphabet: AlphabetJson { input: letters_of(&a.alphabet.input), output: letters_of(&a.alphabet.output) },
            states: a.names().to_vec(),
            initial: a.name(a.initial()).to_string(),
            finals: a.finals().map(|q| a.name(q).to_string()).collect(),
            transitions: a
                .transitions()
                .into_iter()
                .map(|(p, l, q)| TransitionJson {
                    from: a.name(p).to_string(),
                    tape: match l.tape {
                        Tape::Input => "in".into(),
                        Tape::Output => "out".into(),
                    },
                    letter: l.symbol.to_string(),
                    to: a.name(q).to_string(),
                })
                .collect(),
            partition: None,
        }
    }

    pub fn from_sequential(s: &SequentialDfa) -> Self {
        let d = s.dfa();
        let mut j = Self::from_nfa(&d.to_nfa());
        let names = |set: &BTreeSet<usize>| set.iter().map(|&q| d.name(q).to_string()).collect();
        j.partition = Some(PartitionJson {
            input_states: names(&s.partition().input_states),
            output_states: names(&s.partition().output_states),
        });
        j
    }

    pub fn to_nfa(&self) -> Result<Nfa> {
        let mut alphabet = Alphabet::default();
        for s in &self.alphabet.input {
            alphabet.input.insert(one_char(s)?);
        }
        for s in &self.alphabet.output {
            alphabet.output.insert(one_char(s)?);
        }
        let mut a = Nfa::empty_with_states(alphabet);
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s.clone()) {
                return Err(Error::Parse(format!("duplicate state '{s}'")));
            }
            a.add_state(s.clone());
        }
        let lookup = |a: &Nfa, s: &str| a.state_by_name(s).ok_or_else(|| Error::Parse(format!("unknown state '{s}'")));
        let init = lookup(&a, &self.initial)?;
        a.set_initial(init);
        for f in &self.finals {
            let q = lookup(&a, f)?;
            a.set_final(q, true);
        }
        for t in &self.transitions {
            let tape = match t.tape.as_str() {
                "in" => Tape::Input,
                "out" => Tape::Output,
                other => return Err(Error::Parse(format!("tape must be \"in\" or \"out\", got '{other}'"))),
            };
            let l = TaggedLetter::new(tape, one_char(&t.letter)?);
            if !a.alphabet.contains(l) {
                return Err(Error::Parse(format!("letter {l} not in the declared alphabet")));
            }
            let p = lookup(&a, &t.from)?;
            let q = lookup(&a, &t.to)?;
            a.add_transition(p, l, q);
        }
        Ok(a)
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        self.to_nfa()?.to_dfa().ok_or(Error::NotDeterministic)
    }

    pub fn to_sequential(&self) -> Result<SequentialDfa> {
        let d = self.to_dfa()?;
        match &self.partition {
            None => SequentialDfa::infer(d),
            Some(p) => {
                let mut part = Partition::default();
                for s in &p.input_states {
                    part.input_states.insert(d.state_by_name(s).ok_or_else(|| Error::Parse(format!("unknown state '{s}'")))?);
                }
                for s in &p.output_states {
                    part.output_states.insert(d.state_by_name(s).ok_or_else(|| Error::Parse(format!("unknown state '{s}'")))?);
                }
                SequentialDfa::new(d, part)
            }
        }
    }
}

/// Parses an automaton file. The `initial` field is a single state name,
/// so automata with several initial states cannot be expressed.
pub fn parse_nfa(text: &str) -> Result<Nfa> {
    let j: AutomatonJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.to_nfa()
}

pub fn nfa_to_json(a: &Nfa) -> String {
    serde_json::to_string_pretty(&AutomatonJson::from_nfa(a)).expect("serializable")
}

pub fn sequential_to_json(s: &SequentialDfa) -> String {
    serde_json::to_string_pretty(&AutomatonJson::from_sequential(s)).expect("serializable")
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering; nodes appear in state order, edges grouped per state pair.
pub fn nfa_to_dot(a: &Nfa, title: &str) -> String {
    dot_with_shapes(a, title, |_| "circle")
}

pub fn sequential_to_dot(s: &SequentialDfa, title: &str) -> String {
    dot_with_shapes(&s.dfa().to_nfa(), title, |q| if s.is_output_state(q) { "box" } else { "circle" })
}

fn dot_with_shapes(a: &Nfa, title: &str, shape: impl Fn(usize) -> &'static str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", esc(title));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  __start [shape=point];");
    for q in a.states() {
        let periph = if a.is_final(q) { 2 } else { 1 };
        let _ = writeln!(out, "  n{q} [label=\"{}\", shape={}, peripheries={periph}];", esc(a.name(q)), shape(q));
    }
    let _ = writeln!(out, "  __start -> n{};", a.initial());
    let mut grouped: std::collections::BTreeMap<(usize, usize), Vec<String>> = Default::default();
    for (p, l, q) in a.transitions() {
        grouped.entry((p, q)).or_default().push(format!("{}{}", l.tape.digit(), l.symbol));
    }
    for ((p, q), labels) in grouped {
        let _ = writeln!(out, "  n{p} -> n{q} [label=\"{}\"];", esc(&labels.join(",")));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "alphabet": {"input": ["a"], "output": ["d"]},
        "states": ["p", "q"],
        "initial": "p",
        "finals": ["q"],
        "transitions": [{"from": "p", "tape": "in", "letter": "a", "to": "q"},
                        {"from": "q", "tape": "out", "letter": "d", "to": "q"}]
    }"#;

    #[test]
    fn json_round_trip() {
        let a = parse_nfa(SAMPLE).unwrap();
        assert_eq!(a.num_states(), 2);
        let again = parse_nfa(&nfa_to_json(&a)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn rejects_unknown_letters_and_states() {
        let bad = SAMPLE.replace("\"letter\": \"d\"", "\"letter\": \"z\"");
        assert!(parse_nfa(&bad).is_err());
        let bad = SAMPLE.replace("\"initial\": \"p\"", "\"initial\": \"r\"");
        assert!(parse_nfa(&bad).is_err());
        let bad = SAMPLE.replace("\"initial\": \"p\"", "\"initial\": [\"p\", \"q\"]");
        assert!(parse_nfa(&bad).is_err());
    }

    #[test]
    fn dot_is_stable() {
        let a = parse_nfa(SAMPLE).unwrap();
        let d1 = nfa_to_dot(&a, "x");
        assert_eq!(d1, nfa_to_dot(&parse_nfa(SAMPLE).unwrap(), "x"));
        assert!(d1.contains("n0 -> n1 [label=\"1a\"]"));
    }
}
