//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use syncsynth::automata::{Alphabet, Dfa, Nfa, SyncWord, TaggedLetter, Tape};
use syncsynth::resync::ResyncParams;
use syncsynth::sync::measures_tags;

pub mod game_oracle;

/// Accepted words of length at most `max_len`, found by walking the automaton.
pub fn words_of(a: &Nfa, max_len: usize) -> Vec<SyncWord> {
    let mut out = Vec::new();
    let mut stack: Vec<(BTreeSet<usize>, Vec<TaggedLetter>)> = vec![(BTreeSet::from([a.initial()]), Vec::new())];
    let letters = a.letters();
    while let Some((set, w)) = stack.pop() {
        if set.iter().any(|&q| a.is_final(q)) {
            out.push(SyncWord(w.clone()));
        }
        if w.len() == max_len {
            continue;
        }
        for &l in &letters {
            let next = a.step(&set, l);
            if !next.is_empty() {
                let mut w2 = w.clone();
                w2.push(l);
                stack.push((next, w2));
            }
        }
    }
    out.sort();
    out
}

/// `{⟦w⟧ : w ∈ L(a), |w| ≤ max_len}`.
pub fn pairs_of(a: &Nfa, max_len: usize) -> BTreeSet<(String, String)> {
    words_of(a, max_len).iter().map(|w| w.decode()).collect()
}

/// All tag sequences with `i` inputs and `o` outputs.
pub fn interleavings(i: usize, o: usize) -> Vec<Vec<Tape>> {
    if i == 0 && o == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    if i > 0 {
        for mut t in interleavings(i - 1, o) {
            t.insert(0, Tape::Input);
            out.push(t);
        }
    }
    if o > 0 {
        for mut t in interleavings(i, o - 1) {
            t.insert(0, Tape::Output);
            out.push(t);
        }
    }
    out
}

/// Pair membership in `⟦L(a)⟧` by trying every synchronization.
pub fn in_relation(a: &Nfa, x: &str, y: &str) -> bool {
    let (i, o) = (x.chars().count(), y.chars().count());
    interleavings(i, o)
        .into_iter()
        .any(|t| a.accepts_word(&SyncWord::recompose(&t, x, y).expect("lengths match")))
}

/// All words over `alphabet` of length at most `n`.
pub fn all_words(alphabet: &Alphabet, n: usize) -> Vec<SyncWord> {
    syncsynth::automata::words_upto(&alphabet.letters(), n).into_iter().map(SyncWord).collect()
}

/// All strings over `letters` of length at most `n`.
pub fn strings(letters: &BTreeSet<char>, n: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for &c in letters {
                next.push(format!("{w}{c}"));
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Every pair `(x, y)` with `|x| + |y| ≤ n`.
pub fn all_pairs(alphabet: &Alphabet, n: usize) -> Vec<(String, String)> {
    let mut v = Vec::new();
    for x in strings(&alphabet.input, n) {
        for y in strings(&alphabet.output, n - x.chars().count()) {
            v.push((x.clone(), y));
        }
    }
    v
}

/// Maximum shiftlag/shift over the words of length ≤ n.
pub fn max_measures(a: &Nfa, n: usize) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    for w in words_of(a, n) {
        let m = syncsynth::sync::measures(&w);
        best = (best.0.max(m.lag), best.1.max(m.shift), best.2.max(m.shiftlag));
    }
    best
}

/// Minimal number of `(Σ_i* + Σ_o^≤i)` blocks covering `tags`, if any.
pub fn blocks_needed(tags: &[Tape], i: usize) -> Option<usize> {
    let mut total = 0;
    let mut k = 0;
    while k < tags.len() {
        let t = tags[k];
        let mut j = k;
        while j < tags.len() && tags[j] == t {
            j += 1;
        }
        total += match t {
            Tape::Input => 1,
            Tape::Output if i == 0 => return None,
            Tape::Output => (j - k).div_ceil(i),
        };
        k = j;
    }
    Some(total)
}

/// Definition-level membership in `T_i`.
pub fn in_ti(t: &Dfa, p: &ResyncParams, w: &SyncWord) -> bool {
    if !t.accepts(&w.0) {
        return false;
    }
    let tags = w.tags();
    (0..=tags.len()).any(|split| {
        measures_tags(&tags[..split]).lag <= p.lead && blocks_needed(&tags[split..], p.i).is_some_and(|b| b <= p.n)
    })
}
