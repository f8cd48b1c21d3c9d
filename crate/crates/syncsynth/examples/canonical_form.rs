//! Rewrites a finite-shiftlag source into its canonical alternating form and
//! shows that both recognize the same pairs.

use syncsynth::automata::words_upto;
use syncsynth::canonical::canonicalize;
use syncsynth::sync::shiftlag_finiteness;
use syncsynth::{corpus, SyncWord};

fn main() -> syncsynth::Result<()> {
    let s = corpus::stride_source().to_nfa();
    let cert = shiftlag_finiteness(&s, None)?;
    let a = canonicalize(&s, &cert)?;
    println!("source: {} states, canonical: {} states", s.num_states(), a.dfa().num_states());
    for w in words_upto(&s.letters(), 6) {
        if s.accepts(&w) {
            let (x, y) = SyncWord(w).decode();
            println!("  ({x:>3}, {y:>3})  canonical accepts: {}", a.accepts_pair(&x, &y));
        }
    }
    Ok(())
}
