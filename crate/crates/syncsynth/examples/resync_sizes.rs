//! Sizes of the block-capped target and the resynchronized source as the
//! block cap grows.

use syncsynth::automata::determinize;
use syncsynth::canonical::canonicalize;
use syncsynth::corpus;
use syncsynth::resync::{build_ti, build_tis, ResyncParams};
use syncsynth::sync::shiftlag_finiteness;

fn main() -> syncsynth::Result<()> {
    let (s, t) = (corpus::stride_source().to_nfa(), corpus::stride_target());
    let a = canonicalize(&s, &shiftlag_finiteness(&s, None)?)?;
    let cert = shiftlag_finiteness(&t.to_nfa(), None)?;
    for i in 1..=3 {
        let p = ResyncParams::for_target(&t, &cert, i)?;
        let ti = build_ti(&t, &p);
        let tis = build_tis(&a, &ti, &p)?;
        println!(
            "i = {i}: n = {}, gamma = {}, lead = {}, T_i {} states, T_i(S) {} states ({} deterministic)",
            p.n,
            p.gamma,
            p.lead,
            ti.num_states(),
            tis.num_states(),
            determinize(&tis).num_states()
        );
    }
    Ok(())
}
