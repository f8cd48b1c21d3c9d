//! State transformation trees, profile closures and the resulting block bound.

use syncsynth::canonical::canonicalize;
use syncsynth::corpus;
use syncsynth::profiles::{compute_k, input_stt, named, ProfileContext, DEFAULT_CLOSURE_CAP};
use syncsynth::resync::ResyncParams;
use syncsynth::sync::shiftlag_finiteness;

fn main() -> syncsynth::Result<()> {
    let (s, t) = (corpus::block_source().to_nfa(), corpus::block_target());
    let a = canonicalize(&s, &shiftlag_finiteness(&s, None)?)?;
    let p = ResyncParams::for_target(&t, &shiftlag_finiteness(&t.to_nfa(), None)?, 0)?;

    let tree = input_stt("a", t.initial(), a.dfa().initial(), 1, &a, &t).tree;
    println!("input STT of \"a\": {}", named(&tree, a.dfa(), &t));
    println!("reduced:           {}", named(&tree.reduce(), a.dfa(), &t));

    let ctx = ProfileContext::new(p.n, &a, &t);
    let inputs = ctx.input_closure(DEFAULT_CLOSURE_CAP)?;
    let outputs = ctx.output_closure(DEFAULT_CLOSURE_CAP)?;
    println!("n = {}: {} input profiles (radius {}), {} output profiles (radius {})", p.n, inputs.len(), inputs.radius, outputs.len(), outputs.radius);
    for x in ["aab", "abab", "bbbb"] {
        println!("idempotent factor of {x}: {:?}", ctx.find_idempotent_factor(x));
    }
    let k = compute_k(p.n, p.gamma, &a, &t, DEFAULT_CLOSURE_CAP)?;
    println!("r1 = {}, r2 = {}, k = {}", k.r1, k.r2, k.k);
    Ok(())
}
