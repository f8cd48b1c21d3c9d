//! Solves the uniformization game on an endmarked language and prints the
//! synthesized machine, or In's spoiling certificate when Out loses.

use syncsynth::automata::{add_endmarkers, ENDMARK};
use syncsynth::canonical::input_first;
use syncsynth::corpus;
use syncsynth::game::{build_arena, extract_sdfa, replay_spoiling, solve, spoiling_certificate};
use syncsynth::resync::build_tprime_recognizable;

fn main() -> syncsynth::Result<()> {
    for (name, s, t) in [
        ("choice", corpus::choice_source(), corpus::choice_target()),
        ("early choice", corpus::early_choice_source(), corpus::early_choice_target()),
    ] {
        // All T-controlled synchronizations of pairs in S.
        let lang = add_endmarkers(&build_tprime_recognizable(&input_first(&s.to_nfa())?, &t)?)?;
        let arena = build_arena(&lang)?;
        let sol = solve(&arena);
        println!("{name}: {} vertices, Out wins {} of them", arena.vertices.len(), sol.region_size());
        if sol.out_wins(&arena) {
            let u = extract_sdfa(&arena, &sol)?;
            for x in ["ab", "aca", "aaba"] {
                let input: Vec<char> = x.chars().chain([ENDMARK]).collect();
                println!("  {x} -> {:?}", u.transduce(&input).map(|w| w.to_string()));
            }
        } else {
            let cert = spoiling_certificate(&arena).expect("In wins");
            println!("  In spoils with {} moves; replay ok: {}", cert.in_moves.len(), replay_spoiling(&arena, &cert));
        }
    }
    Ok(())
}
