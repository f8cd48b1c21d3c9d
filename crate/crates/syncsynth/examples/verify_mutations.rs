//! Checks a hand-written uniformizer, then every single-edge redirection of it.

use syncsynth::automata::{infer_partition, SequentialDfa};
use syncsynth::corpus;
use syncsynth::game::verify_uniformizer;

fn main() -> syncsynth::Result<()> {
    let (s, t) = (corpus::choice_source().to_nfa(), corpus::choice_target().to_nfa());
    let u = corpus::choice_uniformizer();
    let machine = SequentialDfa::new(u.clone(), infer_partition(&u)?)?;
    println!("original: {:?}", verify_uniformizer(&machine, &s, &t, 6).passed);
    let (mut caught, mut total) = (0, 0);
    for (p, l, q) in u.transitions() {
        for r in u.states().filter(|&r| r != q) {
            let mut m = u.clone();
            m.set_transition(p, l, r);
            let Ok(part) = infer_partition(&m) else { continue };
            let Ok(seq) = SequentialDfa::new(m, part) else { continue };
            total += 1;
            let report = verify_uniformizer(&seq, &s, &t, 6);
            if let Some(v) = report.violation {
                caught += 1;
                println!("  {p} -{l}-> {r}: {v}");
            }
        }
    }
    println!("{caught} of {total} mutants rejected");
    Ok(())
}
