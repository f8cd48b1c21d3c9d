//! Runs the full decision procedure on every corpus instance.

use syncsynth::corpus;
use syncsynth::pipeline::{decide, PipelineConfig};

fn main() {
    let cfg = PipelineConfig { k_override: Some(2), ..Default::default() };
    for (name, s, t) in corpus::instances() {
        match decide(&s.to_nfa(), &t.to_nfa(), &cfg) {
            Ok(v) => {
                let detail = match (&v.machine, &v.witness) {
                    (Some(m), _) => format!("machine with {} states", m.dfa().num_states()),
                    (None, Some(w)) => format!("{w:?}"),
                    _ => String::new(),
                };
                println!("{name:<17} {:?} via {:?}: {detail}", v.answer, v.route);
            }
            Err(e) => println!("{name:<17} rejected: {e}"),
        }
    }
}
