//! Writes every corpus instance as `<dir>/<name>.source.json` and
//! `<dir>/<name>.target.json` for use with the command-line tool.

use syncsynth::corpus;
use syncsynth::io::nfa_to_json;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    std::fs::create_dir_all(&dir)?;
    for (name, s, t) in corpus::instances() {
        std::fs::write(format!("{dir}/{name}.source.json"), nfa_to_json(&s.to_nfa()))?;
        std::fs::write(format!("{dir}/{name}.target.json"), nfa_to_json(&t.to_nfa()))?;
    }
    let slugs = ["one_two", "alternating", "alternating_tail", "two_rounds", "free"];
    for (slug, (_, l)) in slugs.iter().zip(corpus::families()) {
        std::fs::write(format!("{dir}/family_{slug}.json"), nfa_to_json(&l))?;
    }
    println!("wrote corpus to {dir}");
    Ok(())
}
