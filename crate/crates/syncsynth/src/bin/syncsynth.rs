use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use syncsynth::automata::{add_endmarkers, determinize, is_endmarked, project_input, trim, Nfa};
use syncsynth::canonical::canonicalize_capped;
use syncsynth::game::{build_arena_with, extract_sdfa, solve, verify_uniformizer};
use syncsynth::io::{nfa_to_dot, nfa_to_json, parse_nfa, sequential_to_dot, AutomatonJson};
use syncsynth::pipeline::{check_hypotheses, decide, decide_recognizable, PipelineConfig, Verdict, CAP_ENV};
use syncsynth::profiles::{k_from_counts, named, ramsey_bound, tree_to_dot, ProfileContext};
use syncsynth::resync::{build_ti, build_tis_capped, ResyncParams};
use syncsynth::sync::{shift_finiteness, shiftlag_finiteness, ShiftlagVerdict};
use syncsynth::Error;

#[derive(Parser)]
#[command(name = "syncsynth", version, about = "Sequential uniformizers for synchronized relations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Output-block bound k (replaces the computed bound)
    #[arg(long = "bound-k", global = true)]
    bound_k: Option<usize>,
    /// Verification depth
    #[arg(long, global = true, default_value_t = 8)]
    depth: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// State, arena and closure cap
    #[arg(long, global = true, env = CAP_ENV)]
    cap: Option<usize>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shift and shiftlag finiteness of a synchronization language
    Classify { lang: PathBuf },
    /// Canonical (12)*(1*+2*) form of a finite-shiftlag source
    Canon { source: PathBuf },
    /// The resynchronized source T_i(S) for i = --bound-k (default 1)
    Resync { source: PathBuf, target: PathBuf },
    /// Profile-closure statistics, or the input STTs of --word as DOT
    Profiles {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        word: Option<String>,
    },
    /// Solves the subset-uniformization game and emits the machine
    Synthesize { lang: PathBuf },
    /// Checks a sequential machine against a source and target
    Verify { machine: PathBuf, source: PathBuf, target: PathBuf },
    /// Decides whether the source has a target-controlled uniformizer
    Decide { source: PathBuf, target: PathBuf },
    /// The exact procedure for finite-shift sources
    DecideRec { source: PathBuf, target: PathBuf },
}

/// Output text plus exit status.
struct Outcome {
    text: String,
    code: u8,
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<Nfa, Error> {
    parse_nfa(&read(path)?)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn config(o: &Opts) -> PipelineConfig {
    let mut cfg = PipelineConfig { k_override: o.bound_k, depth: o.depth, ..Default::default() };
    if let Some(c) = o.cap {
        cfg.state_cap = c;
        cfg.arena_cap = c;
        cfg.closure_cap = c;
    }
    cfg
}

fn verdict_outcome(v: &Verdict, format: Format) -> Outcome {
    let text = match (format, &v.machine) {
        (Format::Dot, Some(m)) => sequential_to_dot(m, "uniformizer"),
        _ => v.to_json(),
    };
    Outcome { text, code: v.answer.exit_code() as u8 }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let o = &cli.opts;
    let cfg = config(o);
    cfg.validate()?;
    let ok = |text: String| Outcome { text, code: 0 };
    match &cli.cmd {
        Cmd::Classify { lang } => {
            let l = load(lang)?;
            let shift = shift_finiteness(&l);
            let shiftlag = shiftlag_finiteness(&l, None)?;
            Ok(ok(pretty(&json!({ "shift": shift, "shiftlag": shiftlag }))))
        }
        Cmd::Canon { source } => {
            let s = load(source)?;
            let cert = shiftlag_finiteness(&s, None)?;
            if let ShiftlagVerdict::Infinite { witness } = &cert.verdict {
                return Err(Error::OutsideHypotheses { which: "source".into(), witness: witness.to_string() });
            }
            let a = canonicalize_capped(&s, &cert, cfg.state_cap)?.into_dfa().to_nfa();
            Ok(ok(match o.format {
                Format::Json => nfa_to_json(&a),
                Format::Dot => nfa_to_dot(&a, "canonical"),
            }))
        }
        Cmd::Resync { source, target } => {
            let (s, t) = (load(source)?, load(target)?);
            let (cs, ct) = check_hypotheses(&s, &t)?;
            let a = canonicalize_capped(&s, &cs, cfg.state_cap)?;
            let tdfa = determinize(&t);
            let p = ResyncParams::for_target(&tdfa, &ct, o.bound_k.unwrap_or(1))?;
            let ti = build_ti(&tdfa, &p);
            let tis = build_tis_capped(&a, &ti, &p, cfg.state_cap)?;
            Ok(ok(match o.format {
                Format::Dot => nfa_to_dot(&tis, "resynchronized"),
                Format::Json => pretty(&json!({
                    "params": p,
                    "sizes": {
                        "canonical_states": a.dfa().num_states(),
                        "ti_states": ti.num_states(),
                        "tis_states": tis.num_states(),
                        "tis_transitions": tis.num_transitions(),
                    },
                    "automaton": AutomatonJson::from_nfa(&tis),
                })),
            }))
        }
        Cmd::Profiles { source, target, word } => {
            let (s, t) = (load(source)?, load(target)?);
            let (cs, ct) = check_hypotheses(&s, &t)?;
            let a = canonicalize_capped(&s, &cs, cfg.state_cap)?;
            let tdfa = determinize(&t);
            let p = ResyncParams::for_target(&tdfa, &ct, 0)?;
            let ctx = ProfileContext::new(p.n, &a, &tdfa);
            if o.format == Format::Dot {
                let x = word.clone().unwrap_or_else(|| a.dfa().alphabet.input.iter().take(1).collect());
                let prof = ctx.input_profile(&x);
                let mut out = String::new();
                for bq in tdfa.states() {
                    for aq in a.dfa().states() {
                        let tree = named(prof.tree(bq, aq), a.dfa(), &tdfa);
                        out.push_str(&tree_to_dot(&tree, &format!("{x} from ({},{})", tdfa.name(bq), a.dfa().name(aq))));
                    }
                }
                return Ok(ok(out));
            }
            let inputs = ctx.input_closure(cfg.closure_cap)?;
            let outputs = ctx.output_closure(cfg.closure_cap)?;
            let k = k_from_counts(inputs.len(), outputs.len(), outputs.radius, p.gamma);
            let mut report = json!({
                "n": p.n,
                "gamma": p.gamma,
                "depth": ctx.params().depth,
                "input_closure": { "size": inputs.len(), "radius": inputs.radius },
                "output_closure": { "size": outputs.len(), "radius": outputs.radius },
                "ramsey_bound": ramsey_bound(inputs.len()).to_string(),
                "k": k,
            });
            if let Some(x) = word {
                report["word"] = json!({ "word": x, "idempotent_factor": ctx.find_idempotent_factor(x) });
            }
            Ok(ok(pretty(&report)))
        }
        Cmd::Synthesize { lang } => {
            let l = load(lang)?;
            let l = if is_endmarked(&l) { l } else { add_endmarkers(&trim(&l))? };
            let p = determinize(&l);
            let d = determinize(&project_input(&l));
            let arena = build_arena_with(&l, p.num_states() * d.num_states() + 1, cfg.arena_cap)?;
            let sol = solve(&arena);
            let report = json!({
                "winning": sol.out_wins(&arena),
                "arena_vertices": arena.vertices.len(),
                "winning_region": sol.region_size(),
                "iterations": sol.iterations,
                "burst_cap": arena.cap,
            });
            if !sol.out_wins(&arena) {
                return Ok(Outcome { text: pretty(&report), code: 1 });
            }
            let m = extract_sdfa(&arena, &sol)?;
            Ok(ok(match o.format {
                Format::Dot => sequential_to_dot(&m, "uniformizer"),
                Format::Json => pretty(&json!({ "report": report, "machine": AutomatonJson::from_sequential(&m) })),
            }))
        }
        Cmd::Verify { machine, source, target } => {
            let text = read(machine)?;
            let j: AutomatonJson = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let m = j.to_sequential()?;
            let (s, t) = (load(source)?, load(target)?);
            let r = verify_uniformizer(&m, &s, &t, o.depth);
            let code = if r.passed { 0 } else { 1 };
            Ok(Outcome { text: pretty(&json!(r)), code })
        }
        Cmd::Decide { source, target } => {
            let v = decide(&load(source)?, &load(target)?, &cfg)?;
            Ok(verdict_outcome(&v, o.format))
        }
        Cmd::DecideRec { source, target } => {
            let v = decide_recognizable(&load(source)?, &load(target)?, &cfg)?;
            Ok(verdict_outcome(&v, o.format))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut text = out.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            match &cli.opts.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
