mod bench;
mod input;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tdepth::builtins::random_circuit;
use tdepth::channel::channel_of;
use tdepth::genset::{cache_path, Construction};
use tdepth::heuristic::{ChildStorage, Feasibility, HeuristicOptions, PrunePolicy};
use tdepth::{Circuit, Error, Result};

use crate::input::{load_target, unitary_to_json};
use crate::run::{exit_code, synthesize, Algo, Report, SynthConfig};

#[derive(Parser)]
#[command(name = "tdepth", version, about = "Exact T-depth-optimal Clifford+T synthesis")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for generating-set caches.
    #[arg(long, global = true, env = "TDEPTH_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a generating set and report its size per T-count.
    GenSet {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "vn")]
        genset: Construction,
        /// Output file; defaults to the cache directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a T-depth-optimal circuit for a unitary or channel.
    Synth {
        #[command(flatten)]
        target: TargetArgs,
        /// Circuit output; ".qasm" selects OpenQASM, anything else the gate list.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Write a seeded random Clifford+T circuit and its exact unitary.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t_depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        unitary: Option<PathBuf>,
    },
    /// Run a benchmark suite: benchmark3q, perm2q or random2q:K.
    Bench {
        suite: String,
        /// Instances for random suites.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: bench::Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Check a circuit file against a unitary.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
    },
}

#[derive(Args)]
struct TargetArgs {
    /// JSON unitary {"n", "matrix"} or {"channel"}.
    #[arg(long)]
    input: Option<PathBuf>,
    /// toffoli, fredkin, peres, qor, ntoffoli, cnot or swap.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args, Clone)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "heuristic")]
    algo: Algo,
    /// Generating set for the heuristic: vn or all (every T-depth-one block).
    #[arg(long, default_value = "vn")]
    genset: Construction,
    #[arg(long)]
    budget_start: Option<usize>,
    #[arg(long, default_value_t = 16)]
    max_budget: usize,
    #[arg(long, value_parser = parse_feasibility, default_value = "prose")]
    feasibility: Feasibility,
    /// min-class or budget:B.
    #[arg(long, value_parser = parse_prune, default_value = "budget:1024")]
    prune: PrunePolicy,
    /// on or off.
    #[arg(long, value_parser = parse_on_off, default_value = "on", action = clap::ArgAction::Set)]
    dedup: bool,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Recompute selected children instead of storing them.
    #[arg(long)]
    recompute: bool,
    /// MITM depth bound d.
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    /// MITM nesting parameter c.
    #[arg(long, default_value_t = 2)]
    nesting_c: usize,
    /// MITM database file, read if present and written after the search.
    #[arg(long)]
    db_path: Option<PathBuf>,
    /// MITM database cap in MiB.
    #[arg(long)]
    mem_cap: Option<usize>,
}

fn parse_feasibility(s: &str) -> std::result::Result<Feasibility, String> {
    match s {
        "prose" => Ok(Feasibility::Prose),
        "pseudocode" => Ok(Feasibility::Pseudocode),
        _ => Err("want prose or pseudocode".into()),
    }
}

fn parse_prune(s: &str) -> std::result::Result<PrunePolicy, String> {
    if s == "min-class" {
        return Ok(PrunePolicy::MinClass);
    }
    s.strip_prefix("budget:")
        .and_then(|b| b.parse().ok())
        .map(PrunePolicy::Budget)
        .ok_or_else(|| "want min-class or budget:B".into())
}

fn parse_on_off(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err("want on or off".into()),
    }
}

impl SynthArgs {
    fn config(&self, cache_dir: Option<PathBuf>) -> SynthConfig {
        SynthConfig {
            algo: self.algo,
            heuristic: HeuristicOptions {
                feasibility: self.feasibility,
                prune: self.prune,
                dedup: self.dedup,
                storage: if self.recompute {
                    ChildStorage::Recompute
                } else {
                    ChildStorage::Auto
                },
                max_nodes: self.max_nodes,
                budget_start: self.budget_start,
                max_budget: self.max_budget,
            },
            construction: self.genset,
            cache_dir,
            max_depth: self.max_depth,
            nesting_c: self.nesting_c,
            db_path: self.db_path.clone(),
            mem_cap_mib: self.mem_cap,
        }
    }
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn write_circuit(path: &Path, c: &Circuit) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "qasm") {
        c.to_qasm()
    } else {
        c.to_text()
    };
    Ok(fs::write(path, text)?)
}

#[derive(Serialize)]
struct GenSetReport {
    n: usize,
    genset: &'static str,
    counts: Vec<usize>,
    total: usize,
    seconds: f64,
    path: Option<PathBuf>,
}

fn gen_set(n: usize, genset: Construction, out: Option<PathBuf>, cache_dir: Option<PathBuf>) -> Result<()> {
    let start = Instant::now();
    let g = genset.build(n)?;
    let seconds = start.elapsed().as_secs_f64();
    let path = out.or_else(|| cache_dir.map(|d| cache_path(&d, n, genset)));
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut f = std::io::BufWriter::new(fs::File::create(p)?);
        g.write_jsonl(&mut f, genset)?;
    }
    print_json(&GenSetReport {
        n,
        genset: genset.tag(),
        counts: g.counts(),
        total: g.len(),
        seconds,
        path,
    });
    Ok(())
}

fn random(n: usize, t_depth: usize, seed: u64, circuit: &Path, unitary: Option<&Path>) -> Result<()> {
    let c = random_circuit(n, t_depth, seed)?;
    let m = c.metrics();
    if m.t_depth != t_depth {
        return Err(Error::Verification(format!("random circuit has T-depth {}", m.t_depth)));
    }
    write_circuit(circuit, &c)?;
    if let Some(p) = unitary {
        fs::write(p, serde_json::to_string(&unitary_to_json(&c.simulate()))?)?;
    }
    print_json(&serde_json::json!({ "n": n, "t_depth": m.t_depth, "t_count": m.t_count, "seed": seed }));
    Ok(())
}

/// Prints the verdict; Ok(false) means the circuit is wrong.
fn verify(circuit: &Path, target: &TargetArgs) -> Result<bool> {
    let text = fs::read_to_string(circuit)?;
    let c = if text.trim_start().starts_with("OPENQASM") {
        Circuit::from_qasm(&text)?
    } else {
        Circuit::from_text(&text)?
    };
    let target = load_target(target.input.as_deref(), target.builtin.as_deref())?;
    let verified = match &target {
        input::Target::Unitary(u) => c.n() == u.n() && c.simulate().equal_up_to_phase(u),
        input::Target::Channel(a) => c.n() == a.n() && &channel_of(&c.simulate())? == a,
    };
    let m = c.metrics();
    print_json(&serde_json::json!({ "verified": verified, "t_depth": m.t_depth, "t_count": m.t_count }));
    Ok(verified)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(&Error::Invalid(e.to_string()));
        }
    }
    let cache_dir = cli.cache_dir;
    // Synth prints its own report on every path.
    let synth = matches!(cli.cmd, Cmd::Synth { .. });
    let result = match cli.cmd {
        Cmd::GenSet { n, genset, out } => gen_set(n, genset, out, cache_dir),
        Cmd::Synth { target, out, synth } => {
            let mut report = Report::default();
            let r = load_target(target.input.as_deref(), target.builtin.as_deref())
                .and_then(|t| synthesize(&t, &synth.config(cache_dir), &mut report))
                .and_then(|c| match &out {
                    Some(p) => write_circuit(p, &c),
                    None => Ok(()),
                });
            if let Err(e) = &r {
                report.status = "error";
                report.error.get_or_insert_with(|| e.to_string());
            }
            print_json(&report);
            r
        }
        Cmd::Random {
            n,
            t_depth,
            seed,
            circuit,
            unitary,
        } => random(n, t_depth, seed, &circuit, unitary.as_deref()),
        Cmd::Bench {
            suite,
            count,
            seed,
            format,
            out,
            synth,
        } => match bench::run(&suite, count, seed, format, out.as_deref(), &synth.config(cache_dir)) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(5),
            Err(e) => Err(e),
        },
        Cmd::Verify { circuit, target } => match verify(&circuit, &target) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(5),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !synth {
                print_json(&serde_json::json!({ "status": "error", "error": e.to_string() }));
            }
            fail(&e)
        }
    }
}
