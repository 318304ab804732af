//! Benchmark suites.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use tdepth::builtins::{builtin, random_circuit, two_qubit_permutations};
use tdepth::{Error, Result};

use crate::input::Target;
use crate::run::{synthesize, Report, SynthConfig};

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Row {
    name: String,
    input_t_depth: Option<usize>,
    #[serde(flatten)]
    report: Report,
}

fn instances(suite: &str, count: usize, seed: u64) -> Result<Vec<(String, Option<usize>, Target)>> {
    if suite == "benchmark3q" {
        return ["toffoli", "fredkin", "peres", "qor", "ntoffoli"]
            .iter()
            .map(|&name| Ok((name.to_string(), None, Target::Unitary(builtin(name)?))))
            .collect();
    }
    if suite == "perm2q" {
        return Ok(two_qubit_permutations()
            .into_iter()
            .enumerate()
            .map(|(i, u)| (format!("perm{i}"), Some(0), Target::Unitary(u)))
            .collect());
    }
    let k: usize = suite
        .strip_prefix("random2q:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| Error::Parse(format!("unknown suite {suite:?}")))?;
    (0..count as u64)
        .map(|i| {
            let c = random_circuit(2, k, seed + i)?;
            Ok((format!("random{}", seed + i), Some(k), Target::Unitary(c.simulate())))
        })
        .collect()
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), |v| v.to_string())
}

fn csv(rows: &[Row]) -> String {
    let mut s = String::from("name,input_t_depth,status,t_depth,t_count,verified,lower_bound,max_nodes,seconds\n");
    for r in rows {
        let p = &r.report;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.name,
            opt(&r.input_t_depth),
            p.status,
            opt(&p.t_depth),
            opt(&p.t_count),
            p.verified,
            opt(&p.lower_bound),
            opt(&p.max_nodes),
            p.seconds
        )
        .expect("writing to a string");
    }
    s
}

/// Runs every instance; Ok(false) if any is unverified or exceeds its input
/// T-depth.
pub fn run(suite: &str, count: usize, seed: u64, format: Format, out: Option<&Path>, cfg: &SynthConfig) -> Result<bool> {
    let mut rows = Vec::new();
    let mut bad = 0usize;
    for (name, input_t_depth, target) in instances(suite, count, seed)? {
        let mut report = Report::default();
        let ok = synthesize(&target, cfg, &mut report).is_ok();
        if !ok || input_t_depth.is_some_and(|k| report.t_depth.is_some_and(|d| d > k)) {
            bad += 1;
        }
        eprintln!("{name}: {} t_depth {}", report.status, opt(&report.t_depth));
        rows.push(Row {
            name,
            input_t_depth,
            report,
        });
    }
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows)?,
        Format::Csv => csv(&rows),
    };
    match out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    if bad > 0 {
        eprintln!("{bad} of {} instances failed", rows.len());
    }
    Ok(bad == 0)
}
