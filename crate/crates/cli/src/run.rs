//! Synthesis shared by `synth` and `bench`.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use tdepth::channel::channel_of;
use tdepth::decomposition::Decomposition;
use tdepth::genset::{build_vn_dprime, load_or_build, Construction};
use tdepth::heuristic::{min_tdepth, sde_lower_bound, HeuristicOptions};
use tdepth::mitm::{default_max_entries, tdepth_mitm, SearchDatabase};
use tdepth::synth::{decomposition_to_circuit, handle_ancilla, validate_exact_synthesizable, verify_circuit, Synthesizability};
use tdepth::{ChannelMatrix, Circuit, DenseMatrix, Error, Result};

use crate::input::Target;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Heuristic,
    Mitm,
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub algo: Algo,
    pub heuristic: HeuristicOptions,
    pub construction: Construction,
    pub cache_dir: Option<PathBuf>,
    pub max_depth: usize,
    pub nesting_c: usize,
    pub db_path: Option<PathBuf>,
    pub mem_cap_mib: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub status: &'static str,
    pub algo: Option<Algo>,
    pub n: Option<usize>,
    pub ancillas: usize,
    pub t_depth: Option<usize>,
    pub t_count: Option<usize>,
    pub verified: bool,
    pub lower_bound: Option<usize>,
    /// Most nodes held at one level of the heuristic tree.
    pub max_nodes: Option<usize>,
    /// Nodes kept per level for each budget tried.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nodes_per_level: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub db_entries: Option<usize>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Json(_) => 2,
        Error::NotUnitary | Error::NotOrthogonal | Error::NotReal | Error::QubitMismatch(..) => 3,
        Error::Cap(_) => 4,
        Error::Verification(_) => 5,
        Error::NotFound(_) => 6,
        _ => 1,
    }
}

/// The channel to decompose and the unitary the circuit must match.
fn prepare(target: &Target, report: &mut Report) -> Result<(ChannelMatrix, Option<DenseMatrix>)> {
    match target {
        Target::Unitary(u) => match validate_exact_synthesizable(u)? {
            Synthesizability::Reject => Err(Error::NotUnitary),
            Synthesizability::NoAncilla => Ok((channel_of(u)?, Some(u.clone()))),
            Synthesizability::OneAncilla => {
                report.ancillas = 1;
                Ok((handle_ancilla(u, 1)?, Some(DenseMatrix::identity(1).kron(u))))
            }
        },
        Target::Channel(a) => {
            a.validate()?;
            Ok((a.clone(), None))
        }
    }
}

fn decompose(a: &ChannelMatrix, cfg: &SynthConfig, report: &mut Report) -> Result<Decomposition> {
    let n = a.n();
    report.lower_bound = Some(sde_lower_bound(a));
    match cfg.algo {
        Algo::Heuristic => {
            let gen = load_or_build(cfg.cache_dir.as_deref(), n, cfg.construction)?;
            let r = min_tdepth(a, &gen, &cfg.heuristic)?;
            report.max_nodes = Some(r.stats.iter().map(|s| s.max_nodes()).max().unwrap_or(1));
            report.nodes_per_level = r
                .stats
                .iter()
                .map(|s| s.levels.iter().map(|l| l.parents).collect())
                .collect();
            Ok(r.decomposition)
        }
        Algo::Mitm => {
            let mut db = match &cfg.db_path {
                Some(p) if p.exists() => SearchDatabase::read_jsonl(p, n)?,
                _ => SearchDatabase::from_vn_dprime(n, &build_vn_dprime(n)?)?,
            };
            let cap = match cfg.mem_cap_mib {
                Some(mib) => ((mib << 20) / ((16usize << (4 * n)) + 64)).max(1),
                None => default_max_entries(n),
            };
            db = db.with_max_entries(cap);
            let found = tdepth_mitm(a, cfg.max_depth, cfg.nesting_c, &mut db);
            report.db_entries = Some(db.len());
            if let Some(p) = &cfg.db_path {
                db.write_jsonl(p)?;
            }
            found?
                .map(|r| r.decomposition)
                .ok_or_else(|| Error::NotFound(format!("T-depth exceeds {}", cfg.max_depth)))
        }
    }
}

/// Decomposes, synthesizes and verifies. The report is filled in as far as
/// the run got, including on error.
pub fn synthesize(target: &Target, cfg: &SynthConfig, report: &mut Report) -> Result<Circuit> {
    let start = Instant::now();
    report.algo = Some(cfg.algo);
    let out = (|| {
        let (a, dense) = prepare(target, report)?;
        report.n = Some(a.n());
        let dec = decompose(&a, cfg, report)?;
        dec.verify(&a)?;
        let circuit = decomposition_to_circuit(&dec)?;
        verify_circuit(&circuit, &a, dense.as_ref())?;
        let m = circuit.metrics();
        if m.t_depth != dec.blocks.len() || m.t_count != dec.t_count() {
            return Err(Error::Verification("circuit metrics differ from the decomposition".into()));
        }
        report.t_depth = Some(m.t_depth);
        report.t_count = Some(m.t_count);
        report.verified = true;
        Ok(circuit)
    })();
    report.seconds = start.elapsed().as_secs_f64();
    match &out {
        Ok(_) => report.status = "ok",
        Err(e) => {
            report.status = "error";
            report.error = Some(e.to_string());
        }
    }
    out
}
