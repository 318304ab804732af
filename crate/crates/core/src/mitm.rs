//! Meet-in-the-middle depth search.
//!
//! [`nested_mitm_depth`] is the generic engine over an instruction set of
//! depth-one layers with exact matrix matching. [`tdepth_mitm`] specializes
//! it to T-depth: the alphabet is V_n'', one block per T-depth-one coset,
//! and W†U is matched against the database by coset label, so the trailing
//! Clifford never has to be searched. Labels are invariants, not members of
//! their coset, so the database multiplies block products and only uses
//! labels for lookup.
//!
//! Both engines keep the identity in S_0 and tag every entry with its
//! minimal depth, so S_i holds everything of depth at most i. Round i then
//! covers every depth up to c·i with products of c − 1 entries, and since
//! round i − 1 found nothing, the least certificate of round i is optimal.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelJson, ChannelMatrix};
use crate::circuit::{Circuit, Gate};
use crate::coset::{coset_label, digest, LabelDigest, DIGEST_ALGORITHM};
use crate::decomposition::Decomposition;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::genset::{Block, BlockJson, LabeledBlock};

pub const DB_FORMAT_VERSION: u32 = 1;

/// Default cap on database entries: about 2 GiB of representatives.
pub fn default_max_entries(n: usize) -> usize {
    let bytes = (1usize << (4 * n)) * 16 + 96;
    ((2usize << 30) / bytes).max(1)
}

/// One generator of the database: a block standing for its coset.
#[derive(Clone, Debug)]
pub struct Generator {
    pub block: Block,
    pub channel: ChannelMatrix,
    pub digest: LabelDigest,
}

impl Generator {
    pub fn new(block: Block) -> Self {
        let channel = block.channel();
        Self {
            digest: digest(&coset_label(&channel)),
            block,
            channel,
        }
    }
}

impl From<&LabeledBlock> for Generator {
    fn from(lb: &LabeledBlock) -> Self {
        Self::new(lb.block.clone())
    }
}

/// A coset, held through one member: the product of the generator blocks
/// along its back-pointer chain. The digest is that of its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbEntry {
    pub digest: LabelDigest,
    pub rep: ChannelMatrix,
    /// (index into the previous level, generator index); None for the
    /// identity.
    pub parent: Option<(usize, usize)>,
}

/// Levels S_0, S_1, ...: level i holds the cosets of minimal T-depth
/// exactly i, sorted by label digest.
#[derive(Clone, Debug)]
pub struct SearchDatabase {
    n: usize,
    gens: Vec<Generator>,
    levels: Vec<Vec<DbEntry>>,
    max_entries: usize,
}

impl SearchDatabase {
    pub fn new(n: usize, gens: Vec<Generator>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::Invalid("empty generator set".into()));
        }
        if let Some(g) = gens.iter().find(|g| g.block.n() != n) {
            return Err(Error::QubitMismatch(n, g.block.n()));
        }
        let id = ChannelMatrix::identity(n);
        Ok(Self {
            n,
            gens,
            levels: vec![vec![DbEntry {
                digest: digest(&id),
                rep: id,
                parent: None,
            }]],
            max_entries: default_max_entries(n),
        })
    }

    pub fn from_vn_dprime(n: usize, vn: &[LabeledBlock]) -> Result<Self> {
        Self::new(n, vn.iter().map(Generator::from).collect())
    }

    pub fn with_max_entries(mut self, cap: usize) -> Self {
        self.max_entries = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    /// Index of the deepest level built.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &[DbEntry] {
        &self.levels[i]
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (depth, index) of a label among the levels built so far.
    pub fn find(&self, d: &LabelDigest) -> Option<(usize, usize)> {
        self.levels.iter().enumerate().find_map(|(i, lv)| {
            lv.binary_search_by(|e| e.digest.cmp(d)).ok().map(|j| (i, j))
        })
    }

    /// Builds the next level from generator × previous level, keeping labels
    /// not seen at any lower depth.
    pub fn extend(&mut self) -> Result<()> {
        let prev = self.levels.last().expect("S_0 exists");
        let gens = &self.gens;
        let mut fresh: Vec<DbEntry> = (0..prev.len() * gens.len())
            .into_par_iter()
            .map(|t| {
                let (p, g) = (t / gens.len(), t % gens.len());
                let rep = gens[g].channel.checked_mul(&prev[p].rep)?;
                Ok(DbEntry {
                    digest: digest(&coset_label(&rep)),
                    rep,
                    parent: Some((p, g)),
                })
            })
            .filter(|e: &Result<DbEntry>| match e {
                Ok(e) => self.find(&e.digest).is_none(),
                Err(_) => true,
            })
            .collect::<Result<_>>()?;
        // Least back-pointer wins among equal labels.
        fresh.sort_by(|a, b| a.digest.cmp(&b.digest).then(a.parent.cmp(&b.parent)));
        fresh.dedup_by(|b, a| a.digest == b.digest);
        if self.len() + fresh.len() > self.max_entries {
            return Err(Error::Cap(format!(
                "level {} would hold {} labels, cap is {} in total",
                self.levels.len(),
                fresh.len(),
                self.max_entries
            )));
        }
        self.levels.push(fresh);
        Ok(())
    }

    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            self.extend()?;
        }
        Ok(())
    }

    /// Blocks along the chain of an entry, outermost first; their product
    /// is the entry's representative.
    pub fn entry_blocks(&self, depth: usize, idx: usize) -> Vec<Block> {
        let mut out = Vec::with_capacity(depth);
        let (mut d, mut i) = (depth, idx);
        while let Some((p, g)) = self.levels[d][i].parent {
            out.push(self.gens[g].block.clone());
            d -= 1;
            i = p;
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let header = DbHeader {
            format: DB_FORMAT_VERSION,
            digest: DIGEST_ALGORITHM.into(),
            n: self.n,
            generators: self.gens.len(),
            levels: self.levels.len(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for g in &self.gens {
            writeln!(w, "{}", serde_json::to_string(&DbLine::Gen { block: g.block.to_json() })?)?;
        }
        for (level, lv) in self.levels.iter().enumerate() {
            for e in lv {
                let line = DbLine::Entry {
                    level,
                    digest: hex(&e.digest),
                    parent: e.parent,
                    rep: e.rep.to_json(),
                };
                writeln!(w, "{}", serde_json::to_string(&line)?)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl(path: &Path, n: usize) -> Result<Self> {
        let r = BufReader::new(File::open(path)?);
        let mut lines = r.lines();
        let header: DbHeader = serde_json::from_str(
            &lines.next().ok_or_else(|| Error::Parse("empty database file".into()))??,
        )?;
        if header.format != DB_FORMAT_VERSION || header.digest != DIGEST_ALGORITHM {
            return Err(Error::Parse(format!("unsupported database format {}", header.format)));
        }
        if header.n != n {
            return Err(Error::QubitMismatch(n, header.n));
        }
        let mut gens = Vec::with_capacity(header.generators);
        let mut levels: Vec<Vec<DbEntry>> = vec![Vec::new(); header.levels];
        for line in lines {
            match serde_json::from_str::<DbLine>(&line?)? {
                DbLine::Gen { block } => gens.push(Generator::new(Block::from_json(&block)?)),
                DbLine::Entry {
                    level,
                    digest: d,
                    parent,
                    rep,
                } => {
                    let rep = ChannelMatrix::from_json(&rep)?;
                    let dg = digest(&coset_label(&rep));
                    if hex(&dg) != d || level >= levels.len() {
                        return Err(Error::Parse("database entry does not match its digest".into()));
                    }
                    levels[level].push(DbEntry {
                        digest: dg,
                        rep,
                        parent,
                    });
                }
            }
        }
        if gens.len() != header.generators || levels.iter().any(Vec::is_empty) {
            return Err(Error::Parse("truncated database file".into()));
        }
        for lv in &levels {
            if lv.windows(2).any(|p| p[0].digest >= p[1].digest) {
                return Err(Error::Parse("database level is not sorted".into()));
            }
        }
        let mut db = Self::new(n, gens)?;
        db.levels = levels;
        Ok(db)
    }
}

#[derive(Serialize, Deserialize)]
struct DbHeader {
    format: u32,
    digest: String,
    n: usize,
    generators: usize,
    levels: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DbLine {
    Gen {
        block: BlockJson,
    },
    Entry {
        level: usize,
        digest: String,
        parent: Option<(usize, usize)>,
        rep: ChannelJson,
    },
}

fn hex(d: &LabelDigest) -> String {
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Extends a caller-held database by one level.
pub fn mitm_level_extend(db: &mut SearchDatabase) -> Result<()> {
    db.extend()
}

#[derive(Clone, Debug)]
pub struct MitmResult {
    pub decomposition: Decomposition,
    /// Rounds run, i.e. the deepest database level used.
    pub rounds: usize,
    pub db_entries: usize,
}

/// Smallest T-depth decomposition of A if its T-depth is at most `d`.
/// Returns Ok(None) for "T-depth > d".
pub fn tdepth_mitm(a: &ChannelMatrix, d: usize, c: usize, db: &mut SearchDatabase) -> Result<Option<MitmResult>> {
    if c < 2 {
        return Err(Error::Invalid("nesting c must be at least 2".into()));
    }
    if a.n() != db.n {
        return Err(Error::QubitMismatch(a.n(), db.n));
    }
    a.validate()?;
    if a.is_clifford() {
        return Ok(Some(MitmResult {
            decomposition: Decomposition::clifford(a.to_tableau()?),
            rounds: 0,
            db_entries: db.len(),
        }));
    }
    let k = c - 1;
    for i in 1..=d.div_ceil(c) {
        db.extend_to(i)?;
        let lower = c * (i - 1) + 1;
        let Some((total, ws, hit)) = best_in_round(db, a, i, k, lower) else {
            continue;
        };
        if total > d {
            return Ok(None);
        }
        let dec = assemble(db, a, &ws, hit)?;
        return Ok(Some(MitmResult {
            decomposition: dec,
            rounds: i,
            db_entries: db.len(),
        }));
    }
    Ok(None)
}

type EntryRef = (usize, usize);

/// Least-depth certificate W_1⋯W_k·W' among entries of depth ≤ i, with
/// ties going to the first tuple in enumeration order.
fn best_in_round(db: &SearchDatabase, a: &ChannelMatrix, i: usize, k: usize, lower: usize) -> Option<(usize, Vec<EntryRef>, EntryRef)> {
    let entries: Vec<EntryRef> = (0..=i)
        .flat_map(|lv| (0..db.levels[lv].len()).map(move |j| (lv, j)))
        .collect();
    let m = entries.len();
    let total_tuples = m.checked_pow(k as u32)?;
    let decode = |mut t: usize| -> Vec<EntryRef> {
        let mut ws = vec![(0, 0); k];
        for slot in ws.iter_mut().rev() {
            *slot = entries[t % m];
            t /= m;
        }
        ws
    };
    let probe = |t: usize| -> Option<(usize, usize, EntryRef)> {
        let ws = decode(t);
        let mut w = ChannelMatrix::identity(db.n);
        let mut depth = 0;
        for &(lv, j) in &ws {
            w = w.mul(&db.levels[lv][j].rep);
            depth += lv;
        }
        let rest = w.transpose().mul(a);
        let hit = db.find(&digest(&coset_label(&rest)))?;
        Some((depth + hit.0, t, hit))
    };
    // Chunks keep the early exit at the round's lower bound effective.
    let chunk = 4096usize;
    let mut best: Option<(usize, usize, EntryRef)> = None;
    let mut start = 0usize;
    while start < total_tuples {
        let end = (start + chunk).min(total_tuples);
        let found = (start..end).into_par_iter().filter_map(probe).min();
        if let Some(f) = found {
            if best.is_none_or(|b| f < b) {
                best = Some(f);
            }
        }
        if best.is_some_and(|b| b.0 <= lower) {
            break;
        }
        start = end;
    }
    best.map(|(total, t, hit)| (total, decode(t), hit))
}

fn assemble(db: &SearchDatabase, a: &ChannelMatrix, ws: &[EntryRef], hit: EntryRef) -> Result<Decomposition> {
    // W'·C = W⁻¹·A with W' the hit's representative.
    let blocks: Vec<Block> = ws
        .iter()
        .chain(std::iter::once(&hit))
        .flat_map(|&(lv, j)| db.entry_blocks(lv, j))
        .collect();
    let mut product = ChannelMatrix::identity(db.n);
    for b in &blocks {
        product = product.checked_mul(&b.channel())?;
    }
    let trailing = product.transpose().checked_mul(a)?;
    let dec = Decomposition::new(blocks, trailing.to_tableau()?);
    dec.verify(a)?;
    Ok(dec)
}

/// Depth-one layers: every tiling of the qubits by single-qubit gates from
/// `single` (or nothing) and CNOTs (in both directions) when `cnot` is set,
/// without the empty layer and deduplicated by exact matrix.
pub fn enumerate_layers(n: usize, single: &[fn(usize) -> Gate], cnot: bool) -> Result<Vec<(Vec<Gate>, DenseMatrix)>> {
    if n == 0 || n > 3 {
        return Err(Error::Invalid("layer enumeration supports 1 ≤ n ≤ 3".into()));
    }
    let mut tilings: Vec<Vec<Gate>> = Vec::new();
    fn rec(q: usize, n: usize, used: u32, cur: &mut Vec<Gate>, single: &[fn(usize) -> Gate], cnot: bool, out: &mut Vec<Vec<Gate>>) {
        if q == n {
            out.push(cur.clone());
            return;
        }
        if used & (1 << q) != 0 {
            rec(q + 1, n, used, cur, single, cnot, out);
            return;
        }
        rec(q + 1, n, used, cur, single, cnot, out);
        for g in single {
            cur.push(g(q));
            rec(q + 1, n, used | 1 << q, cur, single, cnot, out);
            cur.pop();
        }
        if cnot {
            for t in q + 1..n {
                if used & (1 << t) == 0 {
                    for g in [Gate::Cnot(q, t), Gate::Cnot(t, q)] {
                        cur.push(g);
                        rec(q + 1, n, used | 1 << q | 1 << t, cur, single, cnot, out);
                        cur.pop();
                    }
                }
            }
        }
    }
    rec(0, n, 0, &mut Vec::new(), single, cnot, &mut tilings);
    let mut seen: HashMap<DenseMatrix, ()> = HashMap::new();
    let id = DenseMatrix::identity(n);
    let mut out = Vec::new();
    for gates in tilings {
        let m = Circuit::new(n, gates.clone())?.simulate();
        if m != id && seen.insert(m.clone(), ()).is_none() {
            out.push((gates, m));
        }
    }
    Ok(out)
}

/// The {H, S, S†, T, T†, CNOT} instruction set.
pub fn clifford_t_layers(n: usize) -> Result<Vec<(Vec<Gate>, DenseMatrix)>> {
    enumerate_layers(n, &[Gate::H, Gate::S, Gate::Sdg, Gate::T, Gate::Tdg], true)
}

/// Minimum-depth factorization of U over `layers` (exact equality, no
/// global phase), as layer indices whose product in order is U; Ok(None)
/// when the depth exceeds `d`. `layers` must be closed under inverse.
pub fn nested_mitm_depth(u: &DenseMatrix, layers: &[DenseMatrix], d: usize, c: usize) -> Result<Option<Vec<usize>>> {
    if c < 2 {
        return Err(Error::Invalid("nesting c must be at least 2".into()));
    }
    if layers.is_empty() {
        return Err(Error::Invalid("empty layer set".into()));
    }
    let n = u.n();
    let id = DenseMatrix::identity(n);
    if *u == id {
        return Ok(Some(Vec::new()));
    }
    // Entry: (matrix, depth, parent key index, layer index).
    let mut table: HashMap<DenseMatrix, usize> = HashMap::new();
    let mut entries: Vec<(DenseMatrix, usize, Option<(usize, usize)>)> = vec![(id.clone(), 0, None)];
    table.insert(id, 0);
    let mut frontier = vec![0usize];
    let k = c - 1;
    for i in 1..=d.div_ceil(c) {
        let mut next = Vec::new();
        for &p in &frontier {
            for (g, l) in layers.iter().enumerate() {
                let m = l.mul(&entries[p].0);
                if !table.contains_key(&m) {
                    table.insert(m.clone(), entries.len());
                    next.push(entries.len());
                    entries.push((m, i, Some((p, g))));
                }
            }
        }
        frontier = next;
        let lower = c * (i - 1) + 1;
        let m = entries.len();
        let Some(total) = m.checked_pow(k as u32) else {
            return Err(Error::Cap("tuple count overflows".into()));
        };
        let mut best: Option<(usize, usize, usize)> = None;
        for t in 0..total {
            let mut tt = t;
            let mut w = DenseMatrix::identity(n);
            let mut depth = 0;
            let mut idx = vec![0; k];
            for slot in idx.iter_mut().rev() {
                *slot = tt % m;
                tt /= m;
            }
            for &e in &idx {
                w = w.mul(&entries[e].0);
                depth += entries[e].1;
            }
            if let Some(&h) = table.get(&w.dagger().mul(u)) {
                let cand = (depth + entries[h].1, t, h);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                    if cand.0 <= lower {
                        break;
                    }
                }
            }
        }
        if let Some((total_depth, t, h)) = best {
            if total_depth > d {
                return Ok(None);
            }
            let mut idx = vec![0; k];
            let mut tt = t;
            for slot in idx.iter_mut().rev() {
                *slot = tt % m;
                tt /= m;
            }
            let mut seq = Vec::with_capacity(total_depth);
            for e in idx.into_iter().chain(std::iter::once(h)) {
                // Entry matrices are L_g · parent, so the chain reads outermost first.
                let mut cur = e;
                while let (_, _, Some((p, g))) = entries[cur] {
                    seq.push(g);
                    cur = p;
                }
            }
            let mut check = DenseMatrix::identity(n);
            for &g in &seq {
                check = check.mul(&layers[g]);
            }
            if check != *u {
                return Err(Error::Verification("nested search certificate does not multiply to U".into()));
            }
            return Ok(Some(seq));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;
    use crate::genset::build_vn_dprime;

    fn ch(gates: Vec<Gate>, n: usize) -> ChannelMatrix {
        channel_of(&Circuit::new(n, gates).unwrap().simulate()).unwrap()
    }

    #[test]
    fn one_qubit_levels() {
        let vn = build_vn_dprime(1).unwrap();
        let mut db = SearchDatabase::from_vn_dprime(1, &vn).unwrap();
        db.extend().unwrap();
        assert_eq!(db.level(1).len(), 3);
        db.extend().unwrap();
        assert!(db.level(2).len() <= 9);
    }

    #[test]
    fn t_and_clifford() {
        let vn = build_vn_dprime(1).unwrap();
        let mut db = SearchDatabase::from_vn_dprime(1, &vn).unwrap();
        let t = ch(vec![Gate::T(0)], 1);
        let r = tdepth_mitm(&t, 1, 2, &mut db).unwrap().unwrap();
        assert_eq!(r.decomposition.blocks.len(), 1);
        let h = ch(vec![Gate::H(0)], 1);
        let r = tdepth_mitm(&h, 1, 2, &mut db).unwrap().unwrap();
        assert!(r.decomposition.blocks.is_empty());
    }

    #[test]
    fn depth_three_one_qubit() {
        let vn = build_vn_dprime(1).unwrap();
        let mut db = SearchDatabase::from_vn_dprime(1, &vn).unwrap();
        let u = ch(vec![Gate::T(0), Gate::H(0), Gate::T(0), Gate::H(0), Gate::T(0)], 1);
        assert!(tdepth_mitm(&u, 2, 2, &mut db).unwrap().is_none());
        let r = tdepth_mitm(&u, 3, 2, &mut db).unwrap().unwrap();
        assert_eq!(r.decomposition.blocks.len(), 3);
        r.decomposition.verify(&u).unwrap();
    }

    #[test]
    fn generic_engine_examples() {
        let layers: Vec<DenseMatrix> = clifford_t_layers(1).unwrap().into_iter().map(|l| l.1).collect();
        assert_eq!(nested_mitm_depth(&DenseMatrix::identity(1), &layers, 3, 2).unwrap(), Some(vec![]));
        let h = Circuit::new(1, vec![Gate::H(0)]).unwrap().simulate();
        assert_eq!(nested_mitm_depth(&h, &layers, 3, 2).unwrap().unwrap().len(), 1);
        let hth = Circuit::new(1, vec![Gate::H(0), Gate::T(0), Gate::H(0)]).unwrap().simulate();
        assert_eq!(nested_mitm_depth(&hth, &layers, 3, 2).unwrap().unwrap().len(), 3);
        assert_eq!(nested_mitm_depth(&hth, &layers, 2, 2).unwrap(), None);
    }

    #[test]
    fn database_round_trip() {
        let vn = build_vn_dprime(1).unwrap();
        let mut db = SearchDatabase::from_vn_dprime(1, &vn).unwrap();
        db.extend_to(2).unwrap();
        let dir = std::env::temp_dir().join(format!("tdepth-db-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("db.jsonl");
        db.write_jsonl(&p).unwrap();
        let back = SearchDatabase::read_jsonl(&p, 1).unwrap();
        assert_eq!(back.len(), db.len());
        assert_eq!(back.level(2), db.level(2));
        assert!(SearchDatabase::read_jsonl(&p, 2).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
