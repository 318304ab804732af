//! Generating sets of T-depth-one blocks.
//!
//! A block is a product of R̃(P) over pairwise commuting, independent
//! Paulis; such a set is {C Z_(i) C†} for a single Clifford C, so the block
//! has T-depth one. [`build_vn`] runs the coset-leader construction of V_n,
//! [`build_vn_dprime`] enumerates every block and keeps one per coset label.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{rp_channel, ChannelMatrix, RpCompact};
use crate::clifford::{enumerate_cliffords, enumerate_coset_leaders_with, CliffordTableau, Completion};
use crate::coset::{coset_label, digest, LabelDigest};
use crate::error::{Error, Result};
use crate::pauli::{commuting_independent, PauliIndex, SignedPauli};

/// Bumped whenever the cache layout or the construction changes.
pub const GENSET_FORMAT_VERSION: u32 = 1;

/// R(P) or R†(P) over an unsigned Pauli.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RpUnit {
    pauli: SignedPauli,
    dagger: bool,
}

impl RpUnit {
    /// Folds the sign: R(−P) and R†(P) have the same channel.
    pub fn new(p: SignedPauli, dagger: bool) -> Result<Self> {
        if p.is_identity() {
            return Err(Error::IdentityPauli);
        }
        Ok(Self {
            pauli: p.unsigned(),
            dagger: dagger ^ p.is_negative(),
        })
    }

    pub fn pauli(&self) -> SignedPauli {
        self.pauli
    }

    pub fn index(&self) -> PauliIndex {
        self.pauli.index()
    }

    pub fn dagger(&self) -> bool {
        self.dagger
    }

    pub fn n(&self) -> usize {
        self.pauli.n()
    }

    pub fn compact(&self) -> RpCompact {
        RpCompact::new(self.pauli, self.dagger).expect("unit Pauli is not the identity")
    }

    fn key(&self) -> (PauliIndex, bool) {
        (self.index(), self.dagger)
    }
}

impl PartialOrd for RpUnit {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for RpUnit {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Block {
    units: Vec<RpUnit>,
}

impl Block {
    /// Validates and canonicalizes (units sorted by Pauli index, then flag).
    pub fn new(mut units: Vec<RpUnit>) -> Result<Self> {
        let Some(first) = units.first() else {
            return Err(Error::InvalidBlock);
        };
        let n = first.n();
        if units.len() > n || units.iter().any(|u| u.n() != n) {
            return Err(Error::InvalidBlock);
        }
        units.sort();
        let ps: Vec<SignedPauli> = units.iter().map(|u| u.pauli).collect();
        if !commuting_independent(&ps) {
            return Err(Error::InvalidBlock);
        }
        Ok(Self { units })
    }

    pub fn units(&self) -> &[RpUnit] {
        &self.units
    }

    pub fn n(&self) -> usize {
        self.units[0].n()
    }

    pub fn t_count(&self) -> usize {
        self.units.len()
    }

    pub fn channel(&self) -> ChannelMatrix {
        block_channel(self)
    }

    /// The block with every unit conjugated by a Clifford: C·B·C†.
    pub fn conjugated(&self, c: &CliffordTableau) -> Block {
        let units = self
            .units
            .iter()
            .map(|u| RpUnit::new(c.conjugate(&u.pauli), u.dagger).expect("non-identity image"))
            .collect();
        Block::new(units).expect("conjugation preserves validity")
    }

    pub fn to_json(&self) -> BlockJson {
        BlockJson {
            units: self
                .units
                .iter()
                .map(|u| {
                    (
                        u.pauli.to_string(),
                        if u.dagger { "Tdg" } else { "T" }.to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(j: &BlockJson) -> Result<Self> {
        let units = j
            .units
            .iter()
            .map(|(p, t)| {
                let dagger = match t.as_str() {
                    "T" => false,
                    "Tdg" => true,
                    other => return Err(Error::Parse(format!("bad unit flag {other:?}"))),
                };
                RpUnit::new(p.parse()?, dagger)
            })
            .collect::<Result<Vec<_>>>()?;
        Block::new(units)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BlockJson {
    pub units: Vec<(String, String)>,
}

/// Product of the unit channels; the order does not matter.
pub fn block_channel(b: &Block) -> ChannelMatrix {
    let mut m = ChannelMatrix::identity(b.n());
    for u in &b.units {
        m.apply_rp_left(&u.compact(), false).expect("block sde ≤ n");
    }
    m
}

/// Whether the two blocks multiply to a single block.
pub fn can_merge(b1: &Block, b2: &Block) -> bool {
    merge_blocks(b1, b2).is_some()
}

pub fn merge_blocks(b1: &Block, b2: &Block) -> Option<Block> {
    if b1.n() != b2.n() {
        return None;
    }
    let seen: HashSet<PauliIndex> = b1.units.iter().map(|u| u.index()).collect();
    if b2.units.iter().any(|u| seen.contains(&u.index())) {
        return None;
    }
    let mut units = b1.units.clone();
    units.extend_from_slice(&b2.units);
    Block::new(units).ok()
}

/// Upper bound 2n·3^{n−1}·16^n on |V_n|.
pub fn vn_upper_bound(n: usize) -> u128 {
    assert!(n >= 1);
    2 * n as u128 * 3u128.pow(n as u32 - 1) * 16u128.pow(n as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSet {
    n: usize,
    by_tcount: Vec<Vec<Block>>,
    index: HashMap<Block, (usize, usize)>,
}

impl GenSet {
    /// Partitions blocks by T-count, keeping the first occurrence of each.
    pub fn from_blocks(n: usize, blocks: impl IntoIterator<Item = Block>) -> Result<Self> {
        let mut by_tcount = vec![Vec::new(); n];
        let mut index = HashMap::new();
        for b in blocks {
            if b.n() != n {
                return Err(Error::QubitMismatch(n, b.n()));
            }
            let j = b.t_count() - 1;
            if index.contains_key(&b) {
                continue;
            }
            index.insert(b.clone(), (j, by_tcount[j].len()));
            by_tcount[j].push(b);
        }
        Ok(Self {
            n,
            by_tcount,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocks with exactly j units, j ∈ [1, n].
    pub fn with_tcount(&self, j: usize) -> &[Block] {
        &self.by_tcount[j - 1]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.by_tcount.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_tcount.iter().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, b: &Block) -> bool {
        self.index.contains_key(b)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_tcount.iter().map(|v| v.len()).collect()
    }

    pub fn write_jsonl(&self, w: &mut impl Write, construction: Construction) -> Result<()> {
        let header = CacheHeader {
            format: GENSET_FORMAT_VERSION,
            n: self.n,
            construction,
            count: self.len(),
        };
        serde_json::to_writer(&mut *w, &header)?;
        writeln!(w)?;
        for b in self.blocks() {
            serde_json::to_writer(&mut *w, &b.to_json())?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a cache, rejecting other format versions, qubit counts or
    /// constructions.
    pub fn read_jsonl(r: impl BufRead, n: usize, construction: Construction) -> Result<Self> {
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Parse("empty generating-set file".into()))??;
        let header: CacheHeader = serde_json::from_str(&first)?;
        if header.format != GENSET_FORMAT_VERSION || header.n != n || header.construction != construction {
            return Err(Error::Parse(format!(
                "stale cache: format {} n {} {:?}, want format {} n {} {:?}",
                header.format, header.n, header.construction, GENSET_FORMAT_VERSION, n, construction
            )));
        }
        let mut blocks = Vec::with_capacity(header.count);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            blocks.push(Block::from_json(&serde_json::from_str(&line)?)?);
        }
        if blocks.len() != header.count {
            return Err(Error::Parse("generating-set cache is truncated".into()));
        }
        Self::from_blocks(n, blocks)
    }
}

/// Which generating set to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// V_n from coset leaders with the default tableau completion.
    #[default]
    CosetLeaders,
    /// Every T-depth-one block, one per channel.
    AllBlocks,
}

impl Construction {
    pub fn tag(self) -> &'static str {
        match self {
            Construction::CosetLeaders => "vn",
            Construction::AllBlocks => "all",
        }
    }

    pub fn build(self, n: usize) -> Result<GenSet> {
        match self {
            Construction::CosetLeaders => build_vn(n),
            Construction::AllBlocks => GenSet::from_blocks(n, all_blocks(n)),
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vn" => Ok(Construction::CosetLeaders),
            "all" => Ok(Construction::AllBlocks),
            _ => Err(Error::Parse(format!("unknown generating set {s:?}, want vn or all"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format: u32,
    n: usize,
    construction: Construction,
    count: usize,
}

pub fn cache_path(dir: &Path, n: usize, construction: Construction) -> PathBuf {
    dir.join(format!("{}-n{n}-v{GENSET_FORMAT_VERSION}.jsonl", construction.tag()))
}

/// Loads a generating set from the cache directory, building and storing it
/// if missing.
pub fn load_or_build(dir: Option<&Path>, n: usize, construction: Construction) -> Result<GenSet> {
    let Some(dir) = dir else {
        return construction.build(n);
    };
    let path = cache_path(dir, n, construction);
    if path.exists() {
        return GenSet::read_jsonl(BufReader::new(fs::File::open(&path)?), n, construction);
    }
    let g = construction.build(n)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        g.write_jsonl(&mut f, construction)?;
        f.flush()?;
    }
    fs::rename(tmp, path)?;
    Ok(g)
}

pub fn load_or_build_vn(dir: Option<&Path>, n: usize) -> Result<GenSet> {
    load_or_build(dir, n, Construction::CosetLeaders)
}

/// The set V_n from the coset-leader construction.
///
/// Step one adds R̃(Z_(i)). Step two walks every coset leader C of every
/// qubit q with C Z_(q) C† = P ≠ Z_(q), every flag for R̃(P), and every
/// T/T†/I configuration of the other qubits i, adding R̃(C Z_(i) C†) for the
/// non-identity slots.
pub fn build_vn(n: usize) -> Result<GenSet> {
    build_vn_with(n, Completion::PreferTrivial)
}

pub fn build_vn_with(n: usize, rule: Completion) -> Result<GenSet> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let mut seen: BTreeSet<Block> = BTreeSet::new();
    let mut order: Vec<Block> = Vec::new();
    let mut add = |b: Block, order: &mut Vec<Block>| {
        if seen.insert(b.clone()) {
            order.push(b);
        }
    };
    for i in 0..n {
        for dagger in [false, true] {
            let b = Block::new(vec![RpUnit::new(SignedPauli::z_q(n, i), dagger)?])?;
            add(b, &mut order);
        }
    }
    let configs = 3usize.pow(n as u32 - 1);
    for q in 0..n {
        let zq = SignedPauli::z_q(n, q);
        for c in enumerate_coset_leaders_with(n, q, rule)? {
            let p = c.img_z(q);
            if p == zq {
                continue;
            }
            for dagger in [false, true] {
                for cfg in 0..configs {
                    let mut units = vec![RpUnit::new(p, dagger)?];
                    let mut rest = cfg;
                    for i in (0..n).filter(|&i| i != q) {
                        let slot = rest % 3;
                        rest /= 3;
                        if slot != 0 {
                            units.push(RpUnit::new(c.img_z(i), slot == 2)?);
                        }
                    }
                    add(Block::new(units)?, &mut order);
                }
            }
        }
    }
    GenSet::from_blocks(n, order)
}

/// Every commuting independent set of unsigned Paulis of size 1..=n, as
/// sorted index lists.
pub fn commuting_independent_sets(n: usize) -> Vec<Vec<PauliIndex>> {
    let dim = 1usize << (2 * n);
    let paulis: Vec<SignedPauli> = (0..dim).map(|i| SignedPauli::from_index(n, i)).collect();
    let mut out = Vec::new();
    let mut cur: Vec<PauliIndex> = Vec::new();
    fn rec(
        n: usize,
        start: usize,
        paulis: &[SignedPauli],
        cur: &mut Vec<PauliIndex>,
        out: &mut Vec<Vec<PauliIndex>>,
    ) {
        for s in start..paulis.len() {
            let ok = cur.iter().all(|&c| paulis[c].commutes(&paulis[s])) && {
                let mut ps: Vec<SignedPauli> = cur.iter().map(|&c| paulis[c]).collect();
                ps.push(paulis[s]);
                commuting_independent(&ps)
            };
            if !ok {
                continue;
            }
            cur.push(s);
            out.push(cur.clone());
            if cur.len() < n {
                rec(n, s + 1, paulis, cur, out);
            }
            cur.pop();
        }
    }
    rec(n, 1, &paulis, &mut cur, &mut out);
    out
}

/// Every valid block over n qubits with all flag assignments.
pub fn all_blocks(n: usize) -> Vec<Block> {
    let mut out = Vec::new();
    for set in commuting_independent_sets(n) {
        for flags in 0..(1usize << set.len()) {
            let units = set
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    RpUnit::new(SignedPauli::from_index(n, p), (flags >> i) & 1 == 1).unwrap()
                })
                .collect();
            out.push(Block::new(units).expect("set is commuting independent"));
        }
    }
    out
}

/// A coset label of a T-depth-one block, with the block that produced it.
#[derive(Clone, Debug)]
pub struct LabeledBlock {
    pub block: Block,
    pub label: ChannelMatrix,
    pub digest: LabelDigest,
}

/// V_n'': one entry per distinct coset label of a T-depth-one block, in the
/// order first met while enumerating [`all_blocks`].
pub fn build_vn_dprime(n: usize) -> Result<Vec<LabeledBlock>> {
    if n == 0 || n > 3 {
        return Err(Error::Invalid("V_n'' is built for 1 ≤ n ≤ 3".into()));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for b in all_blocks(n) {
        let label = coset_label(&block_channel(&b));
        let d = digest(&label);
        if seen.insert(d) {
            out.push(LabeledBlock {
                block: b,
                label,
                digest: d,
            });
        }
    }
    Ok(out)
}

/// Brute-force membership test for T-depth at most one (n ≤ 2): every
/// channel ⟨C·L·C†⟩·⟨C₀⟩ over all Cliffords C and T/T†/I layers L.
pub struct TDepthOneOracle {
    n: usize,
    labels: HashSet<LabelDigest>,
}

impl TDepthOneOracle {
    pub fn new(n: usize) -> Result<Self> {
        let cliffords = enumerate_cliffords(n)?;
        let mut layers = Vec::new();
        for cfg in 0..3usize.pow(n as u32) {
            let mut m = ChannelMatrix::identity(n);
            let mut rest = cfg;
            for q in 0..n {
                let slot = rest % 3;
                rest /= 3;
                if slot != 0 {
                    let u = RpCompact::new(SignedPauli::z_q(n, q), slot == 2)?;
                    m = rp_channel(&u).mul(&m);
                }
            }
            layers.push(m);
        }
        let mut labels = HashSet::new();
        for c in &cliffords {
            let cm = ChannelMatrix::from_tableau(c);
            let ct = cm.transpose();
            for l in &layers {
                labels.insert(digest(&coset_label(&cm.mul(l).mul(&ct))));
            }
        }
        Ok(Self { n, labels })
    }

    pub fn accepts(&self, a: &ChannelMatrix) -> bool {
        a.n() == self.n && self.labels.contains(&digest(&coset_label(a)))
    }

    pub fn coset_count(&self) -> usize {
        self.labels.len()
    }
}

pub fn tdepth1_oracle(a: &ChannelMatrix) -> Result<bool> {
    Ok(TDepthOneOracle::new(a.n())?.accepts(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;
    use crate::circuit::{Circuit, Gate};

    fn unit(s: &str, dagger: bool) -> RpUnit {
        RpUnit::new(s.parse().unwrap(), dagger).unwrap()
    }

    #[test]
    fn sign_folding() {
        assert_eq!(unit("-XZ", false), unit("XZ", true));
    }

    #[test]
    fn block_validation() {
        assert!(Block::new(vec![unit("Z", false), unit("X", false)]).is_err());
        assert!(Block::new(vec![unit("ZI", false), unit("IZ", false), unit("ZZ", false)]).is_err());
        assert!(Block::new(vec![]).is_err());
        let b = Block::new(vec![unit("XX", false), unit("ZZ", true)]).unwrap();
        let c = Block::new(vec![unit("ZZ", true), unit("XX", false)]).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn vn_one_qubit() {
        let g = build_vn(1).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(vn_upper_bound(1), 32);
        assert_eq!(vn_upper_bound(2), 3072);
    }

    #[test]
    fn block_channels() {
        let t = channel_of(&Circuit::new(2, vec![Gate::T(0), Gate::T(1)]).unwrap().simulate()).unwrap();
        let b = Block::new(vec![unit("ZI", false), unit("IZ", false)]).unwrap();
        assert_eq!(block_channel(&b), t);
    }

    #[test]
    fn merging() {
        let z0 = Block::new(vec![unit("ZI", false)]).unwrap();
        let z1 = Block::new(vec![unit("IZ", false)]).unwrap();
        assert!(can_merge(&z0, &z1));
        let z = Block::new(vec![unit("Z", false)]).unwrap();
        let x = Block::new(vec![unit("X", false)]).unwrap();
        assert!(!can_merge(&z, &x));
        let zz = Block::new(vec![unit("ZZ", false)]).unwrap();
        let xx = Block::new(vec![unit("XX", false)]).unwrap();
        assert!(can_merge(&zz, &xx));
        assert!(!can_merge(&z0, &z0));
    }

    #[test]
    fn jsonl_round_trip() {
        let g = build_vn(2).unwrap();
        let mut buf = Vec::new();
        let c = Construction::CosetLeaders;
        g.write_jsonl(&mut buf, c).unwrap();
        let back = GenSet::read_jsonl(&buf[..], 2, c).unwrap();
        assert_eq!(back.counts(), g.counts());
        assert!(GenSet::read_jsonl(&buf[..], 3, c).is_err());
        assert!(GenSet::read_jsonl(&buf[..], 2, Construction::AllBlocks).is_err());
    }

    #[test]
    fn dprime_one_qubit() {
        let d = build_vn_dprime(1).unwrap();
        assert_eq!(d.len(), 3);
        for e in &d {
            assert_eq!(coset_label(&e.label), e.label);
        }
    }
}
