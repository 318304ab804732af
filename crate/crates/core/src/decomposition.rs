//! Decompositions U = B_1⋯B_d·C_0 into T-depth-one blocks and a trailing
//! Clifford.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::clifford::CliffordTableau;
use crate::error::{Error, Result};
use crate::genset::{block_channel, merge_blocks, Block, BlockJson, RpUnit};
use crate::pauli::{symplectic_vec, XorBasis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub blocks: Vec<Block>,
    pub trailing: CliffordTableau,
    pub t_depth_claimed: usize,
}

impl Decomposition {
    pub fn new(blocks: Vec<Block>, trailing: CliffordTableau) -> Self {
        let d = blocks.len();
        Self {
            blocks,
            trailing,
            t_depth_claimed: d,
        }
    }

    pub fn clifford(trailing: CliffordTableau) -> Self {
        Self::new(Vec::new(), trailing)
    }

    pub fn n(&self) -> usize {
        self.trailing.n()
    }

    pub fn t_count(&self) -> usize {
        self.blocks.iter().map(|b| b.t_count()).sum()
    }

    pub fn channel(&self) -> ChannelMatrix {
        let mut m = ChannelMatrix::from_tableau(&self.trailing);
        for b in self.blocks.iter().rev() {
            m = block_channel(b).mul(&m);
        }
        m
    }

    /// Exact re-multiplication check against the target channel.
    pub fn verify(&self, target: &ChannelMatrix) -> Result<()> {
        if self.t_depth_claimed != self.blocks.len() {
            return Err(Error::Verification("claimed depth differs from block count".into()));
        }
        if self.blocks.iter().any(|b| b.n() != self.n()) {
            return Err(Error::Verification("block qubit count mismatch".into()));
        }
        if &self.channel() != target {
            return Err(Error::Verification(
                "decomposition does not multiply back to the target".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            n: self.n(),
            t_depth: self.blocks.len(),
            t_count: self.t_count(),
            blocks: self.blocks.iter().map(|b| b.to_json()).collect(),
            trailing: self.trailing.to_strings(),
        }
    }

    pub fn from_json(j: &DecompositionJson) -> Result<Self> {
        let blocks = j
            .blocks
            .iter()
            .map(Block::from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(blocks, CliffordTableau::from_strings(&j.trailing)?))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecompositionJson {
    pub n: usize,
    pub t_depth: usize,
    pub t_count: usize,
    pub blocks: Vec<BlockJson>,
    /// Images of X_(0..n) then Z_(0..n).
    pub trailing: Vec<String>,
}

/// Greedy left-to-right merge of adjacent blocks.
pub fn merge_pass(dec: &Decomposition) -> Decomposition {
    let mut out: Vec<Block> = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        if let Some(last) = out.last() {
            if let Some(m) = merge_blocks(last, b) {
                *out.last_mut().unwrap() = m;
                continue;
            }
        }
        out.push(b.clone());
    }
    let merged = Decomposition::new(out, dec.trailing.clone());
    debug_assert_eq!(merged.channel(), dec.channel());
    merged
}

/// Search steps [`regroup`] spends before settling for its best layering.
pub const REGROUP_STEPS: usize = 1 << 20;

/// Fewest blocks over all reorderings of the units that keep every
/// anticommuting pair in order. Starts from [`merge_pass`] and searches
/// exhaustively within [`REGROUP_STEPS`].
pub fn regroup(dec: &Decomposition) -> Decomposition {
    let greedy = merge_pass(dec);
    let units: Vec<RpUnit> = dec.blocks.iter().flat_map(|b| b.units().iter().copied()).collect();
    if units.len() <= 1 || greedy.blocks.len() <= 1 {
        return greedy;
    }
    let paulis: Vec<_> = units.iter().map(|u| u.pauli()).collect();
    let mut search = Regroup {
        after: (0..units.len())
            .map(|j| (0..j).filter(|&i| paulis[i].anticommutes(&paulis[j])).collect())
            .collect(),
        vecs: paulis.iter().map(symplectic_vec).collect(),
        layer_of: vec![0; units.len()],
        layers: Vec::new(),
        best: None,
        best_len: greedy.blocks.len(),
        steps: 0,
    };
    search.run(0);
    let Some(assign) = search.best else {
        return greedy;
    };
    let mut layers: Vec<Vec<RpUnit>> = vec![Vec::new(); search.best_len];
    for (u, l) in units.into_iter().zip(assign) {
        layers[l].push(u);
    }
    let blocks = layers
        .into_iter()
        .map(|us| Block::new(us).expect("layer is commuting and independent"))
        .collect();
    let out = Decomposition::new(blocks, dec.trailing.clone());
    debug_assert_eq!(out.channel(), dec.channel());
    out
}

struct Regroup {
    /// Earlier units that anticommute with unit j.
    after: Vec<Vec<usize>>,
    vecs: Vec<u64>,
    layer_of: Vec<usize>,
    layers: Vec<XorBasis>,
    best: Option<Vec<usize>>,
    best_len: usize,
    steps: usize,
}

impl Regroup {
    fn run(&mut self, j: usize) {
        self.steps += 1;
        if self.steps > REGROUP_STEPS || self.layers.len() >= self.best_len {
            return;
        }
        if j == self.vecs.len() {
            self.best_len = self.layers.len();
            self.best = Some(self.layer_of.clone());
            return;
        }
        let lo = self.after[j].iter().map(|&i| self.layer_of[i] + 1).max().unwrap_or(0);
        for l in lo..self.layers.len() {
            if self.layers[l].contains(self.vecs[j]) {
                continue;
            }
            let saved = self.layers[l].clone();
            self.layers[l].insert(self.vecs[j]);
            self.layer_of[j] = l;
            self.run(j + 1);
            self.layers[l] = saved;
        }
        if self.layers.len() + 1 < self.best_len {
            let mut b = XorBasis::default();
            b.insert(self.vecs[j]);
            self.layers.push(b);
            self.layer_of[j] = self.layers.len() - 1;
            self.run(j + 1);
            self.layers.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genset::RpUnit;

    fn block(ps: &[&str]) -> Block {
        Block::new(ps.iter().map(|s| RpUnit::new(s.parse().unwrap(), false).unwrap()).collect()).unwrap()
    }

    #[test]
    fn merge_examples() {
        let d = Decomposition::new(vec![block(&["ZI"]), block(&["IZ"])], CliffordTableau::identity(2));
        let m = merge_pass(&d);
        assert_eq!(m.blocks.len(), 1);
        assert_eq!(m.channel(), d.channel());

        let d = Decomposition::new(vec![block(&["Z"]), block(&["X"])], CliffordTableau::identity(1));
        assert_eq!(merge_pass(&d), d);

        let d = Decomposition::clifford(CliffordTableau::identity(2));
        assert_eq!(merge_pass(&d), d);
    }

    #[test]
    fn regroup_reorders_commuting_units() {
        // Adjacent merging gives [Z0], [X0, Z1], [X1]; [Z0, Z1], [X0, X1] is better.
        let d = Decomposition::new(
            vec![block(&["ZI"]), block(&["XI"]), block(&["IZ"]), block(&["IX"])],
            CliffordTableau::identity(2),
        );
        assert_eq!(merge_pass(&d).blocks.len(), 3);
        let r = regroup(&d);
        assert_eq!(r.blocks.len(), 2);
        assert_eq!(r.channel(), d.channel());

        let d = Decomposition::new(
            vec![block(&["ZI"]), block(&["XI"]), block(&["IZ"]), block(&["ZZ"]), block(&["IX"])],
            CliffordTableau::identity(2),
        );
        let r = regroup(&d);
        assert!(r.blocks.len() <= merge_pass(&d).blocks.len());
        assert_eq!(r.channel(), d.channel());
    }

    #[test]
    fn json_round_trip() {
        let d = Decomposition::new(vec![block(&["XX", "ZZ"])], CliffordTableau::identity(2));
        let back = Decomposition::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        back.verify(&d.channel()).unwrap();
    }
}
