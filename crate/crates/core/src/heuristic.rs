//! Pruned tree search for T-depth-optimal decompositions.
//!
//! Level i holds nodes ⟨V_i⟩⁻¹⋯⟨V_1⟩⁻¹⟨U⟩ grouped into hypernodes by path
//! T-count. Every child of a level is classified by (sde, Hamming-weight
//! change, path T-count); for each path T-count only the feasible class with
//! the fewest members survives. A child with sde 0 is Clifford and closes a
//! decomposition.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use crate::channel::{ChannelMatrix, RpCompact};
use crate::decomposition::{regroup, Decomposition};
use crate::error::{Error, Result};
use crate::genset::{Block, GenSet, RpUnit};
use crate::sparse::SparseChannel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaHam {
    Dec,
    Same,
    Inc,
}

impl DeltaHam {
    fn of(parent: usize, child: usize) -> Self {
        match child.cmp(&parent) {
            std::cmp::Ordering::Less => DeltaHam::Dec,
            std::cmp::Ordering::Equal => DeltaHam::Same,
            std::cmp::Ordering::Greater => DeltaHam::Inc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PruneClass {
    pub sde: u32,
    pub delta_ham: DeltaHam,
    pub path_tcount: usize,
    pub count: usize,
}

impl PruneClass {
    fn key(&self) -> ClassKey {
        (self.sde, self.delta_ham, self.path_tcount)
    }
}

type ClassKey = (u32, DeltaHam, usize);

/// Upper bound on the sde of a child at depth i with budget d'.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// s ≤ n·(d' − i): each remaining block lowers sde by at most n.
    Prose,
    /// s ≤ d' − i − 1, as written in the pseudocode.
    Pseudocode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrunePolicy {
    /// Keep the smallest feasible class per path T-count.
    MinClass,
    /// Keep the smallest feasible classes per path T-count while their total
    /// size stays within the budget (always at least one).
    Budget(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChildStorage {
    /// Store children when the level fits in [`AUTO_STORE_BYTES`].
    Auto,
    Store,
    /// Recompute the selected children in a second pass.
    Recompute,
}

pub const AUTO_STORE_BYTES: usize = 256 << 20;

/// Node budget of the default [`PrunePolicy::Budget`].
pub const DEFAULT_PRUNE_BUDGET: usize = 1024;

#[derive(Clone, Debug)]
pub struct HeuristicOptions {
    pub feasibility: Feasibility,
    pub prune: PrunePolicy,
    /// Drop repeated channels within a hypernode (counts are unaffected).
    pub dedup: bool,
    pub storage: ChildStorage,
    /// Cap on the nodes of one level; by default the level is capped at
    /// [`LEVEL_BYTES`] of channel storage instead.
    pub max_nodes: Option<usize>,
    /// First budget d'; defaults to ⌈sde/n⌉.
    pub budget_start: Option<usize>,
    /// Largest budget tried by [`min_tdepth`].
    pub max_budget: usize,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            feasibility: Feasibility::Prose,
            prune: PrunePolicy::Budget(DEFAULT_PRUNE_BUDGET),
            dedup: true,
            storage: ChildStorage::Auto,
            max_nodes: None,
            budget_start: None,
            max_budget: 16,
        }
    }
}

/// Default memory cap for the nodes of one level.
pub const LEVEL_BYTES: usize = 3 << 29;

#[derive(Clone, Debug)]
pub struct SearchNode {
    channel: SparseChannel,
    /// Blocks V_1, V_2, ... in the order they were peeled off.
    pub path: Vec<Block>,
    pub sde: u32,
    pub ham: usize,
    pub path_tcount: usize,
}

impl SearchNode {
    pub fn root(a: &ChannelMatrix) -> Self {
        Self {
            channel: SparseChannel::from_dense(a),
            path: Vec::new(),
            sde: a.sde(),
            ham: a.hamming_weight(),
            path_tcount: 0,
        }
    }

    /// ⟨V_i⟩⁻¹⋯⟨V_1⟩⁻¹⟨U⟩ for the node's path.
    pub fn channel(&self) -> ChannelMatrix {
        self.channel.to_dense()
    }
}

#[derive(Clone, Debug)]
pub struct Hypernode {
    pub key: usize,
    pub nodes: Vec<SearchNode>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub parents: usize,
    pub children: usize,
    /// Zero at a last level, where only Clifford children are sought.
    pub classes: usize,
    pub selected: usize,
    pub solutions: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeuristicStats {
    pub budget: usize,
    pub levels: Vec<LevelStats>,
}

impl HeuristicStats {
    /// Largest number of nodes held at one level.
    pub fn max_nodes(&self) -> usize {
        self.levels.iter().map(|l| l.parents.max(l.selected)).max().unwrap_or(1)
    }
}

/// Inverse block channels applied with a prefix-sharing walk over the
/// sorted block list.
pub struct Expander {
    n: usize,
    blocks: Vec<Block>,
    unit_ids: Vec<Vec<usize>>,
    lcp: Vec<usize>,
    compacts: Vec<RpCompact>,
}

/// A child seen through its observables.
pub struct ChildProbe<'a> {
    pub sde: u32,
    pub ham: usize,
    base: &'a SparseChannel,
    unit: &'a RpCompact,
}

impl ChildProbe<'_> {
    pub fn materialize(&self) -> Result<SparseChannel> {
        let mut c = SparseChannel::default();
        self.base.apply_into(self.unit, true, &mut c)?;
        Ok(c)
    }
}

impl Expander {
    pub fn new(gen: &GenSet) -> Self {
        let mut blocks: Vec<Block> = gen.blocks().cloned().collect();
        blocks.sort();
        let mut ids: HashMap<RpUnit, usize> = HashMap::new();
        let mut compacts = Vec::new();
        let unit_ids: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                b.units()
                    .iter()
                    .map(|u| {
                        *ids.entry(*u).or_insert_with(|| {
                            compacts.push(u.compact());
                            compacts.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let lcp = (0..blocks.len())
            .map(|i| {
                if i == 0 {
                    return 0;
                }
                unit_ids[i]
                    .iter()
                    .zip(&unit_ids[i - 1])
                    .take_while(|(a, b)| a == b)
                    .count()
            })
            .collect();
        Self {
            n: gen.n(),
            blocks,
            unit_ids,
            lcp,
            compacts,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Calls `f(block index, probe)` for every block whose child has sde at
    /// most `bound`. The probe carries the child's sde and Hamming weight;
    /// the child itself is only built on request. Returns the number of
    /// children skipped for exceeding the bound.
    pub fn for_each_child(
        &self,
        parent: &SparseChannel,
        bound: u32,
        mut f: impl FnMut(usize, ChildProbe<'_>) -> Result<()>,
    ) -> Result<usize> {
        let mut slots: Vec<SparseChannel> = vec![SparseChannel::default(); self.n.saturating_sub(1)];
        let mut slot_sde = vec![0u32; self.n];
        let parent_sde = parent.sde();
        // A prefix at sde s with r units to come ends at sde s - r or more.
        let hopeless = |s: u32, r: usize| s as usize > bound as usize + r;
        let mut skipped = 0usize;
        let mut depth = 0usize;
        'blocks: for (bi, ids) in self.unit_ids.iter().enumerate() {
            let last = ids.len() - 1;
            depth = depth.min(self.lcp[bi]).min(last);
            if hopeless(parent_sde, ids.len()) {
                skipped += 1;
                continue;
            }
            for (j, &s) in slot_sde.iter().enumerate().take(depth) {
                if hopeless(s, ids.len() - j - 1) {
                    skipped += 1;
                    continue 'blocks;
                }
            }
            while depth < last {
                let (done, rest) = slots.split_at_mut(depth);
                let base = if depth == 0 { parent } else { &done[depth - 1] };
                base.apply_into(&self.compacts[ids[depth]], true, &mut rest[0])?;
                slot_sde[depth] = rest[0].sde();
                depth += 1;
                if hopeless(slot_sde[depth - 1], ids.len() - depth) {
                    skipped += 1;
                    continue 'blocks;
                }
            }
            let base = if last == 0 { parent } else { &slots[last - 1] };
            let unit = &self.compacts[ids[last]];
            match base.probe_within(unit, true, bound)? {
                Some((sde, ham)) => f(bi, ChildProbe { sde, ham, base, unit })?,
                None => skipped += 1,
            }
        }
        Ok(skipped)
    }

    /// Calls `f(block index, child)` for the children that are Clifford.
    /// A prefix whose sde exceeds the number of units still to come is
    /// abandoned, since each unit lowers sde by one at most.
    pub fn for_each_clifford_child(
        &self,
        parent: &SparseChannel,
        mut f: impl FnMut(usize, SparseChannel) -> Result<()>,
    ) -> Result<()> {
        let mut slots: Vec<SparseChannel> = vec![SparseChannel::default(); self.n.saturating_sub(1)];
        let mut slot_sde = vec![0u32; self.n];
        let parent_sde = parent.sde();
        let mut depth = 0usize;
        'blocks: for (bi, ids) in self.unit_ids.iter().enumerate() {
            let last = ids.len() - 1;
            depth = depth.min(self.lcp[bi]).min(last);
            if parent_sde as usize > ids.len() {
                continue;
            }
            for (j, &s) in slot_sde.iter().enumerate().take(depth) {
                if s as usize > ids.len() - j - 1 {
                    continue 'blocks;
                }
            }
            while depth < last {
                let (done, rest) = slots.split_at_mut(depth);
                let base = if depth == 0 { parent } else { &done[depth - 1] };
                base.apply_into(&self.compacts[ids[depth]], true, &mut rest[0])?;
                slot_sde[depth] = rest[0].sde();
                depth += 1;
                if slot_sde[depth - 1] as usize > ids.len() - depth {
                    continue 'blocks;
                }
            }
            let base = if last == 0 { parent } else { &slots[last - 1] };
            let unit = &self.compacts[ids[last]];
            if base.probe_clifford(unit, true)? {
                let mut c = SparseChannel::default();
                base.apply_into(unit, true, &mut c)?;
                f(bi, c)?;
            }
        }
        Ok(())
    }

    /// The single child ⟨V⟩⁻¹·parent for one block.
    pub fn child(&self, parent: &ChannelMatrix, bi: usize) -> Result<ChannelMatrix> {
        let mut c = parent.clone();
        for &u in &self.unit_ids[bi] {
            c.apply_rp_left(&self.compacts[u], true)?;
        }
        Ok(c)
    }
}

/// Largest feasible sde for a child at `depth`, or None when no child is.
pub fn sde_bound(policy: Feasibility, n: usize, depth: usize, budget: usize) -> Option<u32> {
    let (d, i) = (budget as i64, depth as i64);
    let b = match policy {
        Feasibility::Prose => n as i64 * (d - i),
        Feasibility::Pseudocode => d - i - 1,
    };
    (b >= 0).then_some(b as u32)
}

fn feasible(policy: Feasibility, n: usize, sde: u32, depth: usize, budget: usize) -> bool {
    sde_bound(policy, n, depth, budget).is_some_and(|b| sde <= b)
}

fn class_order(c: &PruneClass) -> (usize, u32, DeltaHam) {
    (c.count, c.sde, c.delta_ham)
}

/// For each path T-count, the feasible classes kept by the policy.
pub fn select_classes(
    classes: &[PruneClass],
    depth: usize,
    budget: usize,
    n: usize,
    feasibility: Feasibility,
    policy: PrunePolicy,
) -> Vec<PruneClass> {
    let mut by_p: BTreeMap<usize, Vec<PruneClass>> = BTreeMap::new();
    for c in classes {
        if feasible(feasibility, n, c.sde, depth, budget) {
            by_p.entry(c.path_tcount).or_default().push(*c);
        }
    }
    let mut out = Vec::new();
    for (_, mut cs) in by_p {
        cs.sort_by_key(class_order);
        match policy {
            PrunePolicy::MinClass => out.push(cs[0]),
            PrunePolicy::Budget(b) => {
                let mut total = 0usize;
                for (i, c) in cs.into_iter().enumerate() {
                    if i > 0 && total + c.count > b {
                        break;
                    }
                    total += c.count;
                    out.push(c);
                }
            }
        }
    }
    out
}

struct ParentOutcome {
    tally: HashMap<ClassKey, usize>,
    stored: Vec<(ClassKey, usize, SparseChannel, usize)>,
    solutions: Vec<(usize, SparseChannel)>,
    children: usize,
}

fn child_key(ex: &Expander, node: &SearchNode, bi: usize, c: &ChildProbe<'_>) -> ClassKey {
    (
        c.sde,
        DeltaHam::of(node.ham, c.ham),
        node.path_tcount + ex.blocks[bi].t_count(),
    )
}

/// Tallies the children of one parent within the sde bound and optionally
/// keeps them.
fn classify_parent(ex: &Expander, node: &SearchNode, store: bool, bound: u32) -> Result<ParentOutcome> {
    let mut out = ParentOutcome {
        tally: HashMap::new(),
        stored: Vec::new(),
        solutions: Vec::new(),
        children: 0,
    };
    ex.for_each_child(&node.channel, bound, |bi, c| {
        let key = child_key(ex, node, bi, &c);
        *out.tally.entry(key).or_insert(0) += 1;
        if key.0 == 0 {
            out.solutions.push((bi, c.materialize()?));
        } else if store {
            out.stored.push((key, bi, c.materialize()?, c.ham));
        }
        Ok(())
    })?;
    out.children = ex.blocks.len();
    Ok(out)
}

/// Classes of all children of a generation; counts are never deduplicated.
pub fn classify_children(parents: &[SearchNode], gen: &GenSet) -> Result<Vec<PruneClass>> {
    let ex = Expander::new(gen);
    let outcomes: Vec<ParentOutcome> = parents
        .par_iter()
        .map(|p| classify_parent(&ex, p, false, u32::MAX))
        .collect::<Result<_>>()?;
    Ok(merge_tallies(&outcomes))
}

fn merge_tallies(outcomes: &[ParentOutcome]) -> Vec<PruneClass> {
    let mut total: BTreeMap<ClassKey, usize> = BTreeMap::new();
    for o in outcomes {
        for (k, v) in &o.tally {
            *total.entry(*k).or_insert(0) += v;
        }
    }
    total
        .into_iter()
        .map(|((sde, delta_ham, path_tcount), count)| PruneClass {
            sde,
            delta_ham,
            path_tcount,
            count,
        })
        .collect()
}

fn fingerprint(m: &SparseChannel) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}

#[derive(Default)]
struct HypernodeBuilder {
    nodes: Vec<SearchNode>,
    seen: HashMap<u64, Vec<usize>>,
}

impl HypernodeBuilder {
    fn push(&mut self, node: SearchNode, dedup: bool) {
        if dedup {
            let fp = fingerprint(&node.channel);
            let bucket = self.seen.entry(fp).or_default();
            if bucket.iter().any(|&i| self.nodes[i].channel == node.channel) {
                return;
            }
            bucket.push(self.nodes.len());
        }
        self.nodes.push(node);
    }
}

struct MemoLevel {
    /// Children above this sde were not classified.
    bound: u32,
    outcomes: Vec<ParentOutcome>,
    classes: Vec<PruneClass>,
    /// Selected class keys and the generation they produced.
    next: Option<(Vec<ClassKey>, Vec<SearchNode>)>,
}

/// Levels already expanded, shared by successive budgets. A level is reused
/// while the selections above it are unchanged.
pub struct SearchMemo {
    root: Vec<SearchNode>,
    levels: Vec<MemoLevel>,
}

impl SearchMemo {
    pub fn new(a: &ChannelMatrix) -> Self {
        Self {
            root: vec![SearchNode::root(a)],
            levels: Vec::new(),
        }
    }

    fn parents(&self, depth: usize) -> &[SearchNode] {
        if depth == 1 {
            &self.root
        } else {
            &self.levels[depth - 2].next.as_ref().expect("selected").1
        }
    }
}

/// Runs the pruned tree to depth d' and returns every decomposition found
/// at the first level that reaches a Clifford.
pub fn procedure_a(
    a: &ChannelMatrix,
    gen: &GenSet,
    budget: usize,
    opts: &HeuristicOptions,
) -> Result<(Vec<Decomposition>, HeuristicStats)> {
    let ex = Expander::new(gen);
    procedure_a_with(a, &ex, budget, opts, &mut SearchMemo::new(a))
}

pub fn procedure_a_with(
    a: &ChannelMatrix,
    ex: &Expander,
    budget: usize,
    opts: &HeuristicOptions,
    memo: &mut SearchMemo,
) -> Result<(Vec<Decomposition>, HeuristicStats)> {
    a.validate()?;
    let n = a.n();
    if n != ex.n {
        return Err(Error::QubitMismatch(n, ex.n));
    }
    let mut stats = HeuristicStats {
        budget,
        levels: Vec::new(),
    };
    if a.is_clifford() {
        return Ok((vec![Decomposition::clifford(a.to_tableau()?)], stats));
    }
    let max_nodes = opts.max_nodes.unwrap_or(usize::MAX);
    for depth in 1..=budget {
        if memo.levels.len() < depth && depth == budget {
            // Only sde-0 children matter at the last level.
            let parents = memo.parents(depth);
            let hits: Vec<Vec<(usize, SparseChannel)>> = parents
                .par_iter()
                .map(|p| {
                    let mut out = Vec::new();
                    ex.for_each_clifford_child(&p.channel, |bi, c| {
                        out.push((bi, c));
                        Ok(())
                    })?;
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            let found = solutions(ex, parents, hits.iter())?;
            stats.levels.push(LevelStats {
                parents: parents.len(),
                children: parents.len() * ex.blocks.len(),
                solutions: found.len(),
                ..LevelStats::default()
            });
            return Ok((found, stats));
        }
        let bound = sde_bound(opts.feasibility, n, depth, budget).unwrap_or(0);
        if memo.levels.get(depth - 1).is_some_and(|l| l.bound < bound) {
            memo.levels.truncate(depth - 1);
        }
        if memo.levels.len() < depth {
            let parents = memo.parents(depth);
            let per_child = parents.iter().map(|p| p.channel.bytes()).max().unwrap_or(0) + 64;
            let est = parents.len() * ex.blocks.len() * per_child;
            let store = match opts.storage {
                ChildStorage::Store => true,
                ChildStorage::Recompute => false,
                ChildStorage::Auto => est <= AUTO_STORE_BYTES,
            };
            let outcomes: Vec<ParentOutcome> = parents
                .par_iter()
                .map(|p| classify_parent(ex, p, store, bound))
                .collect::<Result<_>>()?;
            let classes = merge_tallies(&outcomes);
            memo.levels.push(MemoLevel {
                bound,
                outcomes,
                classes,
                next: None,
            });
        }
        let parents = memo.parents(depth);
        let lvl = &memo.levels[depth - 1];
        let mut level = LevelStats {
            parents: parents.len(),
            children: lvl.outcomes.iter().map(|o| o.children).sum(),
            classes: lvl.classes.len(),
            ..LevelStats::default()
        };

        let found = solutions(ex, parents, lvl.outcomes.iter().map(|o| &o.solutions))?;
        if !found.is_empty() {
            level.solutions = found.len();
            stats.levels.push(level);
            return Ok((found, stats));
        }

        let selected = select_classes(&lvl.classes, depth, budget, n, opts.feasibility, opts.prune);
        let keys: Vec<ClassKey> = selected.iter().map(|c| c.key()).collect();
        let reuse = matches!(&lvl.next, Some((k, _)) if *k == keys);
        if !reuse {
            let next = select_generation(ex, parents, &lvl.outcomes, &keys, &selected, depth, max_nodes, opts)?;
            memo.levels.truncate(depth);
            let lvl = &mut memo.levels[depth - 1];
            for o in &mut lvl.outcomes {
                o.stored = Vec::new();
            }
            lvl.next = Some((keys, next));
        }
        let generation = memo.parents(depth + 1);
        level.selected = generation.len();
        stats.levels.push(level);
        if generation.is_empty() {
            break;
        }
    }
    Ok((Vec::new(), stats))
}

fn solutions<'a>(
    ex: &Expander,
    parents: &[SearchNode],
    hits: impl Iterator<Item = &'a Vec<(usize, SparseChannel)>>,
) -> Result<Vec<Decomposition>> {
    let mut found = Vec::new();
    for (p, hs) in parents.iter().zip(hits) {
        for (bi, c) in hs {
            let mut path = p.path.clone();
            path.push(ex.blocks[*bi].clone());
            found.push(Decomposition::new(path, c.to_dense().to_tableau()?));
        }
    }
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn select_generation(
    ex: &Expander,
    parents: &[SearchNode],
    outcomes: &[ParentOutcome],
    keys: &[ClassKey],
    selected: &[PruneClass],
    depth: usize,
    max_nodes: usize,
    opts: &HeuristicOptions,
) -> Result<Vec<SearchNode>> {
    let keep: HashSet<ClassKey> = keys.iter().copied().collect();
    let bound = keys.iter().map(|k| k.0).max().unwrap_or(0);
    let want: usize = selected.iter().map(|c| c.count).sum();
    if want > max_nodes && !opts.dedup {
        return Err(Error::Cap(format!("level {depth} needs {want} nodes, cap is {max_nodes}")));
    }
    let mut hyper: BTreeMap<usize, HypernodeBuilder> = BTreeMap::new();
    let mut total = 0usize;
    let mut bytes = 0usize;
    let mut admit = |p: &SearchNode, key: ClassKey, bi: usize, c: SparseChannel, ham: usize| -> Result<()> {
        let mut path = p.path.clone();
        path.push(ex.blocks[bi].clone());
        let h = hyper.entry(key.2).or_default();
        let before = h.nodes.len();
        let size = c.bytes() + path.len() * 64;
        h.push(
            SearchNode {
                channel: c,
                path,
                sde: key.0,
                ham,
                path_tcount: key.2,
            },
            opts.dedup,
        );
        let added = h.nodes.len() - before;
        total += added;
        bytes += added * size;
        if total > max_nodes {
            return Err(Error::Cap(format!("level {depth} exceeds the cap of {max_nodes} nodes")));
        }
        if bytes > LEVEL_BYTES {
            return Err(Error::Cap(format!("level {depth} exceeds {} MiB after {total} nodes", LEVEL_BYTES >> 20)));
        }
        Ok(())
    };
    // Stored children exist only when the whole level was kept.
    let stored = outcomes.iter().any(|o| !o.stored.is_empty())
        || outcomes.iter().all(|o| o.children == o.solutions.len());
    for (p, o) in parents.iter().zip(outcomes) {
        if stored {
            for (key, bi, c, ham) in &o.stored {
                if keep.contains(key) {
                    admit(p, *key, *bi, c.clone(), *ham)?;
                }
            }
        } else {
            let mut picked = Vec::new();
            ex.for_each_child(&p.channel, bound, |bi, c| {
                let key = child_key(ex, p, bi, &c);
                if keep.contains(&key) {
                    picked.push((key, bi, c.materialize()?, c.ham));
                }
                Ok(())
            })?;
            for (key, bi, c, ham) in picked {
                admit(p, key, bi, c, ham)?;
            }
        }
    }
    Ok(hyper.into_values().flat_map(|h| h.nodes).collect())
}

/// The hypernodes of a generation, keyed by path T-count.
pub fn hypernodes(generation: Vec<SearchNode>) -> Vec<Hypernode> {
    let mut map: BTreeMap<usize, Vec<SearchNode>> = BTreeMap::new();
    for node in generation {
        map.entry(node.path_tcount).or_default().push(node);
    }
    map.into_iter()
        .map(|(key, nodes)| Hypernode { key, nodes })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MinTDepthResult {
    pub depth: usize,
    pub decomposition: Decomposition,
    /// ⌈sde/n⌉, a lower bound on the T-depth.
    pub lower_bound: usize,
    pub stats: Vec<HeuristicStats>,
}

pub fn sde_lower_bound(a: &ChannelMatrix) -> usize {
    (a.sde() as usize).div_ceil(a.n())
}

/// Deepens the budget until the pruned search succeeds, then merges
/// adjacent blocks and returns the shortest decomposition.
pub fn min_tdepth(a: &ChannelMatrix, gen: &GenSet, opts: &HeuristicOptions) -> Result<MinTDepthResult> {
    let ex = Expander::new(gen);
    min_tdepth_with(a, &ex, opts)
}

pub fn min_tdepth_with(a: &ChannelMatrix, ex: &Expander, opts: &HeuristicOptions) -> Result<MinTDepthResult> {
    a.validate()?;
    let lower_bound = sde_lower_bound(a);
    if a.is_clifford() {
        return Ok(MinTDepthResult {
            depth: 0,
            decomposition: Decomposition::clifford(a.to_tableau()?),
            lower_bound,
            stats: Vec::new(),
        });
    }
    let mut budget = opts.budget_start.unwrap_or(lower_bound).max(1);
    let mut all_stats = Vec::new();
    let mut memo = SearchMemo::new(a);
    while budget <= opts.max_budget {
        let (decs, stats) = procedure_a_with(a, ex, budget, opts, &mut memo)?;
        all_stats.push(stats);
        if let Some(best) = decs
            .iter()
            .map(regroup)
            .min_by_key(|d| (d.blocks.len(), d.t_count()))
        {
            best.verify(a)?;
            return Ok(MinTDepthResult {
                depth: best.blocks.len(),
                decomposition: best,
                lower_bound,
                stats: all_stats,
            });
        }
        budget += 1;
    }
    Err(Error::NotFound(format!(
        "budget up to {}",
        opts.max_budget
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;
    use crate::circuit::{Circuit, Gate};
    use crate::genset::build_vn;

    fn ch(gates: Vec<Gate>, n: usize) -> ChannelMatrix {
        channel_of(&Circuit::new(n, gates).unwrap().simulate()).unwrap()
    }

    #[test]
    fn t_gate() {
        let g = build_vn(1).unwrap();
        let t = ch(vec![Gate::T(0)], 1);
        let (decs, _) = procedure_a(&t, &g, 1, &HeuristicOptions::default()).unwrap();
        assert!(!decs.is_empty());
        for d in &decs {
            d.verify(&t).unwrap();
            assert_eq!(d.blocks.len(), 1);
        }
        let r = min_tdepth(&t, &g, &HeuristicOptions::default()).unwrap();
        assert_eq!(r.depth, 1);
        assert!(r.decomposition.trailing.is_identity());
    }

    #[test]
    fn clifford_input() {
        let g = build_vn(2).unwrap();
        let c = ch(vec![Gate::H(0), Gate::Cnot(0, 1)], 2);
        let r = min_tdepth(&c, &g, &HeuristicOptions::default()).unwrap();
        assert_eq!(r.depth, 0);
        r.decomposition.verify(&c).unwrap();
    }

    #[test]
    fn classification_counts() {
        let g = build_vn(1).unwrap();
        let t = ch(vec![Gate::T(0)], 1);
        let classes = classify_children(&[SearchNode::root(&t)], &g).unwrap();
        assert_eq!(classes.iter().map(|c| c.count).sum::<usize>(), g.len());
        assert!(classes
            .iter()
            .any(|c| c.sde == 0 && c.delta_ham == DeltaHam::Dec && c.path_tcount == 1));
    }

    #[test]
    fn selection_rules() {
        let c = |sde, delta_ham, count| PruneClass {
            sde,
            delta_ham,
            path_tcount: 1,
            count,
        };
        let sel = select_classes(
            &[c(2, DeltaHam::Dec, 5), c(2, DeltaHam::Inc, 9)],
            1,
            3,
            1,
            Feasibility::Prose,
            PrunePolicy::MinClass,
        );
        assert_eq!(sel, vec![c(2, DeltaHam::Dec, 5)]);
        let sel = select_classes(&[c(3, DeltaHam::Dec, 1)], 1, 3, 1, Feasibility::Prose, PrunePolicy::MinClass);
        assert!(sel.is_empty());
        let sel = select_classes(
            &[c(2, DeltaHam::Inc, 4), c(1, DeltaHam::Inc, 4)],
            1,
            3,
            1,
            Feasibility::Prose,
            PrunePolicy::MinClass,
        );
        assert_eq!(sel[0].sde, 1);
    }

    #[test]
    fn expander_matches_direct_products() {
        let g = build_vn(2).unwrap();
        let ex = Expander::new(&g);
        let u = ch(vec![Gate::T(0), Gate::H(0), Gate::Cnot(0, 1), Gate::T(1)], 2);
        let mut n = 0;
        ex.for_each_child(&SparseChannel::from_dense(&u), u32::MAX, |bi, c| {
            let direct = ex.blocks()[bi].channel().transpose().mul(&u);
            assert_eq!(ex.child(&u, bi).unwrap(), direct);
            let m = c.materialize().unwrap().to_dense();
            assert_eq!(direct, m);
            assert_eq!(c.ham, m.hamming_weight());
            assert_eq!(c.sde, m.sde());
            n += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(n, g.len());
    }

    #[test]
    fn clifford_walk_matches_full_walk() {
        let g = GenSet::from_blocks(2, crate::genset::all_blocks(2)).unwrap();
        let ex = Expander::new(&g);
        let words = [
            vec![Gate::T(0), Gate::T(1), Gate::Cnot(0, 1)],
            vec![Gate::H(0), Gate::Tdg(0), Gate::T(1), Gate::H(1), Gate::Cnot(1, 0)],
            vec![Gate::T(0), Gate::H(0), Gate::T(0), Gate::T(1)],
            vec![Gate::Cnot(0, 1)],
        ];
        for w in words {
            let u = SparseChannel::from_dense(&ch(w, 2));
            let mut full = Vec::new();
            ex.for_each_child(&u, u32::MAX, |bi, c| {
                if c.sde == 0 {
                    full.push((bi, c.materialize()?));
                }
                Ok(())
            })
            .unwrap();
            let mut all = Vec::new();
            ex.for_each_child(&u, u32::MAX, |bi, c| {
                all.push((bi, c.sde, c.ham));
                Ok(())
            })
            .unwrap();
            for bound in 0..4 {
                let mut within = Vec::new();
                let skipped = ex
                    .for_each_child(&u, bound, |bi, c| {
                        within.push((bi, c.sde, c.ham));
                        Ok(())
                    })
                    .unwrap();
                let want: Vec<_> = all.iter().copied().filter(|c| c.1 <= bound).collect();
                assert_eq!(within, want);
                assert_eq!(skipped + within.len(), g.len());
            }
            let mut fast = Vec::new();
            ex.for_each_clifford_child(&u, |bi, c| {
                fast.push((bi, c));
                Ok(())
            })
            .unwrap();
            assert_eq!(full, fast);
        }
    }
}
