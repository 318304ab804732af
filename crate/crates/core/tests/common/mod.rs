//! Oracles shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use tdepth::builtins::random_circuit;
use tdepth::channel::channel_of;
use tdepth::clifford::enumerate_cliffords;
use tdepth::coset::{coset_label, digest};
use tdepth::{ChannelMatrix, Circuit, DenseMatrix, Gate, SignedPauli};

/// Signed non-identity Paulis on n qubits.
pub fn signed_paulis(n: usize) -> Vec<SignedPauli> {
    (1..1usize << (2 * n))
        .flat_map(|i| {
            let p = SignedPauli::from_index(n, i);
            [p, p.negate()]
        })
        .collect()
}

/// Channels of seeded random circuits with T-depth 0 to 5.
pub fn corpus(n: usize, len: usize) -> Vec<ChannelMatrix> {
    (0..len as u64)
        .map(|s| channel_of(&random_circuit(n, (s % 6) as usize, 1000 + s).unwrap().simulate()).unwrap())
        .collect()
}

/// Label digests of C·L·C† for every Clifford C and nonempty T/T†/I
/// layer L.
pub fn brute_force_depth_one(n: usize) -> HashSet<[u8; 32]> {
    let layers: Vec<DenseMatrix> = (1..3usize.pow(n as u32))
        .map(|cfg| {
            let mut gates = Vec::new();
            let mut rest = cfg;
            for q in 0..n {
                match rest % 3 {
                    1 => gates.push(Gate::T(q)),
                    2 => gates.push(Gate::Tdg(q)),
                    _ => {}
                }
                rest /= 3;
            }
            Circuit::new(n, gates).unwrap().simulate()
        })
        .collect();
    let mut out = HashSet::new();
    for c in enumerate_cliffords(n).unwrap() {
        let cm = ChannelMatrix::from_tableau(&c);
        let ct = cm.transpose();
        for l in &layers {
            out.insert(digest(&coset_label(&cm.mul(&channel_of(l).unwrap()).mul(&ct))));
        }
    }
    out
}

/// Exact BFS depth of every unitary reachable within `d` layers.
pub fn bfs(layers: &[DenseMatrix], d: usize) -> HashMap<DenseMatrix, usize> {
    let id = DenseMatrix::identity(layers[0].n());
    let mut dist = HashMap::from([(id.clone(), 0)]);
    let mut frontier = vec![id];
    for depth in 1..=d {
        let mut next = Vec::new();
        for u in &frontier {
            for l in layers {
                let v = u.mul(l);
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), depth);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    dist
}
