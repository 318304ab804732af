use std::collections::HashSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdepth::builtins::random_circuit;
use tdepth::channel::{channel_of, dense_rp, rp_channel};
use tdepth::clifford::enumerate_cliffords;
use tdepth::coset::coset_label;
use tdepth::genset::build_vn_dprime;
use tdepth::mitm::{clifford_t_layers, nested_mitm_depth};
use tdepth::{ChannelMatrix, Circuit, DenseMatrix, Gate, RpCompact};

mod common;
use common::{bfs, brute_force_depth_one, corpus, signed_paulis};

fn gate(kind: u8, a: usize, b: usize, n: usize) -> Gate {
    let q = a % n;
    match kind % 9 {
        0 => Gate::H(q),
        1 => Gate::S(q),
        2 => Gate::Sdg(q),
        3 => Gate::T(q),
        4 => Gate::Tdg(q),
        5 => Gate::X(q),
        6 => Gate::Y(q),
        7 => Gate::Z(q),
        _ if n > 1 => Gate::Cnot(q, (q + 1 + b % (n - 1)) % n),
        _ => Gate::H(q),
    }
}

fn word(n: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>()), 0..12)
        .prop_map(move |gs| Circuit::new(n, gs.into_iter().map(|(k, a, b)| gate(k, a, b, n)).collect()).unwrap())
}

fn word_pair() -> impl Strategy<Value = (Circuit, Circuit)> {
    (1usize..=2).prop_flat_map(|n| (word(n), word(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn channel_is_multiplicative((u, v) in word_pair()) {
        let (mu, mv) = (u.simulate(), v.simulate());
        let lhs = channel_of(&mu.mul(&mv)).unwrap();
        let rhs = channel_of(&mu).unwrap().mul(&channel_of(&mv).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn label_is_idempotent(seed in any::<u64>(), depth in 0usize..5, n in 1usize..=2) {
        let w = channel_of(&random_circuit(n, depth, seed).unwrap().simulate()).unwrap();
        let l = coset_label(&w);
        prop_assert_eq!(coset_label(&l), l.clone());
        prop_assert_eq!(l.sde(), w.sde());
    }
}

#[test]
fn sde_changes_by_at_most_one() {
    let mut violations = 0;
    let mut checked = 0;
    for w in corpus(1, 100) {
        for p in signed_paulis(1) {
            for dagger in [false, true] {
                let r = rp_channel(&RpCompact::new(p, dagger).unwrap());
                let d = r.mul(&w).sde() as i64 - w.sde() as i64;
                checked += 1;
                if d.abs() > 1 {
                    violations += 1;
                }
            }
        }
    }
    assert_eq!(checked, 1200);
    assert_eq!(violations, 0);
}

#[test]
fn sparse_unit_matches_dense_channel() {
    for n in 1..=2 {
        for p in signed_paulis(n) {
            for dagger in [false, true] {
                let sparse = rp_channel(&RpCompact::new(p, dagger).unwrap());
                assert_eq!(sparse, channel_of(&dense_rp(&p, dagger)).unwrap(), "{p} {dagger}");
            }
        }
    }
}

#[test]
fn label_is_invariant_under_right_cliffords() {
    let words = corpus(1, 20);
    for c in enumerate_cliffords(1).unwrap() {
        let cm = ChannelMatrix::from_tableau(&c);
        for w in &words {
            assert_eq!(coset_label(&w.mul(&cm)), coset_label(w));
        }
    }
    let mut all = enumerate_cliffords(2).unwrap();
    assert_eq!(all.len(), 11520);
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(7));
    let words = corpus(2, 4);
    for c in &all[..500] {
        let cm = ChannelMatrix::from_tableau(c);
        for w in &words {
            assert_eq!(coset_label(&w.mul(&cm)), coset_label(w));
        }
    }
}

#[test]
fn depth_one_labels_cover_brute_force() {
    for n in 1..=2 {
        let brute = brute_force_depth_one(n);
        let built: HashSet<[u8; 32]> = build_vn_dprime(n).unwrap().iter().map(|e| e.digest).collect();
        assert_eq!(brute, built, "n = {n}");
    }
}

#[test]
fn split_depth_matches_bfs_one_qubit() {
    let layers: Vec<DenseMatrix> = clifford_t_layers(1).unwrap().into_iter().map(|(_, m)| m).collect();
    let dist = bfs(&layers, 4);
    let within = |k: usize| -> Vec<&DenseMatrix> { dist.iter().filter(|(_, &d)| d <= k).map(|(m, _)| m).collect() };
    let sets: Vec<HashSet<&DenseMatrix>> = (0..=3).map(|k| within(k).into_iter().collect()).collect();
    for (u, &du) in &dist {
        for total in 0..=3usize {
            for d1 in 0..=total {
                let d2 = total - d1;
                let meets = sets[d1].iter().any(|w| sets[d2].contains(&w.dagger().mul(u)));
                assert_eq!(meets, du <= total, "depth {du}, split {d1}+{d2}");
            }
        }
        for c in 2..=3 {
            let found = nested_mitm_depth(u, &layers, 3, c).unwrap();
            assert_eq!(found.as_ref().map(Vec::len), (du <= 3).then_some(du));
            if let Some(idx) = found {
                let prod = idx.iter().fold(DenseMatrix::identity(1), |acc, &i| acc.mul(&layers[i]));
                assert_eq!(&prod, u);
            }
        }
    }
    assert!(dist.values().any(|&d| d == 4));
}
