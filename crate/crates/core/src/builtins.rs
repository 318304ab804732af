//! Named benchmark unitaries and the seeded random-circuit generator.
//!
//! Qubit 0 is the most significant bit of a basis index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::clifford::CliffordTableau;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::synth::tableau_to_circuit;

pub const BUILTIN_NAMES: [&str; 7] = ["toffoli", "fredkin", "peres", "qor", "ntoffoli", "cnot", "swap"];

fn bits3(j: usize) -> (bool, bool, bool) {
    (j & 4 != 0, j & 2 != 0, j & 1 != 0)
}

fn pack3(a: bool, b: bool, c: bool) -> usize {
    (a as usize) << 2 | (b as usize) << 1 | c as usize
}

fn perm3(f: impl Fn(bool, bool, bool) -> (bool, bool, bool)) -> DenseMatrix {
    let perm: Vec<usize> = (0..8)
        .map(|j| {
            let (a, b, c) = bits3(j);
            let (x, y, z) = f(a, b, c);
            pack3(x, y, z)
        })
        .collect();
    DenseMatrix::permutation(3, &perm).expect("reversible map")
}

/// Controls 0 and 1, target 2.
pub fn toffoli() -> DenseMatrix {
    perm3(|a, b, c| (a, b, c ^ (a && b)))
}

/// Control 0 swaps qubits 1 and 2.
pub fn fredkin() -> DenseMatrix {
    perm3(|a, b, c| if a { (a, c, b) } else { (a, b, c) })
}

/// Toffoli followed by CNOT(0, 1).
pub fn peres() -> DenseMatrix {
    perm3(|a, b, c| (a, b ^ a, c ^ (a && b)))
}

/// Target 2 receives a OR b.
pub fn quantum_or() -> DenseMatrix {
    perm3(|a, b, c| (a, b, c ^ (a || b)))
}

/// Toffoli with the first control negated.
pub fn negated_toffoli() -> DenseMatrix {
    perm3(|a, b, c| (a, b, c ^ (!a && b)))
}

pub fn cnot() -> DenseMatrix {
    DenseMatrix::permutation(2, &[0, 1, 3, 2]).unwrap()
}

pub fn swap() -> DenseMatrix {
    DenseMatrix::permutation(2, &[0, 2, 1, 3]).unwrap()
}

pub fn builtin(name: &str) -> Result<DenseMatrix> {
    Ok(match name {
        "toffoli" => toffoli(),
        "fredkin" => fredkin(),
        "peres" => peres(),
        "qor" => quantum_or(),
        "ntoffoli" => negated_toffoli(),
        "cnot" => cnot(),
        "swap" => swap(),
        other => return Err(Error::Invalid(format!("unknown builtin {other:?}"))),
    })
}

/// All 24 permutation matrices on two qubits, in lexicographic order.
pub fn two_qubit_permutations() -> Vec<DenseMatrix> {
    let mut out = Vec::with_capacity(24);
    let mut p = vec![0usize, 1, 2, 3];
    loop {
        out.push(DenseMatrix::permutation(2, &p).unwrap());
        // Next lexicographic permutation.
        let Some(i) = (0..3).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..4).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Random Clifford stages alternating with nonempty T/T† layers: exactly
/// `t_depth` T-stages, deterministic in `seed`.
pub fn random_circuit(n: usize, t_depth: usize, seed: u64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut c = tableau_to_circuit(&CliffordTableau::random(n, &mut rng));
        for _ in 0..t_depth {
            let mut layer: Vec<Gate> = Vec::new();
            while layer.is_empty() {
                for q in 0..n {
                    match rng.gen_range(0..3) {
                        1 => layer.push(Gate::T(q)),
                        2 => layer.push(Gate::Tdg(q)),
                        _ => {}
                    }
                }
            }
            for g in layer {
                c.push(g)?;
            }
            c.extend(&tableau_to_circuit(&CliffordTableau::random(n, &mut rng)))?;
        }
        // A Clifford stage can fail to connect two T-layers; redraw.
        if c.metrics().t_depth == t_depth {
            return Ok(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;

    #[test]
    fn permutations() {
        let ps = two_qubit_permutations();
        assert_eq!(ps.len(), 24);
        assert_eq!(ps[0], DenseMatrix::identity(2));
        for p in &ps {
            assert!(channel_of(p).unwrap().is_clifford());
        }
    }

    #[test]
    fn peres_is_toffoli_then_cnot() {
        let cx = Circuit::new(3, vec![Gate::Cnot(0, 1)]).unwrap().simulate();
        assert_eq!(cx.mul(&toffoli()), peres());
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_circuit(2, 3, 7).unwrap();
        assert_eq!(a, random_circuit(2, 3, 7).unwrap());
        assert_eq!(a.metrics().t_depth, 3);
        assert_eq!(random_circuit(2, 0, 1).unwrap().metrics().t_count, 0);
    }
}
