//! Circuit emission for tableaux, units, blocks and decompositions, and the
//! exact-synthesizability check.

use crate::channel::{channel_of, ChannelMatrix};
use crate::circuit::{Circuit, Gate};
use crate::clifford::{find_clifford_mapping, CliffordTableau, Row};
use crate::decomposition::Decomposition;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::genset::{Block, RpUnit};
use crate::pauli::{Letter, SignedPauli};
use crate::ring::GaussianRootTwo;

/// Circuit over {H, S, S†, CNOT, X, Y, Z} implementing the tableau.
///
/// Qubit by qubit, gates are applied on the left until the images of X_(i)
/// and Z_(i) are X_(i) and Z_(i); the circuit is the inverse of that
/// reduction.
pub fn tableau_to_circuit(c: &CliffordTableau) -> Circuit {
    let n = c.n();
    let mut t = c.clone();
    let mut gates: Vec<Gate> = Vec::new();
    let mut apply = |t: &mut CliffordTableau, g: Gate| {
        t.apply_gate(&g);
        gates.push(g);
    };
    for i in 0..n {
        let x = t.img_x(i);
        for j in i..n {
            match x.letter(j) {
                Letter::Z => apply(&mut t, Gate::H(j)),
                Letter::Y => apply(&mut t, Gate::Sdg(j)),
                _ => {}
            }
        }
        let supp = t.img_x(i).support();
        if (supp >> i) & 1 == 0 {
            let j = (supp >> i).trailing_zeros() as usize + i;
            apply(&mut t, Gate::Cnot(j, i));
        }
        let supp = t.img_x(i).support();
        for j in i + 1..n {
            if (supp >> j) & 1 == 1 {
                apply(&mut t, Gate::Cnot(i, j));
            }
        }
        let z = t.img_z(i);
        for j in i + 1..n {
            match z.letter(j) {
                Letter::X => apply(&mut t, Gate::H(j)),
                Letter::Y => {
                    apply(&mut t, Gate::Sdg(j));
                    apply(&mut t, Gate::H(j));
                }
                _ => {}
            }
        }
        let supp = t.img_z(i).support();
        for j in i + 1..n {
            if (supp >> j) & 1 == 1 {
                apply(&mut t, Gate::Cnot(j, i));
            }
        }
        if t.img_z(i).letter(i) == Letter::Y {
            // H·S·H fixes X and maps Y to Z.
            apply(&mut t, Gate::H(i));
            apply(&mut t, Gate::S(i));
            apply(&mut t, Gate::H(i));
        }
        match (t.img_x(i).is_negative(), t.img_z(i).is_negative()) {
            (true, true) => apply(&mut t, Gate::Y(i)),
            (true, false) => apply(&mut t, Gate::Z(i)),
            (false, true) => apply(&mut t, Gate::X(i)),
            (false, false) => {}
        }
        debug_assert_eq!(t.img_x(i), SignedPauli::x_q(n, i));
        debug_assert_eq!(t.img_z(i), SignedPauli::z_q(n, i));
    }
    debug_assert!(t.is_identity());
    Circuit::new(n, gates.iter().rev().map(|g| g.inverse()).collect()).expect("gates in range")
}

/// C† · T̄_(q) · C with C Z_(q) C† = P, q the lowest support qubit of P.
pub fn rp_to_circuit(u: &RpUnit) -> Circuit {
    let p = u.pauli();
    let n = p.n();
    let q = p.support().trailing_zeros() as usize;
    let (_, c) = find_clifford_mapping(&SignedPauli::z_q(n, q), &p).expect("non-identity Pauli");
    let mut out = c.inverse();
    out.push(if u.dagger() { Gate::Tdg(q) } else { Gate::T(q) }).unwrap();
    out.extend(&c).unwrap();
    out
}

/// One T-stage for the whole block: A† · (T̄ on qubits q_i) · A, where
/// A Z_(q_i) A† = P_i and q_i is the lowest free qubit in the support of P_i.
pub fn block_to_circuit(b: &Block) -> Result<Circuit> {
    let n = b.n();
    let mut used = 0u32;
    let mut slots = Vec::with_capacity(b.t_count());
    for u in b.units() {
        let supp = u.pauli().support();
        let q = if supp & !used != 0 {
            (supp & !used).trailing_zeros()
        } else {
            (!used).trailing_zeros()
        } as usize;
        used |= 1 << q;
        slots.push(q);
    }
    let fixed: Vec<(Row, SignedPauli)> = b
        .units()
        .iter()
        .zip(&slots)
        .map(|(u, &q)| (Row::Z(q), u.pauli()))
        .collect();
    let a = CliffordTableau::complete(n, &fixed).map_err(|_| Error::InvalidBlock)?;
    let ac = tableau_to_circuit(&a);
    let mut out = ac.inverse();
    let mut layer: Vec<(usize, bool)> = slots
        .iter()
        .zip(b.units())
        .map(|(&q, u)| (q, u.dagger()))
        .collect();
    layer.sort();
    for (q, dagger) in layer {
        out.push(if dagger { Gate::Tdg(q) } else { Gate::T(q) })?;
    }
    out.extend(&ac)?;
    Ok(out)
}

/// Gates in time order: C_0, then B_d, ..., B_1.
pub fn decomposition_to_circuit(dec: &Decomposition) -> Result<Circuit> {
    let mut out = tableau_to_circuit(&dec.trailing);
    for b in dec.blocks.iter().rev() {
        out.extend(&block_to_circuit(b)?)?;
    }
    Ok(out)
}

/// Verifies an emitted circuit against a decomposition and its target.
pub fn verify_circuit(c: &Circuit, target: &ChannelMatrix, dense: Option<&DenseMatrix>) -> Result<()> {
    let u = c.simulate();
    if let Some(d) = dense {
        if !u.equal_up_to_phase(d) {
            return Err(Error::Verification("circuit unitary differs from input".into()));
        }
    }
    if &channel_of(&u)? != target {
        return Err(Error::Verification("circuit channel differs from target".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Synthesizability {
    NoAncilla,
    OneAncilla,
    Reject,
}

/// Exact-synthesis check: entries in the ring are guaranteed by the type;
/// the determinant decides whether an ancilla is required.
pub fn validate_exact_synthesizable(u: &DenseMatrix) -> Result<Synthesizability> {
    if !u.is_unitary() {
        return Ok(Synthesizability::Reject);
    }
    let n = u.n();
    let det = u.determinant()?;
    // e^{iπNr/8} = ω^{Nr/2} with N = 2^n.
    let big_n = 1i64 << n;
    let ok = (0..8).any(|r| det == GaussianRootTwo::omega_pow((big_n * r / 2) % 8));
    Ok(if ok {
        Synthesizability::NoAncilla
    } else {
        Synthesizability::OneAncilla
    })
}

/// Channel of I_m ⊗ U with the ancillas as the leading qubits.
pub fn handle_ancilla(u: &DenseMatrix, m: usize) -> Result<ChannelMatrix> {
    Ok(channel_of(u)?.tensor_with_identity(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::dense_rp;
    use crate::clifford::enumerate_cliffords;
    use crate::genset::block_channel;

    fn unit(s: &str, dagger: bool) -> RpUnit {
        RpUnit::new(s.parse().unwrap(), dagger).unwrap()
    }

    #[test]
    fn tableau_round_trip_exhaustive() {
        for n in 1..=2 {
            for c in enumerate_cliffords(n).unwrap() {
                let circ = tableau_to_circuit(&c);
                assert_eq!(CliffordTableau::from_circuit(&circ).unwrap(), c);
            }
        }
        assert!(tableau_to_circuit(&CliffordTableau::identity(3)).is_empty());
    }

    #[test]
    fn unit_circuits() {
        let c = rp_to_circuit(&unit("Z", false));
        assert_eq!(c.gates(), &[Gate::T(0)]);
        let c = rp_to_circuit(&unit("X", false));
        assert_eq!(c.gates(), &[Gate::H(0), Gate::T(0), Gate::H(0)]);
        for s in ["ZZ", "XY", "YI", "IX"] {
            for dagger in [false, true] {
                let u = unit(s, dagger);
                let sim = rp_to_circuit(&u).simulate();
                assert!(sim.equal_up_to_phase(&dense_rp(&u.pauli(), dagger)), "{s} {dagger}");
            }
        }
    }

    #[test]
    fn block_circuits() {
        let b = Block::new(vec![unit("ZI", false), unit("IZ", true)]).unwrap();
        let c = block_to_circuit(&b).unwrap();
        assert_eq!(c.gates(), &[Gate::T(0), Gate::Tdg(1)]);
        let b = Block::new(vec![unit("XX", false), unit("ZZ", true)]).unwrap();
        let c = block_to_circuit(&b).unwrap();
        assert_eq!(c.metrics().t_depth, 1);
        assert_eq!(channel_of(&c.simulate()).unwrap(), block_channel(&b));
    }

    #[test]
    fn validator_examples() {
        let h = Circuit::new(1, vec![Gate::H(0)]).unwrap().simulate();
        assert_eq!(validate_exact_synthesizable(&h).unwrap(), Synthesizability::NoAncilla);
        let t = Circuit::new(2, vec![Gate::T(0)]).unwrap().simulate();
        assert_eq!(validate_exact_synthesizable(&t).unwrap(), Synthesizability::NoAncilla);
        let o = GaussianRootTwo::ONE;
        let ct = DenseMatrix::diagonal(2, &[o, o, o, GaussianRootTwo::OMEGA]).unwrap();
        assert_eq!(validate_exact_synthesizable(&ct).unwrap(), Synthesizability::OneAncilla);
    }
}
