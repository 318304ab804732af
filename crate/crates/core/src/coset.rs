//! Canonical labels for right cosets W·⟨C_n⟩ of the Clifford group.
//!
//! Right multiplication by a Clifford permutes the columns of a channel and
//! flips their signs, so a label is obtained by putting every column over the
//! common denominator, making its first nonzero entry positive, and sorting
//! the columns. Columns are sorted in descending lexicographic order of their
//! (a, b) numerator pairs read top to bottom, which leaves the identity
//! channel fixed.

use std::cmp::Ordering;

use sha2::{Digest, Sha256};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Digest algorithm recorded in database files.
pub const DIGEST_ALGORITHM: &str = "sha256";

pub type LabelDigest = [u8; 32];

fn column_negative(col: &[[i64; 2]]) -> bool {
    let first = col
        .iter()
        .find(|v| **v != [0, 0])
        .expect("orthogonal channels have no zero column");
    first[0] < 0 || (first[0] == 0 && first[1] < 0)
}

pub fn coset_label(w: &ChannelMatrix) -> ChannelMatrix {
    let d = w.dim();
    let (k, num) = w.common_denominator();
    let mut cols: Vec<Vec<[i64; 2]>> = (0..d)
        .map(|c| (0..d).map(|r| num[r * d + c]).collect())
        .collect();
    for col in &mut cols {
        if column_negative(col) {
            for v in col.iter_mut() {
                *v = [-v[0], -v[1]];
            }
        }
    }
    cols.sort_by(|x, y| y.cmp(x));
    debug_assert!(cols.windows(2).all(|p| p[0].cmp(&p[1]) != Ordering::Equal));
    let mut out = vec![[0i64; 2]; d * d];
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            out[r * d + c] = *v;
        }
    }
    ChannelMatrix::from_common(w.n(), k, out).expect("label keeps the exponent")
}

/// Digest of the canonical serialization of a label.
pub fn digest(label: &ChannelMatrix) -> LabelDigest {
    let (k, num) = label.common_denominator();
    let mut h = Sha256::new();
    h.update((label.n() as u32).to_le_bytes());
    h.update(k.to_le_bytes());
    for v in num {
        h.update(v[0].to_le_bytes());
        h.update(v[1].to_le_bytes());
    }
    h.finalize().into()
}

pub fn label_digest(w: &ChannelMatrix) -> LabelDigest {
    digest(&coset_label(w))
}

/// If W and V share a coset, returns the Clifford channel C = V⁻¹W.
pub fn same_coset(w: &ChannelMatrix, v: &ChannelMatrix) -> Result<Option<ChannelMatrix>> {
    if w.n() != v.n() {
        return Err(Error::QubitMismatch(w.n(), v.n()));
    }
    if coset_label(w) != coset_label(v) {
        return Ok(None);
    }
    let c = v.transpose().checked_mul(w)?;
    if !c.is_clifford() {
        return Err(Error::Verification("coset witness is not Clifford".into()));
    }
    Ok(Some(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;
    use crate::circuit::{Circuit, Gate};
    use crate::clifford::enumerate_cliffords;

    fn ch(gates: Vec<Gate>, n: usize) -> ChannelMatrix {
        channel_of(&Circuit::new(n, gates).unwrap().simulate()).unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let id = ChannelMatrix::identity(2);
        assert_eq!(coset_label(&id), id);
    }

    #[test]
    fn single_qubit_invariance() {
        let t = ch(vec![Gate::T(0)], 1);
        let want = coset_label(&t);
        for c in enumerate_cliffords(1).unwrap() {
            let w = t.mul(&ChannelMatrix::from_tableau(&c));
            assert_eq!(coset_label(&w), want);
        }
    }

    #[test]
    fn same_coset_examples() {
        let t = ch(vec![Gate::T(0)], 1);
        let th = ch(vec![Gate::H(0), Gate::T(0)], 1);
        let h = ch(vec![Gate::H(0)], 1);
        assert_eq!(same_coset(&th, &t).unwrap(), Some(h.clone()));
        assert_eq!(same_coset(&t, &t).unwrap(), Some(ChannelMatrix::identity(1)));
        assert_eq!(same_coset(&t, &h).unwrap(), None);
    }

    #[test]
    fn digest_separates() {
        let t = ch(vec![Gate::T(0)], 1);
        let ht = ch(vec![Gate::T(0), Gate::H(0)], 1);
        assert_ne!(label_digest(&t), label_digest(&ht));
        assert_eq!(label_digest(&t), label_digest(&ch(vec![Gate::H(0), Gate::T(0)], 1)));
    }
}
