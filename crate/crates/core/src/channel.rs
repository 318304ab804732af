//! Channel representation ⟨U⟩_rs = Tr(P_r U P_s U†)/2^n over Z[1/√2].
//!
//! Rows and columns follow [`PauliIndex`] order. Each row is stored as
//! numerators (a, b) over a per-row exponent √2^k kept minimal, which makes
//! the sparse ⟨R(P)⟩ update touch only the rows it changes. The
//! representation is canonical, so derived equality and hashing are exact.

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordTableau;
use crate::dense::{pauli_trace, DenseMatrix};
use crate::error::{Error, Result};
use crate::pauli::{PauliIndex, SignedPauli};
use crate::ring::{DyadicRootTwo, GaussianRootTwo};

/// Denominator exponents above this are refused. Orthogonality bounds every
/// numerator by √2^k, so i64 arithmetic cannot overflow below it.
pub const MAX_SDE: u32 = 100;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ChannelMatrix {
    n: usize,
    dim: usize,
    row_k: Vec<u32>,
    num: Vec<[i64; 2]>,
}

fn scale_entry(v: [i64; 2], e: u32) -> [i64; 2] {
    let [mut a, mut b] = v;
    if e % 2 == 1 {
        let t = 2 * b;
        b = a;
        a = t;
    }
    let h = e / 2;
    [a << h, b << h]
}

/// Reduces a row to its minimal exponent.
fn reduce_row(row: &mut [[i64; 2]], k: &mut u32) {
    loop {
        if *k == 0 {
            return;
        }
        let mut acc = 0i64;
        let mut nz = false;
        for v in row.iter() {
            acc |= v[0];
            nz |= v[0] != 0 || v[1] != 0;
        }
        if !nz {
            *k = 0;
            return;
        }
        if acc & 1 == 1 {
            return;
        }
        for v in row.iter_mut() {
            *v = [v[1], v[0] / 2];
        }
        *k -= 1;
    }
}

impl ChannelMatrix {
    pub fn identity(n: usize) -> Self {
        let dim = 1usize << (2 * n);
        let mut num = vec![[0i64; 2]; dim * dim];
        for i in 0..dim {
            num[i * dim + i] = [1, 0];
        }
        Self {
            n,
            dim,
            row_k: vec![0; dim],
            num,
        }
    }

    /// Builds from row-major entries; the result is not checked for
    /// orthogonality (see [`ChannelMatrix::validate`]).
    pub fn from_entries(n: usize, entries: &[DyadicRootTwo]) -> Result<Self> {
        let dim = 1usize << (2 * n);
        if entries.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut row_k = vec![0u32; dim];
        let mut num = vec![[0i64; 2]; dim * dim];
        for r in 0..dim {
            let row = &entries[r * dim..(r + 1) * dim];
            let k = row.iter().map(|e| e.k()).max().unwrap_or(0);
            if k > MAX_SDE {
                return Err(Error::Overflow);
            }
            for (c, e) in row.iter().enumerate() {
                let (a, b) = e.numerator_at(k)?;
                num[r * dim + c] = [a, b];
            }
            row_k[r] = k;
        }
        Ok(Self { n, dim, row_k, num })
    }

    /// Builds from numerators over a common exponent.
    pub fn from_common(n: usize, k: u32, numerators: Vec<[i64; 2]>) -> Result<Self> {
        let dim = 1usize << (2 * n);
        if numerators.len() != dim * dim {
            return Err(Error::Invalid("numerator count mismatch".into()));
        }
        if k > MAX_SDE {
            return Err(Error::Overflow);
        }
        let mut m = Self {
            n,
            dim,
            row_k: vec![k; dim],
            num: numerators,
        };
        for r in 0..dim {
            let mut kr = m.row_k[r];
            reduce_row(&mut m.num[r * dim..(r + 1) * dim], &mut kr);
            m.row_k[r] = kr;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row exponent and numerators.
    pub fn row(&self, r: usize) -> (u32, &[[i64; 2]]) {
        (self.row_k[r], &self.num[r * self.dim..(r + 1) * self.dim])
    }

    /// Trusted constructor for rows already at their minimal exponents.
    pub(crate) fn from_raw_rows(n: usize, row_k: Vec<u32>, num: Vec<[i64; 2]>) -> Self {
        let dim = 1usize << (2 * n);
        debug_assert_eq!(num.len(), dim * dim);
        Self { n, dim, row_k, num }
    }

    pub fn entry(&self, r: usize, c: usize) -> DyadicRootTwo {
        let [a, b] = self.num[r * self.dim + c];
        DyadicRootTwo::new(a, b, self.row_k[r])
    }

    pub fn entries(&self) -> Vec<DyadicRootTwo> {
        (0..self.dim * self.dim)
            .map(|i| self.entry(i / self.dim, i % self.dim))
            .collect()
    }

    pub fn sde(&self) -> u32 {
        self.row_k.iter().copied().max().unwrap_or(0)
    }

    pub fn hamming_weight(&self) -> usize {
        self.num.iter().filter(|v| v[0] != 0 || v[1] != 0).count()
    }

    /// All numerators over the common exponent √2^sde.
    pub fn common_denominator(&self) -> (u32, Vec<[i64; 2]>) {
        let k = self.sde();
        let mut out = self.num.clone();
        for r in 0..self.dim {
            let e = k - self.row_k[r];
            if e > 0 {
                for v in &mut out[r * self.dim..(r + 1) * self.dim] {
                    *v = scale_entry(*v, e);
                }
            }
        }
        (k, out)
    }

    pub fn transpose(&self) -> Self {
        let (k, cd) = self.common_denominator();
        let d = self.dim;
        let mut t = vec![[0i64; 2]; d * d];
        for r in 0..d {
            for c in 0..d {
                t[c * d + r] = cd[r * d + c];
            }
        }
        Self::from_common(self.n, k, t).expect("transpose keeps exponent")
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::QubitMismatch(self.n, o.n));
        }
        let d = self.dim;
        let (kb, bn) = o.common_denominator();
        let mut row_k = vec![0u32; d];
        let mut num = vec![[0i64; 2]; d * d];
        let mut acc = vec![[0i128; 2]; d];
        for r in 0..d {
            acc.iter_mut().for_each(|v| *v = [0, 0]);
            for t in 0..d {
                let [a1, b1] = self.num[r * d + t];
                if a1 == 0 && b1 == 0 {
                    continue;
                }
                let (a1, b1) = (a1 as i128, b1 as i128);
                for (c, slot) in acc.iter_mut().enumerate() {
                    let [a2, b2] = bn[t * d + c];
                    if a2 == 0 && b2 == 0 {
                        continue;
                    }
                    let (a2, b2) = (a2 as i128, b2 as i128);
                    slot[0] += a1 * a2 + 2 * b1 * b2;
                    slot[1] += a1 * b2 + a2 * b1;
                }
            }
            let mut k = self.row_k[r] + kb;
            // Reduce in i128 first, then narrow.
            loop {
                if k == 0 {
                    break;
                }
                let all_even = acc.iter().all(|v| v[0] % 2 == 0);
                let nz = acc.iter().any(|v| v[0] != 0 || v[1] != 0);
                if !nz {
                    k = 0;
                    break;
                }
                if !all_even {
                    break;
                }
                for v in acc.iter_mut() {
                    *v = [v[1], v[0] / 2];
                }
                k -= 1;
            }
            if k > MAX_SDE {
                return Err(Error::Overflow);
            }
            for c in 0..d {
                num[r * d + c] = [
                    i64::try_from(acc[c][0]).map_err(|_| Error::Overflow)?,
                    i64::try_from(acc[c][1]).map_err(|_| Error::Overflow)?,
                ];
            }
            row_k[r] = k;
        }
        Ok(Self {
            n: self.n,
            dim: d,
            row_k,
            num,
        })
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("channel product overflow")
    }

    /// Exact orthogonality and identity-fixing check.
    pub fn validate(&self) -> Result<()> {
        if self.entry(0, 0) != DyadicRootTwo::ONE {
            return Err(Error::NotOrthogonal);
        }
        if self.transpose().checked_mul(self)? != Self::identity(self.n) {
            return Err(Error::NotOrthogonal);
        }
        Ok(())
    }

    pub fn is_clifford(&self) -> bool {
        if self.row_k.iter().any(|&k| k != 0) {
            return false;
        }
        let d = self.dim;
        let mut col_seen = vec![false; d];
        for r in 0..d {
            let mut count = 0;
            for c in 0..d {
                let v = self.num[r * d + c];
                if v == [0, 0] {
                    continue;
                }
                if v[1] != 0 || v[0].abs() != 1 || col_seen[c] {
                    return false;
                }
                col_seen[c] = true;
                count += 1;
            }
            if count != 1 {
                return false;
            }
        }
        true
    }

    /// Reads the Clifford tableau off a signed-permutation channel.
    pub fn to_tableau(&self) -> Result<CliffordTableau> {
        if !self.is_clifford() {
            return Err(Error::NotClifford);
        }
        let n = self.n;
        let image = |p: SignedPauli| -> SignedPauli {
            let c = p.index();
            let r = (0..self.dim)
                .find(|&r| self.num[r * self.dim + c] != [0, 0])
                .expect("column has one nonzero");
            let neg = self.num[r * self.dim + c][0] < 0;
            SignedPauli::from_index(n, r).with_sign(neg)
        };
        CliffordTableau::from_images(
            (0..n).map(|q| image(SignedPauli::x_q(n, q))).collect(),
            (0..n).map(|q| image(SignedPauli::z_q(n, q))).collect(),
        )
    }

    /// Channel of a Clifford given by its tableau.
    pub fn from_tableau(t: &CliffordTableau) -> Self {
        let n = t.n();
        let dim = 1usize << (2 * n);
        let mut num = vec![[0i64; 2]; dim * dim];
        for s in 0..dim {
            let img = t.conjugate(&SignedPauli::from_index(n, s));
            let r = img.index();
            num[r * dim + s] = [if img.is_negative() { -1 } else { 1 }, 0];
        }
        Self {
            n,
            dim,
            row_k: vec![0; dim],
            num,
        }
    }

    /// Channel of I_m ⊗ A with the m new qubits leading.
    pub fn tensor_with_identity(&self, m: usize) -> Self {
        let n = self.n + m;
        let dim = 1usize << (2 * n);
        let d = self.dim;
        let mut num = vec![[0i64; 2]; dim * dim];
        let mut row_k = vec![0u32; dim];
        for anc in 0..(1usize << (2 * m)) {
            for r in 0..d {
                let rr = anc * d + r;
                row_k[rr] = self.row_k[r];
                for c in 0..d {
                    num[rr * dim + anc * d + c] = self.num[r * d + c];
                }
            }
        }
        Self {
            n,
            dim,
            row_k,
            num,
        }
    }

    /// In-place left multiplication by ⟨R̃(P)⟩ (or its inverse). Returns the
    /// change in Hamming weight.
    pub fn apply_rp_left(&mut self, unit: &RpCompact, inverse: bool) -> Result<isize> {
        if unit.n != self.n {
            return Err(Error::QubitMismatch(self.n, unit.n));
        }
        let d = self.dim;
        let dag = unit.eff_dagger ^ inverse;
        let mut dham = 0isize;
        for &(s, t, sneg) in &unit.pairs {
            let (s, t) = (s as usize, t as usize);
            let sig: i64 = if sneg { -1 } else { 1 };
            let cs = if dag { sig } else { -sig };
            let (ks, kt) = (self.row_k[s], self.row_k[t]);
            let k = ks.max(kt);
            if k + 1 > MAX_SDE {
                return Err(Error::Overflow);
            }
            let (lo, hi) = if s < t { (s, t) } else { (t, s) };
            let (head, tail) = self.num.split_at_mut(hi * d);
            let (rs, rt) = if s < t {
                (&mut head[lo * d..(lo + 1) * d], &mut tail[..d])
            } else {
                (&mut tail[..d], &mut head[lo * d..(lo + 1) * d])
            };
            let (es, et) = (k - ks, k - kt);
            for (x, y) in rs.iter_mut().zip(rt.iter_mut()) {
                let before = (*x != [0, 0]) as isize + (*y != [0, 0]) as isize;
                let xv = if es > 0 { scale_entry(*x, es) } else { *x };
                let yv = if et > 0 { scale_entry(*y, et) } else { *y };
                *x = [xv[0] + cs * yv[0], xv[1] + cs * yv[1]];
                *y = [yv[0] - cs * xv[0], yv[1] - cs * xv[1]];
                dham += (*x != [0, 0]) as isize + (*y != [0, 0]) as isize - before;
            }
            let mut k1 = k + 1;
            reduce_row(rs, &mut k1);
            self.row_k[s] = k1;
            let mut k2 = k + 1;
            reduce_row(rt, &mut k2);
            self.row_k[t] = k2;
        }
        Ok(dham)
    }

    pub fn to_json(&self) -> ChannelJson {
        let (k, cd) = self.common_denominator();
        ChannelJson {
            n: self.n,
            sde: k,
            num: cd
                .chunks(self.dim)
                .map(|r| r.to_vec())
                .collect(),
        }
    }

    pub fn from_json(j: &ChannelJson) -> Result<Self> {
        let dim = 1usize << (2 * j.n);
        if j.num.len() != dim || j.num.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse("channel numerator shape mismatch".into()));
        }
        let m = Self::from_common(j.n, j.sde, j.num.iter().flatten().copied().collect())?;
        m.validate()?;
        Ok(m)
    }

    /// Overwrites `self` with `o`, reusing the allocation.
    pub fn copy_from(&mut self, o: &Self) {
        self.n = o.n;
        self.dim = o.dim;
        self.row_k.clone_from(&o.row_k);
        self.num.clone_from(&o.num);
    }
}

/// JSON form: numerators over the common denominator √2^sde.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChannelJson {
    pub n: usize,
    pub sde: u32,
    pub num: Vec<Vec<[i64; 2]>>,
}

/// ⟨R(P)⟩ or ⟨R†(P)⟩ as the pairing of anticommuting rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RpCompact {
    n: usize,
    pauli: SignedPauli,
    dagger: bool,
    /// Dagger flag after folding the sign of `pauli` (R(−P) ≅ R†(P)).
    eff_dagger: bool,
    /// (s, t, σ<0) with s < t and −i·P·P_s = σ·P_t; 2^{2n−2} entries.
    pairs: Vec<(u32, u32, bool)>,
    /// Rows of Paulis commuting with P, which the update leaves alone.
    untouched: Vec<u32>,
    /// Per row: (partner row, σ<0, row is the first of its pair).
    partner: Vec<Option<(u32, bool, bool)>>,
}

impl RpCompact {
    pub fn new(pauli: SignedPauli, dagger: bool) -> Result<Self> {
        if pauli.is_identity() {
            return Err(Error::IdentityPauli);
        }
        let n = pauli.n();
        let dim = 1usize << (2 * n);
        let p = pauli.unsigned();
        let mut pairs = Vec::with_capacity(dim / 4);
        let mut untouched = Vec::with_capacity(dim / 2);
        for s in 0..dim {
            let ps = SignedPauli::from_index(n, s);
            if !p.anticommutes(&ps) {
                untouched.push(s as u32);
                continue;
            }
            let img = p.minus_i_product(&ps);
            let t = img.index();
            if s < t {
                pairs.push((s as u32, t as u32, img.is_negative()));
            }
        }
        debug_assert_eq!(pairs.len(), dim / 4);
        let mut partner = vec![None; dim];
        for &(s, t, neg) in &pairs {
            partner[s as usize] = Some((t, neg, true));
            partner[t as usize] = Some((s, neg, false));
        }
        Ok(Self {
            n,
            pauli,
            dagger,
            eff_dagger: dagger ^ pauli.is_negative(),
            pairs,
            untouched,
            partner,
        })
    }

    /// Coefficient c with row_s' = row_s + σc·row_t, row_t' = row_t − σc·row_s
    /// (before rescaling by 1/√2).
    pub fn coefficient(&self, inverse: bool) -> i64 {
        if self.eff_dagger ^ inverse {
            1
        } else {
            -1
        }
    }

    pub fn untouched_rows(&self) -> &[u32] {
        &self.untouched
    }

    pub fn partner_table(&self) -> &[Option<(u32, bool, bool)>] {
        &self.partner
    }

    pub fn pauli(&self) -> SignedPauli {
        self.pauli
    }

    pub fn dagger(&self) -> bool {
        self.dagger
    }

    pub fn pairs(&self) -> &[(u32, u32, bool)] {
        &self.pairs
    }
}

pub fn rp_channel(unit: &RpCompact) -> ChannelMatrix {
    let mut m = ChannelMatrix::identity(unit.n);
    m.apply_rp_left(unit, false).expect("sde 1");
    m
}

/// Dense R(P) = ½(1+ω)I + ½(1−ω)P, or its adjoint.
pub fn dense_rp(p: &SignedPauli, dagger: bool) -> DenseMatrix {
    let half = GaussianRootTwo::new(1, 0, 0, 0, 2);
    let w = if dagger {
        GaussianRootTwo::OMEGA.conj()
    } else {
        GaussianRootTwo::OMEGA
    };
    let alpha = half * (GaussianRootTwo::ONE + w);
    let beta = half * (GaussianRootTwo::ONE - w);
    let n = p.n();
    let id = DenseMatrix::identity(n).scale(alpha);
    let pm = DenseMatrix::pauli(p).scale(beta);
    let mut out = DenseMatrix::zeros(n);
    let d = out.dim();
    for r in 0..d {
        for c in 0..d {
            out.set(r, c, id.get(r, c) + pm.get(r, c));
        }
    }
    out
}

/// ⟨U⟩ of a dense unitary, computed from the trace formula.
pub fn channel_of(u: &DenseMatrix) -> Result<ChannelMatrix> {
    if !u.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let n = u.n();
    let dim = 1usize << (2 * n);
    let ud = u.dagger();
    let paulis: Vec<SignedPauli> = (0..dim).map(|i| SignedPauli::from_index(n, i)).collect();
    let mut entries = vec![DyadicRootTwo::ZERO; dim * dim];
    for s in 0..dim {
        let v = u.checked_mul(&DenseMatrix::pauli(&paulis[s]))?.checked_mul(&ud)?;
        for r in 0..dim {
            let tr = pauli_trace(&paulis[r], &v);
            let re = tr.to_real().ok_or(Error::NotReal)?;
            entries[r * dim + s] = DyadicRootTwo::new(re.a(), re.b(), re.k() + 2 * n as u32);
        }
    }
    ChannelMatrix::from_entries(n, &entries)
}

pub fn channel_mul(a: &ChannelMatrix, b: &ChannelMatrix) -> Result<ChannelMatrix> {
    a.checked_mul(b)
}

pub fn channel_inverse(a: &ChannelMatrix) -> ChannelMatrix {
    a.transpose()
}

pub fn hamming_weight(a: &ChannelMatrix) -> usize {
    a.hamming_weight()
}

pub fn is_clifford_channel(a: &ChannelMatrix) -> bool {
    a.is_clifford()
}

pub fn channel_to_tableau(a: &ChannelMatrix) -> Result<CliffordTableau> {
    a.to_tableau()
}

pub fn tensor_with_identity(a: &ChannelMatrix, m: usize) -> ChannelMatrix {
    a.tensor_with_identity(m)
}

/// Index helper for callers that address entries by Pauli.
pub fn entry_by_pauli(a: &ChannelMatrix, r: &SignedPauli, c: &SignedPauli) -> DyadicRootTwo {
    let (ri, ci): (PauliIndex, PauliIndex) = (r.index(), c.index());
    a.entry(ri, ci)
}
