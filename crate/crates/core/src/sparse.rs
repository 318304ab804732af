//! Row-sparse working copy of a channel for the search inner loop.
//!
//! Search nodes stay at small sde, where most channel entries are zero, so
//! the R(P) update and its probe run over the nonzeros of the two paired
//! rows only.

use crate::channel::{ChannelMatrix, RpCompact, MAX_SDE};
use crate::error::{Error, Result};

/// Rows are canonical (sorted columns, no zeros, minimal exponents), so
/// derived equality and hashing are exact.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseChannel {
    n: usize,
    dim: usize,
    row_k: Vec<u32>,
    /// Row r occupies start[r]..start[r + 1].
    start: Vec<u32>,
    cols: Vec<u16>,
    vals: Vec<[i64; 2]>,
}

fn scale(v: [i64; 2], e: u32) -> [i64; 2] {
    let [mut a, mut b] = v;
    if e % 2 == 1 {
        let t = 2 * b;
        b = a;
        a = t;
    }
    [a << (e / 2), b << (e / 2)]
}

/// m reduction steps (a, b) → (b, a/2) in closed form.
fn unscale(v: [i64; 2], m: u32) -> [i64; 2] {
    let h = m / 2;
    if m.is_multiple_of(2) {
        [v[0] >> h, v[1] >> h]
    } else {
        [v[1] >> h, v[0] >> (h + 1)]
    }
}

fn reduced_exponent(k: u32, or_a: i64, or_b: i64) -> u32 {
    if or_a == 0 && or_b == 0 {
        return 0;
    }
    let ta = if or_a == 0 { u32::MAX / 4 } else { or_a.trailing_zeros() };
    let tb = if or_b == 0 { u32::MAX / 4 } else { or_b.trailing_zeros() };
    k - k.min(2 * ta).min(2 * tb + 1)
}

/// Walks the union of two sorted sparse rows:
/// f(col, x·√2^ex, y·√2^ey).
#[inline]
fn merge(
    xc: &[u16],
    xv: &[[i64; 2]],
    ex: u32,
    yc: &[u16],
    yv: &[[i64; 2]],
    ey: u32,
    mut f: impl FnMut(u16, [i64; 2], [i64; 2]),
) {
    let (mut i, mut j) = (0, 0);
    while i < xc.len() || j < yc.len() {
        let ci = xc.get(i).copied().unwrap_or(u16::MAX);
        let cj = yc.get(j).copied().unwrap_or(u16::MAX);
        if ci < cj {
            f(ci, scale(xv[i], ex), [0, 0]);
            i += 1;
        } else if cj < ci {
            f(cj, [0, 0], scale(yv[j], ey));
            j += 1;
        } else {
            f(ci, scale(xv[i], ex), scale(yv[j], ey));
            i += 1;
            j += 1;
        }
    }
}

impl SparseChannel {
    pub fn from_dense(m: &ChannelMatrix) -> Self {
        let dim = m.dim();
        let mut out = Self {
            n: m.n(),
            dim,
            row_k: Vec::with_capacity(dim),
            start: Vec::with_capacity(dim + 1),
            cols: Vec::new(),
            vals: Vec::new(),
        };
        out.start.push(0);
        for r in 0..dim {
            let (k, row) = m.row(r);
            out.row_k.push(k);
            for (c, v) in row.iter().enumerate() {
                if *v != [0, 0] {
                    out.cols.push(c as u16);
                    out.vals.push(*v);
                }
            }
            out.start.push(out.cols.len() as u32);
        }
        out
    }

    pub fn to_dense(&self) -> ChannelMatrix {
        let d = self.dim;
        let mut num = vec![[0i64; 2]; d * d];
        for r in 0..d {
            let (cs, vs) = self.row(r);
            for (c, v) in cs.iter().zip(vs) {
                num[r * d + *c as usize] = *v;
            }
        }
        ChannelMatrix::from_raw_rows(self.n, self.row_k.clone(), num)
    }

    pub fn hamming_weight(&self) -> usize {
        self.cols.len()
    }

    pub fn sde(&self) -> u32 {
        self.row_k.iter().copied().max().unwrap_or(0)
    }

    /// Heap bytes held, for memory estimates.
    pub fn bytes(&self) -> usize {
        self.row_k.len() * 4 + self.start.len() * 4 + self.cols.len() * 2 + self.vals.len() * 16
    }

    #[inline]
    fn row(&self, r: usize) -> (&[u16], &[[i64; 2]]) {
        let (a, b) = (self.start[r] as usize, self.start[r + 1] as usize);
        (&self.cols[a..b], &self.vals[a..b])
    }

    /// (sde, Hamming weight) of ⟨R̃(P)⟩^{±1}·self without building it.
    pub fn probe(&self, unit: &RpCompact, inverse: bool) -> Result<(u32, usize)> {
        Ok(self.probe_within(unit, inverse, u32::MAX)?.expect("no bound"))
    }

    /// As [`probe`](Self::probe), or None as soon as the sde is known to
    /// exceed `bound`.
    pub fn probe_within(&self, unit: &RpCompact, inverse: bool, bound: u32) -> Result<Option<(u32, usize)>> {
        let cs = unit.coefficient(inverse);
        let mut sde = unit
            .untouched_rows()
            .iter()
            .map(|&r| self.row_k[r as usize])
            .max()
            .unwrap_or(0);
        if sde > bound {
            return Ok(None);
        }
        let mut ham = self.cols.len();
        for &(s, t, sneg) in unit.pairs() {
            let (s, t) = (s as usize, t as usize);
            let c = if sneg { -cs } else { cs };
            let (ks, kt) = (self.row_k[s], self.row_k[t]);
            let k = ks.max(kt);
            if k + 1 > MAX_SDE {
                return Err(Error::Overflow);
            }
            // The pair keeps exponent k - 1 at least.
            if k > bound.saturating_add(1) {
                return Ok(None);
            }
            let (xc, xv) = self.row(s);
            let (yc, yv) = self.row(t);
            ham -= xc.len() + yc.len();
            let (mut xa, mut xb, mut ya, mut yb) = (0i64, 0i64, 0i64, 0i64);
            let mut nz = 0usize;
            merge(xc, xv, k - ks, yc, yv, k - kt, |_, x, y| {
                let nx = [x[0] + c * y[0], x[1] + c * y[1]];
                let ny = [y[0] - c * x[0], y[1] - c * x[1]];
                xa |= nx[0];
                xb |= nx[1];
                ya |= ny[0];
                yb |= ny[1];
                nz += (nx != [0, 0]) as usize + (ny != [0, 0]) as usize;
            });
            ham += nz;
            sde = sde.max(reduced_exponent(k + 1, xa, xb)).max(reduced_exponent(k + 1, ya, yb));
            if sde > bound {
                return Ok(None);
            }
        }
        Ok(Some((sde, ham)))
    }

    /// Whether ⟨R̃(P)⟩^{±1}·self has sde 0, stopping at the first row that
    /// keeps a denominator.
    pub fn probe_clifford(&self, unit: &RpCompact, inverse: bool) -> Result<bool> {
        if unit.untouched_rows().iter().any(|&r| self.row_k[r as usize] != 0) {
            return Ok(false);
        }
        let cs = unit.coefficient(inverse);
        for &(s, t, sneg) in unit.pairs() {
            let (s, t) = (s as usize, t as usize);
            let c = if sneg { -cs } else { cs };
            let (ks, kt) = (self.row_k[s], self.row_k[t]);
            let k = ks.max(kt);
            if k + 1 > MAX_SDE {
                return Err(Error::Overflow);
            }
            // One step lowers sde by one at most.
            if k > 1 {
                return Ok(false);
            }
            let (xc, xv) = self.row(s);
            let (yc, yv) = self.row(t);
            let (mut xa, mut xb, mut ya, mut yb) = (0i64, 0i64, 0i64, 0i64);
            merge(xc, xv, k - ks, yc, yv, k - kt, |_, x, y| {
                xa |= x[0] + c * y[0];
                xb |= x[1] + c * y[1];
                ya |= y[0] - c * x[0];
                yb |= y[1] - c * x[1];
            });
            if reduced_exponent(k + 1, xa, xb) != 0 || reduced_exponent(k + 1, ya, yb) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Writes ⟨R̃(P)⟩^{±1}·self into `out`, reusing its buffers.
    pub fn apply_into(&self, unit: &RpCompact, inverse: bool, out: &mut SparseChannel) -> Result<()> {
        let cs = unit.coefficient(inverse);
        out.n = self.n;
        out.dim = self.dim;
        out.row_k.clone_from(&self.row_k);
        out.start.clear();
        out.cols.clear();
        out.vals.clear();
        let partner = unit.partner_table();
        let mut tmp: Vec<(u16, [i64; 2])> = Vec::new();
        out.start.push(0);
        for r in 0..self.dim {
            match partner[r] {
                None => {
                    let (c, v) = self.row(r);
                    out.cols.extend_from_slice(c);
                    out.vals.extend_from_slice(v);
                }
                Some((other, sneg, first)) => {
                    let (s, t) = if first { (r, other as usize) } else { (other as usize, r) };
                    let c = if sneg { -cs } else { cs };
                    let (ks, kt) = (self.row_k[s], self.row_k[t]);
                    let k = ks.max(kt);
                    if k + 1 > MAX_SDE {
                        return Err(Error::Overflow);
                    }
                    let (xc, xv) = self.row(s);
                    let (yc, yv) = self.row(t);
                    tmp.clear();
                    let (mut oa, mut ob) = (0i64, 0i64);
                    merge(xc, xv, k - ks, yc, yv, k - kt, |col, x, y| {
                        let nx = [x[0] + c * y[0], x[1] + c * y[1]];
                        let ny = [y[0] - c * x[0], y[1] - c * x[1]];
                        let v = if first { nx } else { ny };
                        if v != [0, 0] {
                            oa |= v[0];
                            ob |= v[1];
                            tmp.push((col, v));
                        }
                    });
                    let nk = reduced_exponent(k + 1, oa, ob);
                    let m = k + 1 - nk;
                    out.row_k[r] = nk;
                    for &(col, v) in &tmp {
                        out.cols.push(col);
                        out.vals.push(unscale(v, m));
                    }
                }
            }
            out.start.push(out.cols.len() as u32);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channel_of;
    use crate::circuit::{Circuit, Gate};

    #[test]
    fn matches_dense_updates() {
        let u = channel_of(
            &Circuit::new(2, vec![Gate::T(0), Gate::H(0), Gate::Cnot(0, 1), Gate::T(1), Gate::H(1), Gate::T(1)])
                .unwrap()
                .simulate(),
        )
        .unwrap();
        let sp = SparseChannel::from_dense(&u);
        assert_eq!(sp.to_dense(), u);
        let mut out = SparseChannel::default();
        for s in ["ZI", "XY", "-YY", "IX"] {
            for (dagger, inverse) in [(false, false), (true, false), (false, true)] {
                let unit = RpCompact::new(s.parse().unwrap(), dagger).unwrap();
                let mut dense = u.clone();
                dense.apply_rp_left(&unit, inverse).unwrap();
                sp.apply_into(&unit, inverse, &mut out).unwrap();
                assert_eq!(out.to_dense(), dense);
                assert_eq!(sp.probe(&unit, inverse).unwrap(), (dense.sde(), dense.hamming_weight()));
                assert_eq!(sp.probe_clifford(&unit, inverse).unwrap(), dense.sde() == 0);
                for bound in 0..4 {
                    let within = sp.probe_within(&unit, inverse, bound).unwrap();
                    assert_eq!(within.is_some(), dense.sde() <= bound);
                }
            }
        }
    }

    #[test]
    fn clifford_probe_finds_the_inverse_unit() {
        let u = channel_of(&Circuit::new(2, vec![Gate::H(1), Gate::T(0), Gate::Cnot(0, 1)]).unwrap().simulate()).unwrap();
        let sp = SparseChannel::from_dense(&u);
        let z0 = RpCompact::new("ZI".parse().unwrap(), false).unwrap();
        let z1 = RpCompact::new("IZ".parse().unwrap(), false).unwrap();
        assert!(!sp.probe_clifford(&z1, true).unwrap());
        let mut out = SparseChannel::default();
        sp.apply_into(&z0, true, &mut out).unwrap();
        assert_eq!(out.sde(), 0);
        assert!(sp.probe_clifford(&z0, true).unwrap());
    }
}
