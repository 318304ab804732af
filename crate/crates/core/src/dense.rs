//! Dense 2^n × 2^n matrices over Z[i,1/√2].
//!
//! Basis index bit (n−1−q) belongs to qubit q, so qubit 0 is the most
//! significant tensor factor.

use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::pauli::SignedPauli;
use crate::ring::GaussianRootTwo as G;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenseMatrix {
    n: usize,
    dim: usize,
    data: Vec<G>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            n,
            dim,
            data: vec![G::ZERO; dim * dim],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..m.dim {
            m.data[i * m.dim + i] = G::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<G>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Invalid(format!("matrix dimension {dim} is not a power of two")));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        Ok(Self {
            n: dim.trailing_zeros() as usize,
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// U|j⟩ = |perm[j]⟩.
    pub fn permutation(n: usize, perm: &[usize]) -> Result<Self> {
        let mut m = Self::zeros(n);
        if perm.len() != m.dim {
            return Err(Error::Invalid("permutation length mismatch".into()));
        }
        let mut seen = vec![false; m.dim];
        for (j, &i) in perm.iter().enumerate() {
            if i >= m.dim || seen[i] {
                return Err(Error::Invalid("not a permutation".into()));
            }
            seen[i] = true;
            m.data[i * m.dim + j] = G::ONE;
        }
        Ok(m)
    }

    pub fn diagonal(n: usize, diag: &[G]) -> Result<Self> {
        let mut m = Self::zeros(n);
        if diag.len() != m.dim {
            return Err(Error::Invalid("diagonal length mismatch".into()));
        }
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        Ok(m)
    }

    /// Dense matrix of a signed Pauli.
    pub fn pauli(p: &SignedPauli) -> Self {
        let n = p.n();
        let mut m = Self::zeros(n);
        let (xc, zc) = comp_masks(p);
        let base = G::omega_pow(2 * ((p.x_bits() & p.z_bits()).count_ones() as i64 + 2 * p.is_negative() as i64));
        for j in 0..m.dim {
            let v = if (zc & j).count_ones() % 2 == 1 { -base } else { base };
            m.data[(j ^ xc) * m.dim + j] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> G {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: G) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[G] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<G>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::QubitMismatch(self.n, o.n));
        }
        let d = self.dim;
        let mut out = Self::zeros(self.n);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = o.data[k * d + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cell = &mut out.data[i * d + j];
                    *cell = cell.checked_add(a.checked_mul(b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("ring overflow")
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(self.n);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: G) -> Self {
        Self {
            n: self.n,
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// self ⊗ o.
    pub fn kron(&self, o: &Self) -> Self {
        let n = self.n + o.n;
        let mut out = Self::zeros(n);
        let d = out.dim;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.dim {
                    for l in 0..o.dim {
                        out.data[(i * o.dim + k) * d + (j * o.dim + l)] = a * o.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn is_unitary(&self) -> bool {
        match self.dagger().checked_mul(self) {
            Ok(p) => p == Self::identity(self.n),
            Err(_) => false,
        }
    }

    /// Left-multiplies by a gate: M ← G M.
    pub fn apply_gate(&mut self, g: &Gate) {
        let d = self.dim;
        let bit = |q: usize| 1usize << (self.n - 1 - q);
        match *g {
            Gate::Cnot(c, t) => {
                let (cb, tb) = (bit(c), bit(t));
                for j in 0..d {
                    if j & cb != 0 && j & tb == 0 {
                        let (r0, r1) = (j * d, (j | tb) * d);
                        for k in 0..d {
                            self.data.swap(r0 + k, r1 + k);
                        }
                    }
                }
            }
            _ => {
                let m = g.matrix_1q().expect("single-qubit gate");
                let qb = bit(g.qubits()[0]);
                for j in 0..d {
                    if j & qb != 0 {
                        continue;
                    }
                    let (r0, r1) = (j * d, (j | qb) * d);
                    for k in 0..d {
                        let (a, b) = (self.data[r0 + k], self.data[r1 + k]);
                        if a.is_zero() && b.is_zero() {
                            continue;
                        }
                        self.data[r0 + k] = m[0][0] * a + m[0][1] * b;
                        self.data[r1 + k] = m[1][0] * a + m[1][1] * b;
                    }
                }
            }
        }
    }

    /// Exact determinant by expansion over column subsets (n ≤ 4).
    pub fn determinant(&self) -> Result<G> {
        if self.n > 4 {
            return Err(Error::Invalid("determinant supported for n ≤ 4".into()));
        }
        let d = self.dim;
        let mut f = vec![G::ZERO; 1usize << d];
        f[0] = G::ONE;
        for s in 1usize..(1 << d) {
            let row = s.count_ones() as usize - 1;
            let mut acc = G::ZERO;
            let mut pos = 0usize;
            for c in 0..d {
                if s & (1 << c) == 0 {
                    continue;
                }
                let a = self.data[row * d + c];
                let sub = f[s & !(1 << c)];
                if !a.is_zero() && !sub.is_zero() {
                    let term = a.checked_mul(sub)?;
                    acc = if (row + pos).is_multiple_of(2) {
                        acc.checked_add(term)?
                    } else {
                        acc.checked_sub(term)?
                    };
                }
                pos += 1;
            }
            f[s] = acc;
        }
        Ok(f[(1 << d) - 1])
    }

    /// Equality up to a phase ω^k, k ∈ [8], fixed by the first nonzero entry.
    pub fn equal_up_to_phase(&self, o: &Self) -> bool {
        if self.n != o.n {
            return false;
        }
        let Some(j) = self.data.iter().position(|x| !x.is_zero()) else {
            return o.data.iter().all(|x| x.is_zero());
        };
        let (u, v) = (self.data[j], o.data[j]);
        for k in 0..8 {
            let ph = G::omega_pow(k);
            if u * ph == v {
                return self.data.iter().zip(&o.data).all(|(&a, &b)| a * ph == b);
            }
        }
        false
    }
}

/// x and z masks in computational-basis bit order.
fn comp_masks(p: &SignedPauli) -> (usize, usize) {
    let n = p.n();
    let mut xc = 0usize;
    let mut zc = 0usize;
    for q in 0..n {
        let b = 1usize << (n - 1 - q);
        if (p.x_bits() >> q) & 1 == 1 {
            xc |= b;
        }
        if (p.z_bits() >> q) & 1 == 1 {
            zc |= b;
        }
    }
    (xc, zc)
}

/// Trace of P·M for a signed Pauli P, in O(2^n).
pub fn pauli_trace(p: &SignedPauli, m: &DenseMatrix) -> G {
    let (xc, zc) = comp_masks(p);
    let base = G::omega_pow(2 * ((p.x_bits() & p.z_bits()).count_ones() as i64 + 2 * p.is_negative() as i64));
    let mut acc = G::ZERO;
    // (P M)_{ii} = Σ_j P_{ij} M_{ji}; P_{i,j} ≠ 0 only for i = j ^ xc.
    for j in 0..m.dim {
        let i = j ^ xc;
        let v = m.get(j, i);
        if v.is_zero() {
            continue;
        }
        let pv = if (zc & j).count_ones() % 2 == 1 { -base } else { base };
        acc = acc + pv * v;
    }
    acc
}

pub fn unitary_equal_up_to_phase(u: &DenseMatrix, v: &DenseMatrix) -> bool {
    u.equal_up_to_phase(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_matrices() {
        let y = DenseMatrix::pauli(&"Y".parse().unwrap());
        assert_eq!(y.get(0, 1), -G::I);
        assert_eq!(y.get(1, 0), G::I);
        let z = DenseMatrix::pauli(&"-Z".parse().unwrap());
        assert_eq!(z.get(0, 0), -G::ONE);
        assert_eq!(z.get(1, 1), G::ONE);
        let xi = DenseMatrix::pauli(&"XI".parse().unwrap());
        let x = DenseMatrix::pauli(&"X".parse().unwrap());
        assert_eq!(xi, x.kron(&DenseMatrix::identity(1)));
    }

    #[test]
    fn trace_matches_dense() {
        let p: SignedPauli = "-XY".parse().unwrap();
        let m = DenseMatrix::pauli(&"ZX".parse().unwrap());
        let prod = DenseMatrix::pauli(&p).mul(&m);
        let mut tr = G::ZERO;
        for i in 0..4 {
            tr = tr + prod.get(i, i);
        }
        assert_eq!(tr, pauli_trace(&p, &m));
    }

    #[test]
    fn determinants() {
        let x = DenseMatrix::pauli(&"X".parse().unwrap());
        assert_eq!(x.determinant().unwrap(), -G::ONE);
        let id = DenseMatrix::identity(3);
        assert_eq!(id.determinant().unwrap(), G::ONE);
    }

    #[test]
    fn phase_equality() {
        let id = DenseMatrix::identity(1);
        assert!(id.equal_up_to_phase(&id.scale(G::OMEGA)));
        let z = DenseMatrix::pauli(&"Z".parse().unwrap());
        assert!(!id.equal_up_to_phase(&z));
    }
}
