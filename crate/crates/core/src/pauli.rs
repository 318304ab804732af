//! Signed n-qubit Paulis over the Hermitian convention Y = iXZ.
//!
//! Bit i of `x`/`z` belongs to qubit i. The base-4 [`PauliIndex`] puts
//! qubit 0 in the most significant digit, digits I=0, X=1, Y=2, Z=3.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Base-4 index of an unsigned Pauli; 0 is the identity.
pub type PauliIndex = usize;

pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SignedPauli {
    n: u8,
    neg: bool,
    x: u32,
    z: u32,
}

/// Per-qubit letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn digit(self) -> usize {
        match self {
            Letter::I => 0,
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 3,
        }
    }

    fn from_digit(d: usize) -> Self {
        [Letter::I, Letter::X, Letter::Y, Letter::Z][d & 3]
    }

    fn to_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.digit()]
    }
}

impl SignedPauli {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self {
            n: n as u8,
            neg: false,
            x: 0,
            z: 0,
        }
    }

    pub fn from_bits(n: usize, x: u32, z: u32, neg: bool) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        debug_assert!(x & !mask == 0 && z & !mask == 0);
        Self {
            n: n as u8,
            neg,
            x,
            z,
        }
    }

    /// The single-qubit Pauli `l` on qubit `q`.
    pub fn single(n: usize, q: usize, l: Letter) -> Self {
        let (x, z) = l.bits();
        Self::from_bits(n, (x as u32) << q, (z as u32) << q, false)
    }

    pub fn x_q(n: usize, q: usize) -> Self {
        Self::single(n, q, Letter::X)
    }

    pub fn z_q(n: usize, q: usize) -> Self {
        Self::single(n, q, Letter::Z)
    }

    /// Unsigned Pauli with the given index, sign +.
    pub fn from_index(n: usize, idx: PauliIndex) -> Self {
        let mut x = 0u32;
        let mut z = 0u32;
        for q in 0..n {
            let d = (idx >> (2 * (n - 1 - q))) & 3;
            let (bx, bz) = Letter::from_digit(d).bits();
            x |= (bx as u32) << q;
            z |= (bz as u32) << q;
        }
        Self::from_bits(n, x, z, false)
    }

    pub fn index(&self) -> PauliIndex {
        let n = self.n as usize;
        let mut idx = 0usize;
        for q in 0..n {
            idx = idx * 4 + self.letter(q).digit();
        }
        idx
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }
    pub fn x_bits(&self) -> u32 {
        self.x
    }
    pub fn z_bits(&self) -> u32 {
        self.z
    }
    pub fn is_negative(&self) -> bool {
        self.neg
    }
    pub fn sign(&self) -> i32 {
        if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Support bitmask.
    pub fn support(&self) -> u32 {
        self.x | self.z
    }

    pub fn unsigned(&self) -> Self {
        Self { neg: false, ..*self }
    }

    pub fn negate(&self) -> Self {
        Self {
            neg: !self.neg,
            ..*self
        }
    }

    pub fn with_sign(&self, neg: bool) -> Self {
        Self { neg, ..*self }
    }

    /// Symplectic product: true iff the Paulis anticommute.
    pub fn anticommutes(&self, o: &Self) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 1
    }

    pub fn commutes(&self, o: &Self) -> bool {
        !self.anticommutes(o)
    }

    /// Exponent e with self = i^e X^x Z^z as an operator.
    pub(crate) fn raw_phase(&self) -> u32 {
        (2 * self.neg as u32 + (self.x & self.z).count_ones()) % 4
    }

    /// Builds a Hermitian Pauli from i^e X^x Z^z; `None` if e - |x∧z| is odd.
    pub(crate) fn from_raw(n: usize, x: u32, z: u32, e: u32) -> Option<Self> {
        let e = (e + 4 - (x & z).count_ones() % 4) % 4;
        match e {
            0 => Some(Self::from_bits(n, x, z, false)),
            2 => Some(Self::from_bits(n, x, z, true)),
            _ => None,
        }
    }

    /// Raw product (i^e1 X^x1 Z^z1)(i^e2 X^x2 Z^z2) = i^e X^x Z^z.
    pub(crate) fn raw_mul(e1: u32, x1: u32, z1: u32, e2: u32, x2: u32, z2: u32) -> (u32, u32, u32) {
        let e = (e1 + e2 + 2 * ((z1 & x2).count_ones() % 2)) % 4;
        (e, x1 ^ x2, z1 ^ z2)
    }

    /// Exact product; errors when the product carries a ±i phase.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::QubitMismatch(self.n(), o.n()));
        }
        let (e, x, z) = Self::raw_mul(self.raw_phase(), self.x, self.z, o.raw_phase(), o.x, o.z);
        Self::from_raw(self.n(), x, z, e).ok_or(Error::NonHermitianProduct)
    }

    /// Unsigned Pauli of the product, ignoring phase.
    pub fn mul_unsigned(&self, o: &Self) -> Self {
        Self::from_bits(self.n(), self.x ^ o.x, self.z ^ o.z, false)
    }

    /// Pauli P' with -i·self·o = ±P'; valid when the two anticommute.
    pub(crate) fn minus_i_product(&self, o: &Self) -> Self {
        let (e, x, z) = Self::raw_mul(self.raw_phase(), self.x, self.z, o.raw_phase(), o.x, o.z);
        Self::from_raw(self.n(), x, z, (e + 3) % 4).expect("anticommuting pair")
    }

    /// Tensor product self ⊗ o (self on the leading qubits).
    pub fn tensor(&self, o: &Self) -> Self {
        let n = self.n() + o.n();
        Self::from_bits(
            n,
            self.x | (o.x << self.n),
            self.z | (o.z << self.n),
            self.neg ^ o.neg,
        )
    }
}

pub fn pauli_mul(p: &SignedPauli, q: &SignedPauli) -> Result<SignedPauli> {
    p.mul(q)
}

pub fn commutes(p: &SignedPauli, q: &SignedPauli) -> bool {
    p.commutes(q)
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.neg { '-' } else { '+' })?;
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignedPauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (neg, body) = match s.chars().next() {
            Some('+') => (false, &s[1..]),
            Some('-') => (true, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() || body.len() > MAX_QUBITS {
            return Err(Error::Parse(format!("bad Pauli string {s:?}")));
        }
        let n = body.len();
        let mut x = 0u32;
        let mut z = 0u32;
        for (q, ch) in body.chars().enumerate() {
            let l = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(Error::Parse(format!("bad Pauli letter {ch:?}"))),
            };
            let (bx, bz) = l.bits();
            x |= (bx as u32) << q;
            z |= (bz as u32) << q;
        }
        Ok(Self::from_bits(n, x, z, neg))
    }
}

/// Check that `v` is outside the span of a GF(2) basis kept in echelon form.
#[derive(Clone, Debug, Default)]
pub(crate) struct XorBasis {
    rows: Vec<u64>,
}

impl XorBasis {
    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let top = 63 - r.leading_zeros();
            if (v >> top) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Inserts `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let top = 63 - r.leading_zeros();
        for row in self.rows.iter_mut() {
            if (*row >> top) & 1 == 1 {
                *row ^= r;
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|&x| x.leading_zeros() > r.leading_zeros())
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, r);
        true
    }
}

pub(crate) fn symplectic_vec(p: &SignedPauli) -> u64 {
    (p.x as u64) | ((p.z as u64) << 32)
}

/// True iff the Paulis are pairwise commuting and no nonempty subset
/// multiplies to ±I.
pub fn commuting_independent(ps: &[SignedPauli]) -> bool {
    for (i, p) in ps.iter().enumerate() {
        if p.is_identity() {
            return false;
        }
        for q in &ps[i + 1..] {
            if p.anticommutes(q) {
                return false;
            }
        }
    }
    let mut basis = XorBasis::default();
    ps.iter().all(|p| basis.insert(symplectic_vec(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SignedPauli {
        s.parse().unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("+X").mul(&p("+I")).unwrap(), p("+X"));
        assert_eq!(p("+ZZ").mul(&p("+XX")).unwrap(), p("-YY"));
        assert!(matches!(
            p("+X").mul(&p("+Z")),
            Err(Error::NonHermitianProduct)
        ));
    }

    #[test]
    fn commute_examples() {
        assert!(p("Z").commutes(&p("Z")));
        assert!(!p("X").commutes(&p("Z")));
        assert!(p("XZ").commutes(&p("ZX")));
    }

    #[test]
    fn index_order() {
        assert_eq!(p("I").index(), 0);
        assert_eq!(p("X").index(), 1);
        assert_eq!(p("Y").index(), 2);
        assert_eq!(p("Z").index(), 3);
        assert_eq!(p("XI").index(), 4);
        assert_eq!(p("IZ").index(), 3);
        for idx in 0..64 {
            assert_eq!(SignedPauli::from_index(3, idx).index(), idx);
        }
    }

    #[test]
    fn string_round_trip() {
        for s in ["+XZY", "-IIZ", "+I"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn independence() {
        assert!(commuting_independent(&[p("ZI"), p("IZ")]));
        assert!(!commuting_independent(&[p("ZI"), p("IZ"), p("ZZ")]));
        assert!(!commuting_independent(&[p("ZI"), p("XI")]));
        assert!(commuting_independent(&[p("ZZ"), p("XX")]));
    }
}
