//! Exact arithmetic over Z[1/√2] and Z[i,1/√2].
//!
//! Both types keep their denominator exponent minimal after every
//! operation, so `sde` is a field read and equality is a tuple compare.
//! Numerators are `i64`; every operation is overflow-checked and the
//! `checked_*` forms report overflow as [`Error::Overflow`]. The operator
//! impls panic on overflow instead of wrapping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// (a + b√2) / √2^k.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct DyadicRootTwo {
    a: i64,
    b: i64,
    k: u32,
}

/// Multiply the numerator a + b√2 by √2^e.
fn scale_sqrt2(a: i64, b: i64, e: u32) -> Result<(i64, i64)> {
    let (mut a, mut b) = (a, b);
    if e % 2 == 1 {
        let na = b.checked_mul(2).ok_or(Error::Overflow)?;
        b = a;
        a = na;
    }
    let half = e / 2;
    if half > 0 {
        if half >= 63 {
            if a != 0 || b != 0 {
                return Err(Error::Overflow);
            }
        } else {
            let f = 1i64 << half;
            a = a.checked_mul(f).ok_or(Error::Overflow)?;
            b = b.checked_mul(f).ok_or(Error::Overflow)?;
        }
    }
    Ok((a, b))
}

impl DyadicRootTwo {
    pub const ZERO: Self = Self { a: 0, b: 0, k: 0 };
    pub const ONE: Self = Self { a: 1, b: 0, k: 0 };
    pub const INV_SQRT2: Self = Self { a: 1, b: 0, k: 1 };
    pub const SQRT2: Self = Self { a: 0, b: 1, k: 0 };

    /// Builds the canonical form of (a + b√2)/√2^k.
    pub fn new(a: i64, b: i64, k: u32) -> Self {
        let mut x = Self { a, b, k };
        x.normalize();
        x
    }

    pub fn from_int(a: i64) -> Self {
        Self { a, b: 0, k: 0 }
    }

    fn normalize(&mut self) {
        while self.k > 0 && self.a % 2 == 0 {
            let a = self.a;
            self.a = self.b;
            self.b = a / 2;
            self.k -= 1;
        }
        if self.a == 0 && self.b == 0 {
            self.k = 0;
        }
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Smallest denominator exponent.
    pub fn sde(&self) -> u32 {
        self.k
    }

    /// Numerator over the (larger or equal) exponent `k`.
    pub fn numerator_at(&self, k: u32) -> Result<(i64, i64)> {
        if k < self.k {
            return Err(Error::Invalid(format!(
                "cannot express sde {} value over exponent {}",
                self.k, k
            )));
        }
        scale_sqrt2(self.a, self.b, k - self.k)
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        let k = self.k.max(o.k);
        let (a1, b1) = self.numerator_at(k)?;
        let (a2, b2) = o.numerator_at(k)?;
        Ok(Self::new(
            a1.checked_add(a2).ok_or(Error::Overflow)?,
            b1.checked_add(b2).ok_or(Error::Overflow)?,
            k,
        ))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        self.checked_add(-o)
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let m = |x: i64, y: i64| x.checked_mul(y).ok_or(Error::Overflow);
        let a = m(self.a, o.a)?
            .checked_add(m(2, m(self.b, o.b)?)?)
            .ok_or(Error::Overflow)?;
        let b = m(self.a, o.b)?
            .checked_add(m(self.b, o.a)?)
            .ok_or(Error::Overflow)?;
        let k = self.k.checked_add(o.k).ok_or(Error::Overflow)?;
        Ok(Self::new(a, b, k))
    }

    /// Division by √2 (always exact in this ring).
    pub fn div_sqrt2(self) -> Self {
        Self::new(self.a, self.b, self.k + 1)
    }

    /// Image under √2 ↦ −√2.
    pub fn galois(self) -> Self {
        let s = if self.k % 2 == 1 { -1 } else { 1 };
        Self::new(s * self.a, -s * self.b, self.k)
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2)
            / std::f64::consts::SQRT_2.powi(self.k as i32)
    }

    /// Sign in the common-denominator order used by coset labels:
    /// negative iff a < 0, or a = 0 and b < 0.
    pub fn label_negative(&self) -> bool {
        self.a < 0 || (self.a == 0 && self.b < 0)
    }
}

pub fn ring_add(x: DyadicRootTwo, y: DyadicRootTwo) -> Result<DyadicRootTwo> {
    x.checked_add(y)
}

pub fn ring_mul(x: DyadicRootTwo, y: DyadicRootTwo) -> Result<DyadicRootTwo> {
    x.checked_mul(y)
}

pub fn sde(x: &DyadicRootTwo) -> u32 {
    x.sde()
}

/// Maximum entry sde; 0 for an empty or all-zero matrix.
pub fn sde_matrix<'a, I>(entries: I) -> u32
where
    I: IntoIterator<Item = &'a DyadicRootTwo>,
{
    entries.into_iter().map(|e| e.k).max().unwrap_or(0)
}

impl Neg for DyadicRootTwo {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            k: self.k,
        }
    }
}

impl Add for DyadicRootTwo {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("ring overflow")
    }
}

impl Sub for DyadicRootTwo {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("ring overflow")
    }
}

impl Mul for DyadicRootTwo {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("ring overflow")
    }
}

impl fmt::Display for DyadicRootTwo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}√2)/√2^{}", self.a, self.b, self.k)
    }
}

impl Serialize for DyadicRootTwo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b, self.k).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DyadicRootTwo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b, k) = <(i64, i64, u32)>::deserialize(d)?;
        Ok(Self::new(a, b, k))
    }
}

/// (a + bi + c√2 + di√2) / √2^k.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRootTwo {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    k: u32,
}

impl GaussianRootTwo {
    pub const ZERO: Self = Self {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
        k: 0,
    };
    pub const ONE: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        k: 0,
    };
    pub const I: Self = Self {
        a: 0,
        b: 1,
        c: 0,
        d: 0,
        k: 0,
    };
    /// e^{iπ/4} = (1 + i)/√2.
    pub const OMEGA: Self = Self {
        a: 1,
        b: 1,
        c: 0,
        d: 0,
        k: 1,
    };
    pub const INV_SQRT2: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 0,
        k: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64, k: u32) -> Self {
        let mut x = Self { a, b, c, d, k };
        x.normalize();
        x
    }

    pub fn from_real(x: DyadicRootTwo) -> Self {
        Self {
            a: x.a,
            b: 0,
            c: x.b,
            d: 0,
            k: x.k,
        }
    }

    pub fn from_int(a: i64) -> Self {
        Self {
            a,
            b: 0,
            c: 0,
            d: 0,
            k: 0,
        }
    }

    fn normalize(&mut self) {
        while self.k > 0 && self.a % 2 == 0 && self.b % 2 == 0 {
            let (a, b) = (self.a, self.b);
            self.a = self.c;
            self.b = self.d;
            self.c = a / 2;
            self.d = b / 2;
            self.k -= 1;
        }
        if self.is_zero() {
            self.k = 0;
        }
    }

    pub fn parts(&self) -> (i64, i64, i64, i64, u32) {
        (self.a, self.b, self.c, self.d, self.k)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn sde(&self) -> u32 {
        self.k
    }

    /// The real part as an element of Z[1/√2].
    pub fn re(&self) -> DyadicRootTwo {
        DyadicRootTwo::new(self.a, self.c, self.k)
    }

    /// The imaginary part as an element of Z[1/√2].
    pub fn im(&self) -> DyadicRootTwo {
        DyadicRootTwo::new(self.b, self.d, self.k)
    }

    pub fn to_real(&self) -> Option<DyadicRootTwo> {
        if self.b == 0 && self.d == 0 {
            Some(self.re())
        } else {
            None
        }
    }

    pub fn conj(self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            c: self.c,
            d: -self.d,
            k: self.k,
        }
    }

    fn at(&self, k: u32) -> Result<(i64, i64, i64, i64)> {
        let (a, c) = scale_sqrt2(self.a, self.c, k - self.k)?;
        let (b, d) = scale_sqrt2(self.b, self.d, k - self.k)?;
        Ok((a, b, c, d))
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        let k = self.k.max(o.k);
        let (a1, b1, c1, d1) = self.at(k)?;
        let (a2, b2, c2, d2) = o.at(k)?;
        let add = |x: i64, y: i64| x.checked_add(y).ok_or(Error::Overflow);
        Ok(Self::new(
            add(a1, a2)?,
            add(b1, b2)?,
            add(c1, c2)?,
            add(d1, d2)?,
            k,
        ))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        self.checked_add(-o)
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        // Real and imaginary numerators live in Z[√2]: (x0 + x1√2).
        fn zmul(x: (i64, i64), y: (i64, i64)) -> Result<(i64, i64)> {
            let p = (x.0 as i128) * (y.0 as i128) + 2 * (x.1 as i128) * (y.1 as i128);
            let q = (x.0 as i128) * (y.1 as i128) + (x.1 as i128) * (y.0 as i128);
            Ok((
                i64::try_from(p).map_err(|_| Error::Overflow)?,
                i64::try_from(q).map_err(|_| Error::Overflow)?,
            ))
        }
        let sub = |x: (i64, i64), y: (i64, i64)| -> Result<(i64, i64)> {
            Ok((
                x.0.checked_sub(y.0).ok_or(Error::Overflow)?,
                x.1.checked_sub(y.1).ok_or(Error::Overflow)?,
            ))
        };
        let add = |x: (i64, i64), y: (i64, i64)| -> Result<(i64, i64)> {
            Ok((
                x.0.checked_add(y.0).ok_or(Error::Overflow)?,
                x.1.checked_add(y.1).ok_or(Error::Overflow)?,
            ))
        };
        let (re1, im1) = ((self.a, self.c), (self.b, self.d));
        let (re2, im2) = ((o.a, o.c), (o.b, o.d));
        let re = sub(zmul(re1, re2)?, zmul(im1, im2)?)?;
        let im = add(zmul(re1, im2)?, zmul(im1, re2)?)?;
        let k = self.k.checked_add(o.k).ok_or(Error::Overflow)?;
        Ok(Self::new(re.0, im.0, re.1, im.1, k))
    }

    /// ω^j for j taken mod 8.
    pub fn omega_pow(j: i64) -> Self {
        let j = j.rem_euclid(8);
        let mut x = Self::ONE;
        for _ in 0..j {
            x = x * Self::OMEGA;
        }
        x
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re().to_f64(), self.im().to_f64())
    }
}

impl Neg for GaussianRootTwo {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            k: self.k,
        }
    }
}

impl Add for GaussianRootTwo {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("ring overflow")
    }
}

impl Sub for GaussianRootTwo {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("ring overflow")
    }
}

impl Mul for GaussianRootTwo {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("ring overflow")
    }
}

impl fmt::Display for GaussianRootTwo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}+{}i+{}√2+{}i√2)/√2^{}",
            self.a, self.b, self.c, self.d, self.k
        )
    }
}

impl Serialize for GaussianRootTwo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b, self.c, self.d, self.k).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRootTwo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b, c, dd, k) = <(i64, i64, i64, i64, u32)>::deserialize(d)?;
        Ok(Self::new(a, b, c, dd, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_reduction() {
        let x = DyadicRootTwo::new(2, 1, 2);
        assert_eq!((x.a(), x.b(), x.k()), (1, 1, 1));
        assert_eq!(DyadicRootTwo::new(0, 0, 5), DyadicRootTwo::ZERO);
        assert_eq!(DyadicRootTwo::new(4, 0, 4), DyadicRootTwo::ONE);
    }

    #[test]
    fn add_examples() {
        let z = ring_add(DyadicRootTwo::new(1, 0, 0), DyadicRootTwo::new(-1, 0, 0)).unwrap();
        assert_eq!(z, DyadicRootTwo::ZERO);
        let h = DyadicRootTwo::new(1, 0, 1);
        assert_eq!(ring_add(h, h).unwrap(), DyadicRootTwo::new(0, 1, 0));
    }

    #[test]
    fn mul_example() {
        let p = ring_mul(DyadicRootTwo::new(1, 1, 1), DyadicRootTwo::new(1, -1, 1)).unwrap();
        assert_eq!((p.a(), p.b(), p.k()), (-1, 0, 2));
    }

    #[test]
    fn overflow_is_reported() {
        let big = DyadicRootTwo::new(i64::MAX, 0, 0);
        assert!(matches!(big.checked_add(big), Err(Error::Overflow)));
        assert!(matches!(big.checked_mul(big), Err(Error::Overflow)));
    }

    #[test]
    fn gaussian_omega_powers() {
        assert_eq!(
            GaussianRootTwo::OMEGA * GaussianRootTwo::OMEGA,
            GaussianRootTwo::I
        );
        assert_eq!(GaussianRootTwo::omega_pow(8), GaussianRootTwo::ONE);
        assert_eq!(GaussianRootTwo::omega_pow(4), -GaussianRootTwo::ONE);
    }

    #[test]
    fn gaussian_canonical() {
        let x = GaussianRootTwo::new(2, 2, 0, 0, 1);
        assert_eq!(x.parts(), (0, 0, 1, 1, 0));
        let y = GaussianRootTwo::new(2, 1, 0, 0, 1);
        assert_eq!(y.sde(), 1);
    }

    #[test]
    fn serde_tuple_form() {
        let x = DyadicRootTwo::new(3, -1, 2);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[3,-1,2]");
        let y: DyadicRootTwo = serde_json::from_str("[2,1,2]").unwrap();
        assert_eq!(y, DyadicRootTwo::new(1, 1, 1));
    }
}
