//! 2×2 integer matrices and integer vectors.
//!
//! Matrices follow the column-action layout `[[a1, a3], [a2, a4]]`: the image
//! of `(x, y)` is `(a1·x + a3·y, a2·x + a4·y)`, so `(a1, a2)` is the image of
//! the first basis vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntVec2 {
    pub x: BigInt,
    pub y: BigInt,
}

impl IntVec2 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self { x: x.into(), y: y.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Non-negative gcd of the two entries.
    pub fn content(&self) -> BigInt {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { x: &self.x * k, y: &self.y * k }
    }
}

impl Add for &IntVec2 {
    type Output = IntVec2;
    fn add(self, rhs: &IntVec2) -> IntVec2 {
        IntVec2 { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl Sub for &IntVec2 {
    type Output = IntVec2;
    fn sub(self, rhs: &IntVec2) -> IntVec2 {
        IntVec2 { x: &self.x - &rhs.x, y: &self.y - &rhs.y }
    }
}

impl Neg for &IntVec2 {
    type Output = IntVec2;
    fn neg(self) -> IntVec2 {
        IntVec2 { x: -&self.x, y: -&self.y }
    }
}

impl fmt::Display for IntVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for IntVec2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_int::vec::serialize(&[self.x.clone(), self.y.clone()], s)
    }
}

impl<'de> Deserialize<'de> for IntVec2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::serde_int::vec::deserialize(d)?;
        let [x, y]: [BigInt; 2] = v
            .try_into()
            .map_err(|_| serde::de::Error::custom("expected two integers"))?;
        Ok(IntVec2 { x, y })
    }
}

/// Integer 2×2 matrix `[[a1, a3], [a2, a4]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
}

impl IntMatrix2 {
    /// Builds a matrix from its rows `[[top_left, top_right], [bottom_left, bottom_right]]`.
    pub fn from_rows(rows: [[i64; 2]; 2]) -> Self {
        Self {
            a1: rows[0][0].into(),
            a3: rows[0][1].into(),
            a2: rows[1][0].into(),
            a4: rows[1][1].into(),
        }
    }

    pub fn from_big_rows(rows: [[BigInt; 2]; 2]) -> Self {
        let [[a1, a3], [a2, a4]] = rows;
        Self { a1, a2, a3, a4 }
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_columns(u: &IntVec2, v: &IntVec2) -> Self {
        Self { a1: u.x.clone(), a2: u.y.clone(), a3: v.x.clone(), a4: v.y.clone() }
    }

    pub fn rows(&self) -> [[BigInt; 2]; 2] {
        [[self.a1.clone(), self.a3.clone()], [self.a2.clone(), self.a4.clone()]]
    }

    pub fn identity() -> Self {
        Self::from_rows([[1, 0], [0, 1]])
    }

    pub fn zero() -> Self {
        Self::from_rows([[0, 0], [0, 0]])
    }

    pub fn is_identity(&self) -> bool {
        self.a1.is_one() && self.a4.is_one() && self.a2.is_zero() && self.a3.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a1.is_zero() && self.a4.is_zero() && self.a2.is_zero() && self.a3.is_zero()
    }

    pub fn det(&self) -> BigInt {
        &self.a1 * &self.a4 - &self.a2 * &self.a3
    }

    pub fn trace(&self) -> BigInt {
        &self.a1 + &self.a4
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn col1(&self) -> IntVec2 {
        IntVec2 { x: self.a1.clone(), y: self.a2.clone() }
    }

    pub fn col2(&self) -> IntVec2 {
        IntVec2 { x: self.a3.clone(), y: self.a4.clone() }
    }

    /// Adjugate: `adj(M)·M = det(M)·I`.
    pub fn adjugate(&self) -> Self {
        Self { a1: self.a4.clone(), a2: -&self.a2, a3: -&self.a3, a4: self.a1.clone() }
    }

    /// Exact integer inverse of a unimodular matrix, `adj(M)/det(M)`.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NonUnimodular { det });
        }
        let adj = self.adjugate();
        Ok(if det.is_one() { adj } else { -&adj })
    }

    pub fn apply(&self, v: &IntVec2) -> IntVec2 {
        IntVec2 {
            x: &self.a1 * &v.x + &self.a3 * &v.y,
            y: &self.a2 * &v.x + &self.a4 * &v.y,
        }
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Power with a signed exponent; negative exponents need unimodularity.
    pub fn pow_signed(&self, e: &BigInt) -> Result<Self> {
        let base = if e.is_negative() { self.inverse()? } else { self.clone() };
        let mut e = e.abs();
        let mut base = base;
        let mut acc = Self::identity();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                acc = &acc * &base;
            }
            base = &base * &base;
            e /= &two;
        }
        Ok(acc)
    }

    /// `self·other == other·self`.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self * other == other * self
    }

    /// `P·self·P⁻¹` for unimodular `P`.
    pub fn conjugate_by(&self, p: &Self) -> Result<Self> {
        Ok(&(p * self) * &p.inverse()?)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self { a1: &self.a1 * k, a2: &self.a2 * k, a3: &self.a3 * k, a4: &self.a4 * k }
    }
}

impl Mul for &IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, r: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a1: &self.a1 * &r.a1 + &self.a3 * &r.a2,
            a2: &self.a2 * &r.a1 + &self.a4 * &r.a2,
            a3: &self.a1 * &r.a3 + &self.a3 * &r.a4,
            a4: &self.a2 * &r.a3 + &self.a4 * &r.a4,
        }
    }
}

impl Add for &IntMatrix2 {
    type Output = IntMatrix2;
    fn add(self, r: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a1: &self.a1 + &r.a1,
            a2: &self.a2 + &r.a2,
            a3: &self.a3 + &r.a3,
            a4: &self.a4 + &r.a4,
        }
    }
}

impl Sub for &IntMatrix2 {
    type Output = IntMatrix2;
    fn sub(self, r: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a1: &self.a1 - &r.a1,
            a2: &self.a2 - &r.a2,
            a3: &self.a3 - &r.a3,
            a4: &self.a4 - &r.a4,
        }
    }
}

impl Neg for &IntMatrix2 {
    type Output = IntMatrix2;
    fn neg(self) -> IntMatrix2 {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a1, self.a3, self.a2, self.a4)
    }
}

/// Serialized as its rows, `[[a1, a3], [a2, a4]]`.
impl Serialize for IntMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [IntVec2 { x: self.a1.clone(), y: self.a3.clone() }, IntVec2 { x: self.a2.clone(), y: self.a4.clone() }];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [top, bottom] = <[IntVec2; 2]>::deserialize(d)?;
        Ok(IntMatrix2 { a1: top.x, a3: top.y, a2: bottom.x, a4: bottom.y })
    }
}

/// Extended gcd: returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}
