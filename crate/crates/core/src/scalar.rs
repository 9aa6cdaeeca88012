//! Exact arithmetic in the quadratic field Q(√2).
//!
//! Elements are stored as `rat + quad·√2` with both parts arbitrary-precision
//! rationals. Because √2 is irrational the representation is unique, so
//! equality is component-wise and the sign of an element is decidable with a
//! single rational comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseScalarError;

/// Arbitrary-precision rational; always reduced with a positive denominator.
pub type Rational = BigRational;

/// An element `rat + quad·√2` of Q(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    rat: Rational,
    quad: Rational,
}

impl ExactScalar {
    pub fn new(rat: Rational, quad: Rational) -> Self {
        Self { rat, quad }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The field generator √2.
    pub fn sqrt2() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::from_rational(Rational::from_integer(v.into()))
    }

    pub fn from_rational(rat: Rational) -> Self {
        Self { rat, quad: Rational::zero() }
    }

    /// `num/den` as a rational scalar. Panics if `den` is zero.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::from_rational(Rational::new(num.into(), den.into()))
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn quad(&self) -> &Rational {
        &self.quad
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.quad.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.quad.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rat.is_integer()
    }

    /// Returns the integer value when the scalar is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.rat.to_integer())
    }

    /// Galois conjugate `rat - quad·√2`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.rat.clone(), -self.quad.clone())
    }

    /// Field norm `rat² - 2·quad²`; zero only for the zero element.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - Rational::from_integer(2.into()) * &self.quad * &self.quad
    }

    /// Exact sign of the real number `rat + quad·√2`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.quad);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare rat² with 2·quad²
        let lhs = &self.rat * &self.rat;
        let rhs = Rational::from_integer(2.into()) * &self.quad * &self.quad;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("√2 is irrational"),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self::new(&self.rat / &n, -(&self.quad / &n)))
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        // floor(rat) + floor(quad·√2) is off by at most one
        let mut m = self.rat.floor().to_integer() + floor_quad_sqrt2(&self.quad);
        while (self - &ExactScalar::from_int(m.clone())).is_negative() {
            m -= 1;
        }
        while !(self - &ExactScalar::from_int(&m + 1)).is_negative() {
            m += 1;
        }
        m
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Representative of the value modulo 1 in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &ExactScalar::from_int(self.floor())
    }

    /// Rough floating-point value, for display only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        let q = self.quad.to_f64().unwrap_or(f64::NAN);
        r + q * std::f64::consts::SQRT_2
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// floor(q·√2) for rational q = p/d, via integer square roots.
fn floor_quad_sqrt2(q: &Rational) -> BigInt {
    let p = q.numer();
    let d = q.denom();
    // |p|·√2 / d = sqrt(2p²) / d
    let root: BigInt = (BigInt::from(2) * p * p).sqrt();
    if p.is_negative() {
        // -sqrt(2p²)/d, and sqrt(2p²) is never an integer for p ≠ 0
        -(root.div_floor(d) + BigInt::one())
    } else {
        root.div_floor(d)
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(v: BigInt) -> Self {
        Self::from_int(v)
    }
}

impl From<&BigInt> for ExactScalar {
    fn from(v: &BigInt) -> Self {
        Self::from_int(v.clone())
    }
}

impl From<Rational> for ExactScalar {
    fn from(v: Rational) -> Self {
        Self::from_rational(v)
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
        impl $imp<ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat + &rhs.rat, &self.quad + &rhs.quad)
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat - &rhs.rat, &self.quad - &rhs.quad)
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let two = Rational::from_integer(2.into());
        ExactScalar::new(
            &self.rat * &rhs.rat + two * &self.quad * &rhs.quad,
            &self.rat * &rhs.quad + &self.quad * &rhs.rat,
        )
    }
}

impl Div<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self * &rhs.recip().expect("division by zero in Q(√2)")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Mul<&BigInt> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &BigInt) -> ExactScalar {
        let k = Rational::from_integer(rhs.clone());
        ExactScalar::new(&self.rat * &k, &self.quad * &k)
    }
}

impl Mul<&BigInt> for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &BigInt) -> ExactScalar {
        &self * rhs
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.rat, -self.quad)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -self.clone()
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.rat += &rhs.rat;
        self.quad += &rhs.quad;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.rat -= &rhs.rat;
        self.quad -= &rhs.quad;
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: `p/q`, `p/q+r/s*sqrt2`, `r/s*sqrt2`, with `1*` and a zero
/// rational part omitted (`sqrt2`, `-sqrt2`, `1+sqrt2`).
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quad.is_zero() {
            return f.write_str(&fmt_rational(&self.rat));
        }
        let mut out = String::new();
        if !self.rat.is_zero() {
            out.push_str(&fmt_rational(&self.rat));
        }
        let mag = self.quad.abs();
        if self.quad.is_negative() {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !mag.is_one() {
            out.push_str(&fmt_rational(&mag));
            out.push('*');
        }
        out.push_str("sqrt2");
        f.write_str(&out)
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<Rational, ParseScalarError> {
    let bad = || ParseScalarError::new(whole, format!("malformed rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ParseScalarError::new(whole, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Parses one signed term: a rational, or a rational times `sqrt2`.
fn parse_term(term: &str, negative: bool, whole: &str) -> Result<(Rational, bool), ParseScalarError> {
    let term = term.trim();
    if term.is_empty() {
        return Err(ParseScalarError::new(whole, "empty term"));
    }
    let (coef, is_quad) = if let Some(prefix) = term.strip_suffix("sqrt2") {
        let prefix = prefix.trim();
        let prefix = prefix.strip_suffix('*').map(str::trim).unwrap_or(prefix);
        let c = if prefix.is_empty() {
            Rational::one()
        } else {
            parse_rational(prefix, whole)?
        };
        (c, true)
    } else {
        (parse_rational(term, whole)?, false)
    };
    Ok((if negative { -coef } else { coef }, is_quad))
}

impl FromStr for ExactScalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseScalarError::new(s, "empty input"));
        }
        // split into signed terms at '+'/'-' that are not leading a number
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('/') {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        terms.push((negative, current));
        if terms.len() > 2 {
            return Err(ParseScalarError::new(s, "expected at most two terms"));
        }
        let mut out = ExactScalar::zero();
        let (mut seen_rat, mut seen_quad) = (false, false);
        for (neg, term) in &terms {
            let (coef, is_quad) = parse_term(term, *neg, s)?;
            if is_quad {
                if seen_quad {
                    return Err(ParseScalarError::new(s, "two sqrt2 terms"));
                }
                seen_quad = true;
                out.quad = coef;
            } else {
                if seen_rat {
                    return Err(ParseScalarError::new(s, "two rational terms"));
                }
                seen_rat = true;
                out.rat = coef;
            }
        }
        Ok(out)
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(ExactScalar::from_int(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn conjugate_product() {
        assert_eq!(s("1+sqrt2") * s("1-sqrt2"), s("-1"));
    }

    #[test]
    fn sqrt2_squared() {
        assert_eq!(ExactScalar::sqrt2() * ExactScalar::sqrt2(), ExactScalar::from_int(2));
    }

    #[test]
    fn rational_addition() {
        assert_eq!(s("1/2") + s("1/3"), s("5/6"));
        assert!((s("1/2") + s("1/3")).is_rational());
    }

    #[test]
    fn signs() {
        assert_eq!(s("1-sqrt2").signum(), -1);
        // (3/2)² = 9/4 > 2
        assert_eq!(s("3/2-sqrt2").signum(), 1);
        assert_eq!(ExactScalar::zero().signum(), 0);
        assert_eq!(s("-7/5+sqrt2").signum(), 1);
        assert_eq!(s("-3/2+sqrt2").signum(), -1);
    }

    #[test]
    fn floor_and_fract() {
        assert_eq!(ExactScalar::sqrt2().floor(), BigInt::from(1));
        assert_eq!((-ExactScalar::sqrt2()).floor(), BigInt::from(-2));
        assert_eq!(s("-3").floor(), BigInt::from(-3));
        assert_eq!(s("7/2").ceil(), BigInt::from(4));
        assert_eq!(s("100-70*sqrt2").floor(), BigInt::from(1)); // 100 - 98.99..
        assert_eq!(s("5/2+sqrt2").fract(), s("-1/2+sqrt2"));
    }

    #[test]
    fn display_forms() {
        assert_eq!(s("4/6").to_string(), "2/3");
        assert_eq!(s("sqrt2").to_string(), "sqrt2");
        assert_eq!(s("-1*sqrt2").to_string(), "-sqrt2");
        assert_eq!(s("1/2 - 3/4*sqrt2").to_string(), "1/2-3/4*sqrt2");
        assert_eq!(s("-1/3+2*sqrt2").to_string(), "-1/3+2*sqrt2");
        assert_eq!(s("2*sqrt2+1").to_string(), "1+2*sqrt2");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1/0", "abc", "1+2+3", "sqrt2+sqrt2", "1//2", "1+2"] {
            assert!(bad.parse::<ExactScalar>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn json_accepts_ints_and_strings() {
        let v: Vec<ExactScalar> = serde_json::from_str(r#"[3, "1/2+sqrt2"]"#).unwrap();
        assert_eq!(v, vec![s("3"), s("1/2+sqrt2")]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["3","1/2+sqrt2"]"#);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-60i64..60, 1i64..12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
    }

    fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
        (arb_rational(), arb_rational()).prop_map(|(a, b)| ExactScalar::new(a, b))
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_scalar(), y in arb_scalar(), z in arb_scalar()) {
            prop_assert_eq!((&x + &y) + &z, &x + (&y + &z));
            prop_assert_eq!((&x * &y) * &z, &x * (&y * &z));
            prop_assert_eq!(&x * (&y + &z), &x * &y + &x * &z);
            prop_assert_eq!(&x * &y, &y * &x);
            if !x.is_zero() {
                prop_assert_eq!(&x * x.recip().unwrap(), ExactScalar::one());
            }
        }

        #[test]
        fn sign_laws(x in arb_scalar()) {
            prop_assert_eq!((-&x).signum(), -x.signum());
            prop_assert!((&x * &x).signum() >= 0);
            prop_assert_eq!(x.signum() == 0, x.is_zero());
        }

        #[test]
        fn sign_matches_rational_order(a in arb_rational()) {
            let x = ExactScalar::from_rational(a.clone());
            prop_assert_eq!(x.signum() as i32, a.cmp(&Rational::zero()) as i32);
        }

        #[test]
        fn floor_brackets_value(x in arb_scalar()) {
            let m = ExactScalar::from_int(x.floor());
            prop_assert!(m <= x);
            prop_assert!(x < &m + &ExactScalar::one());
        }

        #[test]
        fn text_round_trip(x in arb_scalar()) {
            prop_assert_eq!(x.to_string().parse::<ExactScalar>().unwrap(), x);
        }
    }
}
