//! Closed-form data of the iterates `fⁿ`.
//!
//! For a normalized map (`f#(a) = a`, `f#(b) = a^b3 b^b4`, `f#(c) = a^c1 b^c2 c`)
//! the n-th iterate has the same shape with
//!
//! ```text
//! b3n = b3·S0          b4n = b4ⁿ
//! c1n = n·c1 + b3·c2·S1
//! c2n = c2·S0
//! ```
//!
//! where `S0 = Σ_{i<n} b4^i` and `S1 = Σ_{i<n} i·b4^(n-1-i)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::FiberedMapSpec;
use crate::error::{Error, Result};
use crate::matrix::{IntMatrix2, IntVec2};

/// The two geometric sums that drive every iterate formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricSums {
    /// `Σ_{i=0}^{n-1} b4^i`
    pub s0: BigInt,
    /// `Σ_{i=0}^{n-1} i·b4^(n-1-i)`
    pub s1: BigInt,
}

/// Term-by-term summation.
pub fn sums_direct(b4: &BigInt, n: u64) -> GeometricSums {
    let mut s0 = BigInt::zero();
    let mut s1 = BigInt::zero();
    let mut power = BigInt::one();
    // S1 = Σ_{j=0}^{n-2} (n-1-j)·b4^j
    for j in 0..n {
        s0 += &power;
        s1 += &power * BigInt::from(n - 1 - j);
        power *= b4;
    }
    GeometricSums { s0, s1 }
}

/// Closed forms `(b4ⁿ - 1)/(b4 - 1)` and `(b4ⁿ - n·b4 + n - 1)/(b4 - 1)²`.
/// Returns `None` at `b4 = 1`, where both divide by zero.
pub fn sums_closed(b4: &BigInt, n: u64) -> Option<GeometricSums> {
    let d = b4 - BigInt::one();
    if d.is_zero() {
        return None;
    }
    let bn: BigInt = Pow::pow(b4, n);
    let nb = BigInt::from(n);
    let (s0, r0) = (&bn - BigInt::one()).div_rem(&d);
    let (s1, r1) = (&bn - &nb * b4 + &nb - BigInt::one()).div_rem(&(&d * &d));
    debug_assert!(r0.is_zero() && r1.is_zero());
    Some(GeometricSums { s0, s1 })
}

/// Closed form when `|b4| ≥ 2`, direct summation for `b4 ∈ {-1, 0, 1}`.
pub fn geometric_sums(b4: &BigInt, n: u64) -> GeometricSums {
    if b4.abs() >= BigInt::from(2) {
        sums_closed(b4, n).expect("b4 != 1")
    } else {
        sums_direct(b4, n)
    }
}

/// Exponents of `fⁿ#`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerExponents {
    pub n: u64,
    #[serde(with = "crate::serde_int")]
    pub b3n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b4n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c1n: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c2n: BigInt,
}

impl PowerExponents {
    pub fn to_map(&self) -> FiberedMapSpec {
        FiberedMapSpec::normalized(self.b3n.clone(), self.b4n.clone(), self.c1n.clone(), self.c2n.clone())
    }
}

fn require_normalized(f: &FiberedMapSpec) -> Result<()> {
    if f.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized { b1: f.fiber.a1.clone(), b2: f.fiber.a2.clone() })
    }
}

pub fn power_exponents(f: &FiberedMapSpec, n: u64) -> Result<PowerExponents> {
    require_normalized(f)?;
    if n == 0 {
        return Err(Error::ZeroIterate);
    }
    let (b3, b4, c1, c2) = (f.b3(), f.b4(), f.c1(), f.c2());
    let GeometricSums { s0, s1 } = geometric_sums(b4, n);
    Ok(PowerExponents {
        n,
        b3n: b3 * &s0,
        b4n: Pow::pow(b4, n),
        c1n: BigInt::from(n) * c1 + b3 * c2 * &s1,
        c2n: c2 * &s0,
    })
}

/// `|det(Bⁿ - I)|`, the Nielsen number of the n-th iterate of the fiber map.
pub fn nielsen_fiber(b: &IntMatrix2, n: u64) -> BigInt {
    (&b.pow(n) - &IntMatrix2::identity()).det().abs()
}

/// `c1(b4 - 1) - c2·b3`.
pub fn base_invariant(f: &FiberedMapSpec) -> BigInt {
    f.c1() * (f.b4() - BigInt::one()) - f.c2() * f.b3()
}

/// `c1n(b4n - 1) - c2n·b3n`, computed from the iterate exponents and from the
/// factorization `n·(c1(b4 - 1) - c2·b3)·S0`; the two must agree.
pub fn key_invariant(f: &FiberedMapSpec, n: u64) -> Result<BigInt> {
    let pe = power_exponents(f, n)?;
    let direct = &pe.c1n * (&pe.b4n - BigInt::one()) - &pe.c2n * &pe.b3n;
    let factored = BigInt::from(n) * base_invariant(f) * geometric_sums(f.b4(), n).s0;
    if direct != factored {
        return Err(Error::InternalMismatch(format!(
            "key invariant at n = {n}: exponents give {direct}, factorization gives {factored}"
        )));
    }
    Ok(direct)
}

/// Translation part `(c1n, c2n)` as a vector.
pub fn iterate_translation(pe: &PowerExponents) -> IntVec2 {
    IntVec2 { x: pe.c1n.clone(), y: pe.c2n.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::BundleSpec;
    use crate::oracles::lattice_fixed_count;
    use crate::words::{Generator, GroupEngine, NormalForm};
    use proptest::prelude::*;

    fn f(b3: i64, b4: i64, c1: i64, c2: i64) -> FiberedMapSpec {
        FiberedMapSpec::normalized(b3, b4, c1, c2)
    }

    fn pe(b3: i64, b4: i64, c1: i64, c2: i64, n: u64) -> PowerExponents {
        PowerExponents { n, b3n: b3.into(), b4n: b4.into(), c1n: c1.into(), c2n: c2.into() }
    }

    /// Iterates `f#` on the generators with the word engine.
    fn by_words(map: &FiberedMapSpec, n: u64) -> PowerExponents {
        // Fiber words never sit to the right of a `c` here, so the gluing
        // matrix does not affect these images.
        let engine = GroupEngine::new(&BundleSpec::new(IntMatrix2::identity())).unwrap();
        let ib = engine.apply_hom_iter(&GroupEngine::generator(Generator::B), map, n);
        let ic = engine.apply_hom_iter(&GroupEngine::generator(Generator::C), map, n);
        let ia = engine.apply_hom_iter(&GroupEngine::generator(Generator::A), map, n);
        assert_eq!(ia, NormalForm::new(1, 0, 0));
        assert!(ib.r.is_zero() && ic.r.is_one());
        PowerExponents { n, b3n: ib.p, b4n: ib.q, c1n: ic.p, c2n: ic.q }
    }

    #[test]
    fn examples() {
        assert_eq!(power_exponents(&f(2, 3, 1, 1), 2).unwrap(), pe(8, 9, 4, 4, 2));
        assert_eq!(power_exponents(&f(1, 1, 0, 1), 3).unwrap(), pe(3, 1, 3, 3, 3));
        assert_eq!(power_exponents(&f(-2, 5, 7, -3), 1).unwrap(), pe(-2, 5, 7, -3, 1));
        assert_eq!(by_words(&f(2, 3, 1, 1), 2), pe(8, 9, 4, 4, 2));
    }

    #[test]
    fn errors() {
        let skew = FiberedMapSpec::new(IntMatrix2::from_rows([[2, 0], [0, 1]]), IntVec2::new(0, 0));
        assert!(matches!(power_exponents(&skew, 2), Err(Error::NotNormalized { .. })));
        assert_eq!(power_exponents(&f(1, 1, 1, 1), 0), Err(Error::ZeroIterate));
    }

    #[test]
    fn nielsen_examples() {
        let cat = IntMatrix2::from_rows([[2, 1], [1, 1]]);
        assert_eq!(nielsen_fiber(&cat, 1), BigInt::from(1));
        assert_eq!(nielsen_fiber(&cat, 2), BigInt::from(5));
        assert_eq!(nielsen_fiber(&IntMatrix2::identity(), 7), BigInt::zero());
    }

    #[test]
    fn key_invariant_examples() {
        assert_eq!(key_invariant(&f(1, 2, 1, 1), 2).unwrap(), BigInt::zero());
        assert_eq!(key_invariant(&f(0, 2, 1, 0), 2).unwrap(), BigInt::from(6));
        assert_eq!(key_invariant(&f(2, 3, 1, 1), 9).unwrap(), BigInt::zero());
    }

    #[test]
    fn sums_agree_at_small_b4() {
        for b4 in -1i64..=0 {
            for n in 1..12 {
                let b = BigInt::from(b4);
                assert_eq!(sums_closed(&b, n).unwrap(), sums_direct(&b, n));
            }
        }
        assert!(sums_closed(&BigInt::one(), 4).is_none());
        assert_eq!(sums_direct(&BigInt::one(), 4), GeometricSums { s0: 4.into(), s1: 6.into() });
    }

    proptest! {
        #[test]
        fn closed_and_direct_sums_agree(b4 in -9i64..10, n in 1u64..25) {
            let b = BigInt::from(b4);
            if b4 != 1 {
                prop_assert_eq!(sums_closed(&b, n).unwrap(), sums_direct(&b, n));
            }
        }

        #[test]
        fn word_oracle(b3 in -5i64..=5, b4 in -5i64..=5, c1 in -5i64..=5, c2 in -5i64..=5, n in 1u64..=12) {
            let map = f(b3, b4, c1, c2);
            prop_assert_eq!(power_exponents(&map, n).unwrap(), by_words(&map, n));
        }

        #[test]
        fn semigroup_law(b3 in -4i64..=4, b4 in -4i64..=4, c1 in -4i64..=4, c2 in -4i64..=4, m in 1u64..7, n in 1u64..7) {
            let map = f(b3, b4, c1, c2);
            let engine = GroupEngine::new(&BundleSpec::new(IntMatrix2::identity())).unwrap();
            let fm = power_exponents(&map, m).unwrap().to_map();
            let fmn = power_exponents(&map, m + n).unwrap();
            // fᵐ⁺ⁿ# = fⁿ# ∘ fᵐ#, evaluated on the generators by the engine
            let fnm = power_exponents(&map, n).unwrap().to_map();
            let ib = engine.apply_hom(&engine.apply_hom(&GroupEngine::generator(Generator::B), &fm), &fnm);
            let ic = engine.apply_hom(&engine.apply_hom(&GroupEngine::generator(Generator::C), &fm), &fnm);
            prop_assert_eq!((ib.p, ib.q, ic.p, ic.q), (fmn.b3n, fmn.b4n, fmn.c1n, fmn.c2n));
        }

        #[test]
        fn determinant_factorization(e in proptest::array::uniform4(-3i64..=3), n in 1u64..6) {
            let b = IntMatrix2::from_rows([[e[0], e[1]], [e[2], e[3]]]);
            let id = IntMatrix2::identity();
            let partial = (0..n).fold(IntMatrix2::zero(), |acc, i| &acc + &b.pow(i));
            prop_assert_eq!((&b.pow(n) - &id).det(), (&b - &id).det() * partial.det());
        }

        #[test]
        fn nielsen_counts_lattice_points(e in proptest::array::uniform4(-3i64..=3), n in 1u64..=3) {
            let b = IntMatrix2::from_rows([[e[0], e[1]], [e[2], e[3]]]);
            let m = &b.pow(n) - &IntMatrix2::identity();
            if let Some(count) = lattice_fixed_count(&m) {
                prop_assert_eq!(count, nielsen_fiber(&b, n));
            } else {
                prop_assert!(nielsen_fiber(&b, n).is_zero());
            }
        }

        #[test]
        fn key_invariant_never_mismatches(b3 in -6i64..=6, b4 in -6i64..=6, c1 in -6i64..=6, c2 in -6i64..=6, n in 1u64..15) {
            prop_assert!(key_invariant(&f(b3, b4, c1, c2), n).is_ok());
        }
    }
}
