//! Sorting a (bundle, map) pair into one of the five normal-form cases.
//!
//! When `B ≠ I` has eigenvalue 1, its fixed line is spanned by a primitive
//! vector `v`. Since `A` commutes with `B` it preserves that line, so in the
//! basis `v, w` both matrices become upper triangular:
//!
//! ```text
//! A1 = [[±1, a3], [0, ±1]]      B1 = [[1, b3], [0, b4]]
//! ```
//!
//! The diagonal of `A1` picks the case.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleSpec, FiberedMapSpec};
use crate::error::{Error, Result};
use crate::matrix::{ext_gcd, IntMatrix2, IntVec2};
use crate::words::{validate_hom, HomValidity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IV => "IV",
            CaseTag::V => "V",
        })
    }
}

/// Result of [`classify`]. All matrices use the `[[a1, a3], [a2, a4]]` layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub case_tag: CaseTag,
    /// Change of basis with `P·v = (1,0)` and `P·w = (0,1)`.
    pub p: IntMatrix2,
    /// `P·A·P⁻¹`.
    pub a1: IntMatrix2,
    /// `P·B·P⁻¹`.
    pub b1: IntMatrix2,
    /// `P·(c1, c2)`.
    pub translation: IntVec2,
}

impl Classification {
    pub fn a3(&self) -> &BigInt {
        &self.a1.a3
    }

    pub fn b3(&self) -> &BigInt {
        &self.b1.a3
    }

    pub fn b4(&self) -> &BigInt {
        &self.b1.a4
    }

    pub fn c1(&self) -> &BigInt {
        &self.translation.x
    }

    pub fn c2(&self) -> &BigInt {
        &self.translation.y
    }

    /// The bundle in the new basis.
    pub fn bundle(&self) -> BundleSpec {
        BundleSpec::new(self.a1.clone())
    }

    /// The map in the new basis.
    pub fn map(&self) -> FiberedMapSpec {
        FiberedMapSpec::new(self.b1.clone(), self.translation.clone())
    }
}

fn primitive_signed(v: IntVec2) -> IntVec2 {
    let g = v.content();
    let mut v = IntVec2 { x: &v.x / &g, y: &v.y / &g };
    if v.x.is_negative() || (v.x.is_zero() && v.y.is_negative()) {
        v = -&v;
    }
    v
}

/// Primitive `v` with `B·v = v`, first nonzero entry positive.
pub fn eigenvector_one(b: &IntMatrix2) -> Result<IntVec2> {
    if b.is_identity() {
        return Err(Error::IdentityMatrix);
    }
    let m = b - &IntMatrix2::identity();
    let det = m.det();
    if !det.is_zero() {
        return Err(Error::NoEigenvector { det });
    }
    // A nonzero row (r, s) of the rank-one matrix B - I has kernel (s, -r).
    let raw = if !m.a1.is_zero() || !m.a3.is_zero() {
        IntVec2 { x: m.a3.clone(), y: -&m.a1 }
    } else {
        IntVec2 { x: m.a4.clone(), y: -&m.a2 }
    };
    let v = primitive_signed(raw);
    debug_assert_eq!(b.apply(&v), v);
    Ok(v)
}

/// Second basis vector `w` with `det[v | w] = 1`.
///
/// Uses `±A·v` when that already completes `v`, and an extended-gcd
/// completion otherwise.
pub fn complete_basis(v: &IntVec2, bundle: &BundleSpec) -> IntVec2 {
    let av = bundle.gluing.apply(v);
    let d = &v.x * &av.y - &v.y * &av.x;
    if d.is_one() {
        return av;
    }
    if (-&d).is_one() {
        return -&av;
    }
    let (_, s, t) = ext_gcd(&v.x, &v.y);
    IntVec2 { x: -t, y: s }
}

fn side_condition(case: CaseTag, a3: &BigInt, b3: &BigInt, b4: &BigInt) -> bool {
    let lhs = a3 * (b4 - BigInt::one());
    match case {
        CaseTag::I => true,
        CaseTag::II | CaseTag::IV => lhs.is_zero(),
        CaseTag::III => lhs == -(b3 * BigInt::from(2)),
        CaseTag::V => lhs == b3 * 2,
    }
}

/// Classifies `(A, f)` into one of the cases I–V.
///
/// Fails with `NotHomomorphism` when `AB ≠ BA` and with `Unclassifiable`
/// when `det(B - I) ≠ 0` or the conjugated pair fits no case.
pub fn classify(bundle: &BundleSpec, f: &FiberedMapSpec) -> Result<Classification> {
    bundle.check_unimodular()?;
    if let HomValidity::Violation(msg) = validate_hom(f, bundle)? {
        return Err(Error::NotHomomorphism(msg));
    }
    let b = &f.fiber;
    if b.is_identity() {
        return Ok(Classification {
            case_tag: CaseTag::I,
            p: IntMatrix2::identity(),
            a1: bundle.gluing.clone(),
            b1: b.clone(),
            translation: f.translation.clone(),
        });
    }
    let v = match eigenvector_one(b) {
        Ok(v) => v,
        Err(Error::NoEigenvector { det }) => {
            return Err(Error::Unclassifiable(format!(
                "fiber restriction not deformable: det(B - I) = {det}"
            )))
        }
        Err(e) => return Err(e),
    };
    let w = complete_basis(&v, bundle);
    let p = IntMatrix2::from_columns(&v, &w).inverse()?;
    let a1 = bundle.gluing.conjugate_by(&p)?;
    let b1 = b.conjugate_by(&p)?;
    let translation = p.apply(&f.translation);

    if !a1.a2.is_zero() || !b1.a2.is_zero() || !b1.a1.is_one() {
        return Err(Error::InternalMismatch(format!(
            "conjugated pair is not triangular: A1 = {a1}, B1 = {b1}"
        )));
    }
    let one = BigInt::one();
    let minus = -BigInt::one();
    let case_tag = match (&a1.a1, &a1.a4) {
        (x, y) if *x == one && *y == one => CaseTag::II,
        (x, y) if *x == one && *y == minus => CaseTag::III,
        (x, y) if *x == minus && *y == minus => CaseTag::IV,
        (x, y) if *x == minus && *y == one => CaseTag::V,
        _ => {
            return Err(Error::Unclassifiable(format!("diagonal of A1 = {a1} is not in {{±1}}²")));
        }
    };
    if !side_condition(case_tag, &a1.a3, &b1.a3, &b1.a4) {
        return Err(Error::Unclassifiable(format!(
            "case {case_tag} side condition fails for A1 = {a1}, B1 = {b1}"
        )));
    }
    Ok(Classification { case_tag, p, a1, b1, translation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tests::unimodular_from_word;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(rows: [[i64; 2]; 2]) -> IntMatrix2 {
        IntMatrix2::from_rows(rows)
    }

    #[test]
    fn eigenvectors() {
        assert_eq!(eigenvector_one(&m([[1, 2], [0, 1]])).unwrap(), IntVec2::new(1, 0));
        assert_eq!(eigenvector_one(&m([[1, 0], [2, 1]])).unwrap(), IntVec2::new(0, 1));
        assert!(matches!(eigenvector_one(&m([[2, 1], [1, 1]])), Err(Error::NoEigenvector { .. })));
        assert_eq!(eigenvector_one(&IntMatrix2::identity()), Err(Error::IdentityMatrix));
        // kernel of [[-2,4],[-1,2]] is spanned by (2,1)
        assert_eq!(eigenvector_one(&m([[-1, 4], [-1, 3]])).unwrap(), IntVec2::new(2, 1));
    }

    #[test]
    fn completions() {
        let shear = BundleSpec::new(m([[1, 1], [0, 1]]));
        assert_eq!(complete_basis(&IntVec2::new(1, 0), &shear), IntVec2::new(0, 1));
        let rot = BundleSpec::new(m([[0, -1], [1, 0]]));
        assert_eq!(complete_basis(&IntVec2::new(0, 1), &rot), IntVec2::new(-1, 0));
        let v = IntVec2::new(3, 5);
        let w = complete_basis(&v, &shear);
        assert!(IntMatrix2::from_columns(&v, &w).det().is_one());
    }

    #[test]
    fn table_examples() {
        let c = classify(
            &BundleSpec::new(m([[1, 1], [0, 1]])),
            &FiberedMapSpec::new(m([[1, 2], [0, 1]]), IntVec2::new(1, 1)),
        )
        .unwrap();
        assert_eq!(c.case_tag, CaseTag::II);
        assert_eq!(c.p, IntMatrix2::identity());

        let c = classify(
            &BundleSpec::new(m([[2, 1], [1, 1]])),
            &FiberedMapSpec::new(IntMatrix2::identity(), IntVec2::new(0, 0)),
        )
        .unwrap();
        assert_eq!(c.case_tag, CaseTag::I);

        let c = classify(
            &BundleSpec::new(m([[-1, 2], [0, -1]])),
            &FiberedMapSpec::new(m([[1, 1], [0, 1]]), IntVec2::new(0, 0)),
        )
        .unwrap();
        assert_eq!(c.case_tag, CaseTag::IV);
        assert_eq!(c.a3(), &BigInt::from(2));
    }

    #[test]
    fn rejects_bad_inputs() {
        let refl = BundleSpec::new(m([[-1, 0], [0, 1]]));
        let shear = FiberedMapSpec::new(m([[1, 1], [0, 1]]), IntVec2::new(0, 0));
        assert!(matches!(classify(&refl, &shear), Err(Error::NotHomomorphism(_))));

        let hyper = BundleSpec::new(m([[2, 1], [1, 1]]));
        let same = FiberedMapSpec::new(m([[2, 1], [1, 1]]), IntVec2::new(0, 0));
        assert!(matches!(classify(&hyper, &same), Err(Error::Unclassifiable(_))));
    }

    #[test]
    fn cases_iii_and_v() {
        // a3(b4-1) = 2 = -2·b3
        let c = classify(
            &BundleSpec::new(m([[1, 1], [0, -1]])),
            &FiberedMapSpec::new(m([[1, -1], [0, 3]]), IntVec2::new(2, 1)),
        )
        .unwrap();
        assert_eq!(c.case_tag, CaseTag::III);
        let c = classify(
            &BundleSpec::new(m([[-1, 2], [0, 1]])),
            &FiberedMapSpec::new(m([[1, 2], [0, 3]]), IntVec2::new(1, 2)),
        )
        .unwrap();
        assert_eq!(c.case_tag, CaseTag::V);
    }

    fn check_invariants(bundle: &BundleSpec, f: &FiberedMapSpec, c: &Classification) {
        assert!(c.p.is_unimodular());
        assert_eq!(bundle.gluing.conjugate_by(&c.p).unwrap(), c.a1);
        assert_eq!(f.fiber.conjugate_by(&c.p).unwrap(), c.b1);
        assert!(c.a1.commutes_with(&c.b1));
        assert_eq!(c.p.apply(&f.translation), c.translation);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn classification_is_conjugation_invariant(seed in any::<u64>(), q in proptest::collection::vec(0usize..3, 0..6)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = sample::classified_instance(&mut rng, 5);
            let c = classify(&inst.bundle, &inst.map).unwrap();
            check_invariants(&inst.bundle, &inst.map, &c);
            prop_assert_eq!(c.case_tag, inst.case_tag);

            let q = unimodular_from_word(&q);
            let qi = q.inverse().unwrap();
            let moved_bundle = BundleSpec::new(inst.bundle.gluing.conjugate_by(&q).unwrap());
            let moved_map = FiberedMapSpec::new(
                inst.map.fiber.conjugate_by(&q).unwrap(),
                q.apply(&inst.map.translation),
            );
            let c2 = classify(&moved_bundle, &moved_map).unwrap();
            check_invariants(&moved_bundle, &moved_map, &c2);
            prop_assert_eq!(c2.case_tag, c.case_tag);
            prop_assert_eq!(&qi * &q, IntMatrix2::identity());
        }
    }
}
