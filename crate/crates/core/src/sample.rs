//! Seeded generators of random inputs for property checks and the verifier.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

use crate::affine::AffineParams;
use crate::bundle::{BundleSpec, FiberedMapSpec};
use crate::classification::{CaseTag, Classification};
use crate::error::Result;
use crate::matrix::{IntMatrix2, IntVec2};
use crate::scalar::ExactScalar;

/// A random pair built from a known normal form and then disguised by a
/// random change of basis.
#[derive(Clone, Debug)]
pub struct ClassifiedInstance {
    pub case_tag: CaseTag,
    pub bundle: BundleSpec,
    pub map: FiberedMapSpec,
}

/// Random element of GL(2, Z) as a short product of generators.
pub fn unimodular<R: Rng>(rng: &mut R, max_len: usize) -> IntMatrix2 {
    let gens = [
        IntMatrix2::from_rows([[0, -1], [1, 0]]),
        IntMatrix2::from_rows([[1, 1], [0, 1]]),
        IntMatrix2::from_rows([[1, 0], [1, 1]]),
        IntMatrix2::from_rows([[-1, 0], [0, 1]]),
    ];
    let len = rng.gen_range(0..=max_len);
    (0..len).fold(IntMatrix2::identity(), |acc, _| &acc * &gens[rng.gen_range(0..gens.len())])
}

/// Normal-form data `(A1, b3, b4)` for `case`, entries roughly within `bound`.
fn normal_form<R: Rng>(rng: &mut R, case: CaseTag, bound: i64) -> (IntMatrix2, i64, i64) {
    loop {
        let a3 = rng.gen_range(-bound..=bound);
        let b4 = rng.gen_range(-bound..=bound);
        let b3 = rng.gen_range(-bound..=bound);
        let (d1, d2, b3) = match case {
            CaseTag::I => unreachable!(),
            CaseTag::II | CaseTag::IV => {
                let sign = if case == CaseTag::II { 1 } else { -1 };
                // a3·(b4 - 1) = 0: zero a3 or pin b4 to 1
                let (a3, b4) = if rng.gen_bool(0.5) { (0, b4) } else { (a3, 1) };
                if b4 == 1 && b3 == 0 {
                    continue;
                }
                return (IntMatrix2::from_rows([[sign, a3], [0, sign]]), b3, b4);
            }
            CaseTag::III => (1, -1, -(a3 * (b4 - 1))),
            CaseTag::V => (-1, 1, a3 * (b4 - 1)),
        };
        if b3 % 2 != 0 {
            continue;
        }
        let b3 = b3 / 2;
        if b3 == 0 && b4 == 1 {
            continue;
        }
        return (IntMatrix2::from_rows([[d1, a3], [0, d2]]), b3, b4);
    }
}

/// A random commuting pair of the given case, conjugated by a random `Q`.
pub fn instance_of_case<R: Rng>(rng: &mut R, case: CaseTag, bound: i64) -> ClassifiedInstance {
    let c = IntVec2::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
    let (a1, b1) = if case == CaseTag::I {
        (unimodular(rng, 5), IntMatrix2::identity())
    } else {
        let (a1, b3, b4) = normal_form(rng, case, bound);
        (a1, IntMatrix2::from_rows([[1, b3], [0, b4]]))
    };
    let q = unimodular(rng, 3);
    let q_inv = q.inverse().expect("unimodular");
    ClassifiedInstance {
        case_tag: case,
        bundle: BundleSpec::new(a1.conjugate_by(&q_inv).expect("unimodular")),
        map: FiberedMapSpec::new(b1.conjugate_by(&q_inv).expect("unimodular"), q_inv.apply(&c)),
    }
}

/// A random instance with the case drawn uniformly from I–V.
pub fn classified_instance<R: Rng>(rng: &mut R, bound: i64) -> ClassifiedInstance {
    let case = [CaseTag::I, CaseTag::II, CaseTag::III, CaseTag::IV, CaseTag::V][rng.gen_range(0..5)];
    instance_of_case(rng, case, bound)
}

/// Random rational with denominator in `1..=max_den` and value in `[-span, span]`.
pub fn rational<R: Rng>(rng: &mut R, max_den: i64, span: i64) -> ExactScalar {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-span * den..=span * den);
    ExactScalar::ratio(num, den)
}

/// Random `p + q·√2` with small rational parts; `q` may be zero.
pub fn quadratic<R: Rng>(rng: &mut R, max_den: i64) -> ExactScalar {
    let a = rational(rng, max_den, 2);
    let b = rational(rng, max_den, 1);
    ExactScalar::new(a.rat().clone(), b.rat().clone())
}

/// Uniform integer in `[-bound, bound]` as a `BigInt`.
pub fn int<R: Rng>(rng: &mut R, bound: i64) -> BigInt {
    if bound == 0 {
        return BigInt::zero();
    }
    BigInt::from(rng.gen_range(-bound..=bound))
}

/// Random `ε, δ` satisfying the descent condition of `c` for the map itself.
pub fn gluing_valid_params<R: Rng>(rng: &mut R, c: &Classification) -> Result<AffineParams> {
    let a = &c.a1;
    let a3 = a.a3.clone();
    let k = |rng: &mut R| ExactScalar::from(rng.gen_range(-6i64..=6));
    let (eps, delta) = match c.case_tag {
        CaseTag::I => {
            let d = a - &IntMatrix2::identity();
            let det = d.det();
            if !det.is_zero() {
                // e = (A - I)⁻¹·k
                let adj = d.adjugate();
                let (k1, k2) = (k(rng), k(rng));
                let det = ExactScalar::from(&det);
                ((&k1 * &adj.a1 + &k2 * &adj.a3) / &det, (&k1 * &adj.a2 + &k2 * &adj.a4) / &det)
            } else if d.is_zero() {
                (quadratic(rng, 6), quadratic(rng, 6))
            } else {
                // kernel of A - I, spanned by (-row2, row1) of a nonzero row
                let (r1, r2) = if d.a1.is_zero() && d.a3.is_zero() { (&d.a2, &d.a4) } else { (&d.a1, &d.a3) };
                let s = quadratic(rng, 6);
                (&s * &-r2.clone(), &s * r1)
            }
        }
        CaseTag::II => {
            let delta = if a3.is_zero() { quadratic(rng, 6) } else { k(rng) / ExactScalar::from(&a3) };
            (quadratic(rng, 6), delta)
        }
        CaseTag::III => {
            let g = BigInt::from(2).gcd(&a3);
            (quadratic(rng, 6), k(rng) / ExactScalar::from(&g))
        }
        CaseTag::IV | CaseTag::V => {
            let delta = if c.case_tag == CaseTag::IV { k(rng) / ExactScalar::from(2) } else { quadratic(rng, 6) };
            let eps = (&delta * &a3 + k(rng)) / ExactScalar::from(2);
            (eps, delta)
        }
    };
    AffineParams::from_map(&c.map(), eps, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::check_gluing;
    use crate::classification::classify;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_classify_to_their_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let inst = classified_instance(&mut rng, 5);
            assert_eq!(classify(&inst.bundle, &inst.map).unwrap().case_tag, inst.case_tag);
        }
    }

    #[test]
    fn generated_params_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..300 {
            let inst = classified_instance(&mut rng, 5);
            let c = classify(&inst.bundle, &inst.map).unwrap();
            let p = gluing_valid_params(&mut rng, &c).unwrap();
            assert!(check_gluing(c.case_tag, &c.bundle(), &p, 1), "{c:?} {p:?}");
        }
    }
}
