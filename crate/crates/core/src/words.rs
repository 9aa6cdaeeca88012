//! Normal forms in the fundamental group of a torus bundle.
//!
//! The group is `⟨a, b, c | [a,b] = 1, c·a·c⁻¹ = a^a1 b^a2, c·b·c⁻¹ = a^a3 b^a4⟩`.
//! Every element has a unique form `a^p b^q c^r`; conjugation by `c^k` acts on
//! the exponent pair `(p, q)` as the matrix power `A^k`, so
//!
//! ```text
//! (v, r) · (w, s) = (v + A^r·w, r + s)
//! ```
//!
//! The engine only multiplies normal forms. It never uses closed-form sums,
//! which makes it usable as an independent check on the iterate formulas.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleSpec, FiberedMapSpec};
use crate::error::{Error, Result};
use crate::matrix::{IntMatrix2, IntVec2};

/// Default cap on the number of letters accepted by [`normalize`].
pub const DEFAULT_MAX_LETTERS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    A,
    B,
    C,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::A => "a",
            Generator::B => "b",
            Generator::C => "c",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub exponent: BigInt,
}

/// A word in `a, b, c`. Stored exponents are nonzero and adjacent letters
/// have different generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends `generator^exponent`, merging with the last letter when possible.
    pub fn push(&mut self, generator: Generator, exponent: impl Into<BigInt>) {
        let exponent = exponent.into();
        if exponent.is_zero() {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.generator == generator {
                last.exponent += exponent;
                if last.exponent.is_zero() {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push(Letter { generator, exponent });
    }

    pub fn with(mut self, generator: Generator, exponent: impl Into<BigInt>) -> Self {
        self.push(generator, exponent);
        self
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for l in &other.letters {
            out.push(l.generator, l.exponent.clone());
        }
        out
    }

    pub fn inverse(&self) -> Word {
        let mut out = Word::new();
        for l in self.letters.iter().rev() {
            out.push(l.generator, -&l.exponent);
        }
        out
    }
}

impl FromIterator<(Generator, BigInt)> for Word {
    fn from_iter<I: IntoIterator<Item = (Generator, BigInt)>>(iter: I) -> Self {
        let mut w = Word::new();
        for (g, e) in iter {
            w.push(g, e);
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                if l.exponent == BigInt::from(1) {
                    l.generator.to_string()
                } else {
                    format!("{}^{}", l.generator, l.exponent)
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Parses words such as `c a^2 b^-1` (letters separated by whitespace or `*`).
impl FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut w = Word::new();
        for token in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if token == "1" {
                continue;
            }
            let (g, e) = match token.split_once('^') {
                Some((g, e)) => (g, e.parse::<BigInt>().map_err(|_| format!("bad exponent in `{token}`"))?),
                None => (token, BigInt::from(1)),
            };
            let g = match g {
                "a" => Generator::A,
                "b" => Generator::B,
                "c" => Generator::C,
                _ => return Err(format!("unknown generator in `{token}`")),
            };
            w.push(g, e);
        }
        Ok(w)
    }
}

/// The element `a^p b^q c^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NormalForm {
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    #[serde(with = "crate::serde_int")]
    pub q: BigInt,
    #[serde(with = "crate::serde_int")]
    pub r: BigInt,
}

impl NormalForm {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>) -> Self {
        Self { p: p.into(), q: q.into(), r: r.into() }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn fiber(&self) -> IntVec2 {
        IntVec2 { x: self.p.clone(), y: self.q.clone() }
    }

    fn from_parts(v: IntVec2, r: BigInt) -> Self {
        Self { p: v.x, q: v.y, r }
    }

    pub fn to_word(&self) -> Word {
        Word::new()
            .with(Generator::A, self.p.clone())
            .with(Generator::B, self.q.clone())
            .with(Generator::C, self.r.clone())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} b^{} c^{}", self.p, self.q, self.r)
    }
}

/// Multiplication of normal forms for a fixed unimodular gluing matrix.
#[derive(Clone, Debug)]
pub struct GroupEngine {
    gluing: IntMatrix2,
    gluing_inv: IntMatrix2,
    max_letters: usize,
}

impl GroupEngine {
    pub fn new(bundle: &BundleSpec) -> Result<Self> {
        let gluing_inv = bundle.gluing.inverse()?;
        Ok(Self { gluing: bundle.gluing.clone(), gluing_inv, max_letters: DEFAULT_MAX_LETTERS })
    }

    pub fn with_max_letters(mut self, max_letters: usize) -> Self {
        self.max_letters = max_letters;
        self
    }

    /// `A^k` for any integer `k`, using the exact inverse for negative `k`.
    fn twist(&self, k: &BigInt) -> IntMatrix2 {
        if k.is_negative() {
            self.gluing_inv.pow_signed(&-k).expect("non-negative exponent")
        } else {
            self.gluing.pow_signed(k).expect("non-negative exponent")
        }
    }

    pub fn mul(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        let moved = self.twist(&x.r).apply(&y.fiber());
        NormalForm::from_parts(&x.fiber() + &moved, &x.r + &y.r)
    }

    pub fn inverse(&self, x: &NormalForm) -> NormalForm {
        let back = self.twist(&-&x.r).apply(&x.fiber());
        NormalForm::from_parts(-&back, -&x.r)
    }

    /// `x^e` by repeated squaring; negative exponents go through the inverse.
    pub fn pow(&self, x: &NormalForm, e: &BigInt) -> NormalForm {
        let mut base = if e.is_negative() { self.inverse(x) } else { x.clone() };
        let mut e = e.abs();
        let mut acc = NormalForm::identity();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e /= &two;
        }
        acc
    }

    pub fn generator(g: Generator) -> NormalForm {
        match g {
            Generator::A => NormalForm::new(1, 0, 0),
            Generator::B => NormalForm::new(0, 1, 0),
            Generator::C => NormalForm::new(0, 0, 1),
        }
    }

    pub fn normalize(&self, w: &Word) -> Result<NormalForm> {
        if w.len() > self.max_letters {
            return Err(Error::WordTooLong { len: w.len(), limit: self.max_letters });
        }
        Ok(w.letters().iter().fold(NormalForm::identity(), |acc, l| {
            let step = match l.generator {
                Generator::A => NormalForm::new(l.exponent.clone(), 0, 0),
                Generator::B => NormalForm::new(0, l.exponent.clone(), 0),
                Generator::C => NormalForm::new(0, 0, l.exponent.clone()),
            };
            self.mul(&acc, &step)
        }))
    }

    /// Image of a generator under `f#`.
    pub fn image(f: &FiberedMapSpec, g: Generator) -> NormalForm {
        match g {
            Generator::A => NormalForm::new(f.fiber.a1.clone(), f.fiber.a2.clone(), 0),
            Generator::B => NormalForm::new(f.fiber.a3.clone(), f.fiber.a4.clone(), 0),
            Generator::C => NormalForm::new(f.c1().clone(), f.c2().clone(), 1),
        }
    }

    /// `f#(a^p b^q c^r) = f#(a)^p · f#(b)^q · f#(c)^r`, normalized.
    pub fn apply_hom(&self, nf: &NormalForm, f: &FiberedMapSpec) -> NormalForm {
        let ia = self.pow(&Self::image(f, Generator::A), &nf.p);
        let ib = self.pow(&Self::image(f, Generator::B), &nf.q);
        let ic = self.pow(&Self::image(f, Generator::C), &nf.r);
        self.mul(&self.mul(&ia, &ib), &ic)
    }

    /// Applies `f#` `n` times.
    pub fn apply_hom_iter(&self, nf: &NormalForm, f: &FiberedMapSpec, n: u64) -> NormalForm {
        (0..n).fold(nf.clone(), |acc, _| self.apply_hom(&acc, f))
    }
}

/// Normal form of `w` in the fundamental group of the bundle.
pub fn normalize(w: &Word, bundle: &BundleSpec) -> Result<NormalForm> {
    GroupEngine::new(bundle)?.normalize(w)
}

pub fn apply_hom(nf: &NormalForm, f: &FiberedMapSpec, bundle: &BundleSpec) -> Result<NormalForm> {
    Ok(GroupEngine::new(bundle)?.apply_hom(nf, f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum HomValidity {
    Valid,
    Violation(String),
}

impl HomValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, HomValidity::Valid)
    }
}

/// Checks that `f#` respects the defining relations of the group.
///
/// Two routes are compared: the matrix condition `AB = BA`, and the word
/// engine evaluating `f#(c)·f#(x)·f#(c)⁻¹ = f#(c·x·c⁻¹)` for `x = a, b`.
pub fn validate_hom(f: &FiberedMapSpec, bundle: &BundleSpec) -> Result<HomValidity> {
    let engine = GroupEngine::new(bundle)?;
    let a = &bundle.gluing;
    let by_matrix = a.commutes_with(&f.fiber);

    let fc = GroupEngine::image(f, Generator::C);
    let fc_inv = engine.inverse(&fc);
    let mut failed = Vec::new();
    for (g, rel) in [(Generator::A, a.col1()), (Generator::B, a.col2())] {
        let lhs = engine.mul(&engine.mul(&fc, &GroupEngine::image(f, g)), &fc_inv);
        let rhs = engine.apply_hom(&NormalForm::new(rel.x, rel.y, 0), f);
        if lhs != rhs {
            failed.push(format!("f#(c {g} c^-1) = {rhs} but f#(c) f#({g}) f#(c)^-1 = {lhs}"));
        }
    }
    let by_words = failed.is_empty();
    if by_matrix != by_words {
        return Err(Error::InternalMismatch(format!(
            "commutation test says {by_matrix}, relation test says {by_words}"
        )));
    }
    if by_matrix {
        Ok(HomValidity::Valid)
    } else {
        let ab = a * &f.fiber;
        let ba = &f.fiber * a;
        Ok(HomValidity::Violation(format!("AB = {ab} differs from BA = {ba}; {}", failed.join("; "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tests::unimodular_from_word;
    use proptest::prelude::*;

    fn bundle(rows: [[i64; 2]; 2]) -> BundleSpec {
        BundleSpec::new(IntMatrix2::from_rows(rows))
    }

    fn w(text: &str) -> Word {
        text.parse().unwrap()
    }

    #[test]
    fn word_merging() {
        let word = w("a a^2 b b^-1 c");
        assert_eq!(word.to_string(), "a^3 c");
        assert_eq!(word.len(), 2);
        assert!(w("a a^-1").is_empty());
    }

    #[test]
    fn c_commutes_with_a_for_unipotent_gluing() {
        let m = bundle([[1, 1], [0, 1]]);
        assert_eq!(normalize(&w("c a"), &m).unwrap(), NormalForm::new(1, 0, 1));
    }

    #[test]
    fn fiber_words_are_abelian() {
        let m = bundle([[1, 1], [0, 1]]);
        assert_eq!(normalize(&w("a^2 b^3"), &m).unwrap(), NormalForm::new(2, 3, 0));
        assert_eq!(normalize(&w("b^3 a^2"), &m).unwrap(), NormalForm::new(2, 3, 0));
    }

    #[test]
    fn c_conjugates_b() {
        let m = bundle([[1, 1], [0, 1]]);
        assert_eq!(normalize(&w("c b"), &m).unwrap(), NormalForm::new(1, 1, 1));
    }

    #[test]
    fn negative_c_uses_inverse() {
        let m = bundle([[2, 1], [1, 1]]);
        // c⁻¹ a c = A⁻¹·(1,0) = (1,-1)
        assert_eq!(normalize(&w("c^-1 a c"), &m).unwrap(), NormalForm::new(1, -1, 0));
    }

    #[test]
    fn non_unimodular_rejected() {
        assert!(matches!(
            normalize(&w("a"), &bundle([[2, 0], [0, 1]])),
            Err(Error::NonUnimodular { .. })
        ));
    }

    #[test]
    fn length_cap() {
        let m = bundle([[1, 0], [0, 1]]);
        let engine = GroupEngine::new(&m).unwrap().with_max_letters(3);
        let long = w("a b a b");
        assert_eq!(engine.normalize(&long), Err(Error::WordTooLong { len: 4, limit: 3 }));
    }

    #[test]
    fn hom_images() {
        let m = bundle([[1, 1], [0, 1]]);
        let f = FiberedMapSpec::new(IntMatrix2::from_rows([[1, 2], [0, 1]]), IntVec2::new(0, 0));
        assert_eq!(apply_hom(&NormalForm::new(1, 0, 0), &f, &m).unwrap(), NormalForm::new(1, 0, 0));
        assert_eq!(apply_hom(&NormalForm::new(0, 1, 0), &f, &m).unwrap(), NormalForm::new(2, 1, 0));
        let g = FiberedMapSpec::new(IntMatrix2::from_rows([[1, 2], [0, 1]]), IntVec2::new(3, 5));
        assert_eq!(apply_hom(&NormalForm::new(0, 0, 1), &g, &m).unwrap(), NormalForm::new(3, 5, 1));
    }

    #[test]
    fn validate_examples() {
        let a = bundle([[1, 1], [0, 1]]);
        let f = FiberedMapSpec::new(IntMatrix2::from_rows([[1, 3], [0, 1]]), IntVec2::new(4, -1));
        assert_eq!(validate_hom(&f, &a).unwrap(), HomValidity::Valid);

        // AB = [[-1,-1],[0,1]] and BA = [[-1,1],[0,1]]
        let refl = bundle([[-1, 0], [0, 1]]);
        let g = FiberedMapSpec::new(IntMatrix2::from_rows([[1, 1], [0, 1]]), IntVec2::new(0, 0));
        assert!(!validate_hom(&g, &refl).unwrap().is_valid());

        let hyper = bundle([[2, 1], [1, 1]]);
        let id = FiberedMapSpec::new(IntMatrix2::identity(), IntVec2::new(7, -2));
        assert!(validate_hom(&id, &hyper).unwrap().is_valid());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..3, -4i64..5), 0..=12).prop_map(|ls| {
            ls.into_iter()
                .map(|(g, e)| ([Generator::A, Generator::B, Generator::C][g], BigInt::from(e)))
                .collect()
        })
    }

    fn arb_bundle() -> impl Strategy<Value = BundleSpec> {
        proptest::collection::vec(0usize..3, 0..6).prop_map(|wd| BundleSpec::new(unimodular_from_word(&wd)))
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(word in arb_word(), m in arb_bundle()) {
            let nf = normalize(&word, &m).unwrap();
            prop_assert_eq!(normalize(&nf.to_word(), &m).unwrap(), nf);
        }

        #[test]
        fn normalize_is_a_homomorphism(u in arb_word(), v in arb_word(), m in arb_bundle()) {
            let engine = GroupEngine::new(&m).unwrap();
            let joined = engine.normalize(&u.concat(&v)).unwrap();
            let product = engine.mul(&engine.normalize(&u).unwrap(), &engine.normalize(&v).unwrap());
            prop_assert_eq!(joined, product);
            let inv = engine.normalize(&u.inverse()).unwrap();
            prop_assert_eq!(engine.mul(&engine.normalize(&u).unwrap(), &inv), NormalForm::identity());
        }

        #[test]
        fn commuting_maps_are_homomorphisms(u in arb_word(), v in arb_word(), k in -3i64..4, c in (-4i64..5, -4i64..5)) {
            // B = A^k always commutes with A
            let m = BundleSpec::new(IntMatrix2::from_rows([[1, 2], [0, 1]]));
            let f = FiberedMapSpec::new(m.gluing.pow_signed(&k.into()).unwrap(), IntVec2::new(c.0, c.1));
            prop_assert!(validate_hom(&f, &m).unwrap().is_valid());
            let engine = GroupEngine::new(&m).unwrap();
            let nu = engine.normalize(&u).unwrap();
            let nv = engine.normalize(&v).unwrap();
            prop_assert_eq!(
                engine.apply_hom(&engine.mul(&nu, &nv), &f),
                engine.mul(&engine.apply_hom(&nu, &f), &engine.apply_hom(&nv, &f))
            );
        }
    }
}
