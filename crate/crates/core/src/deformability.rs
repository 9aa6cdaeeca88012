//! Deciding when `f` or `fⁿ` is fiberwise homotopic to a fixed-point-free map,
//! and whether a single `g ≃ f` can make `gⁿ` fixed-point free.
//!
//! Every verdict carries a clause id naming the condition that decided it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::classification::{CaseTag, Classification};
use crate::error::{Error, Result};

/// The two sublattices of `Z²` that appear in the case IV exceptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuotientLattice {
    /// `⟨(1,2), (0,4)⟩`
    Skew,
    /// `⟨(2,0), (0,2)⟩`
    Even,
}

impl QuotientLattice {
    pub fn generators(self) -> [(i64, i64); 2] {
        match self {
            QuotientLattice::Skew => [(1, 2), (0, 4)],
            QuotientLattice::Even => [(2, 0), (0, 2)],
        }
    }
}

/// Whether `(x, y)` lies in the sublattice, i.e. its class in the quotient is zero.
pub fn quotient_member(x: &BigInt, y: &BigInt, lattice: QuotientLattice) -> bool {
    match lattice {
        QuotientLattice::Skew => (y - x * BigInt::from(2)).mod_floor(&BigInt::from(4)).is_zero(),
        QuotientLattice::Even => x.is_even() && y.is_even(),
    }
}

/// Normal-form data of a classified pair together with an iterate count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionContext {
    pub case_tag: CaseTag,
    #[serde(with = "crate::serde_int")]
    pub a3: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b3: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b4: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c1: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c2: BigInt,
    pub n: u64,
}

impl ConditionContext {
    /// Checks the side condition of the case and that `n ≥ 1`.
    pub fn new(
        case_tag: CaseTag,
        a3: impl Into<BigInt>,
        b3: impl Into<BigInt>,
        b4: impl Into<BigInt>,
        c1: impl Into<BigInt>,
        c2: impl Into<BigInt>,
        n: u64,
    ) -> Result<Self> {
        let ctx = Self { case_tag, a3: a3.into(), b3: b3.into(), b4: b4.into(), c1: c1.into(), c2: c2.into(), n };
        if n == 0 {
            return Err(Error::ZeroIterate);
        }
        let lhs = &ctx.a3 * (&ctx.b4 - BigInt::one());
        let ok = match case_tag {
            CaseTag::I => ctx.b3.is_zero() && ctx.b4.is_one(),
            CaseTag::II | CaseTag::IV => lhs.is_zero(),
            CaseTag::III => lhs == -(&ctx.b3 * BigInt::from(2)),
            CaseTag::V => lhs == &ctx.b3 * 2,
        };
        if !ok {
            return Err(Error::InvalidContext(format!(
                "case {case_tag} side condition fails for a3 = {}, b3 = {}, b4 = {}",
                ctx.a3, ctx.b3, ctx.b4
            )));
        }
        Ok(ctx)
    }

    pub fn from_classification(c: &Classification, n: u64) -> Result<Self> {
        Self::new(c.case_tag, c.a3().clone(), c.b3().clone(), c.b4().clone(), c.c1().clone(), c.c2().clone(), n)
    }

    pub fn with_n(&self, n: u64) -> Self {
        Self { n, ..self.clone() }
    }

    /// `gcd(b4 - 1, c2)`, undefined when both vanish.
    pub fn l(&self) -> Option<BigInt> {
        let g = (&self.b4 - BigInt::one()).gcd(&self.c2);
        (!g.is_zero()).then_some(g)
    }

    /// `c1(b4 - 1) - c2·b3`.
    pub fn invariant(&self) -> BigInt {
        &self.c1 * (&self.b4 - BigInt::one()) - &self.c2 * &self.b3
    }

    fn b4_minus_one_over_l_odd(&self) -> bool {
        let l = self.l().expect("b4 != 1 here");
        ((&self.b4 - BigInt::one()) / l).is_odd()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub deformable: bool,
    pub clause: String,
}

impl Verdict {
    fn new(deformable: bool, clause: impl Into<String>) -> Self {
        Self { deformable, clause: clause.into() }
    }
}

fn odd(x: &BigInt) -> bool {
    x.is_odd()
}

/// Deformability of `f` itself (the iterate count in `ctx` is ignored).
pub fn deformable_f(ctx: &ConditionContext) -> Verdict {
    let one = BigInt::one();
    let (a3, b3, b4, c1, c2) = (&ctx.a3, &ctx.b3, &ctx.b4, &ctx.c1, &ctx.c2);
    match ctx.case_tag {
        CaseTag::I => Verdict::new(true, "base/case-I/arbitrary"),
        CaseTag::II | CaseTag::III => {
            let tag = ctx.case_tag;
            if ctx.invariant().is_zero() {
                Verdict::new(true, format!("base/case-{tag}/invariant-zero"))
            } else {
                Verdict::new(false, format!("base/case-{tag}/invariant-nonzero"))
            }
        }
        CaseTag::IV => {
            let congruence = b4 * (b3 + &one) - &one - c1 * (b4 - &one) + b3 * c2;
            if odd(&congruence) {
                return Verdict::new(false, "base/case-IV/congruence-fails");
            }
            if odd(a3) && quotient_member(c1, c2, QuotientLattice::Skew) {
                return Verdict::new(false, "base/case-IV/exception-a3-odd");
            }
            if a3.is_even() && quotient_member(c1, c2, QuotientLattice::Even) {
                return Verdict::new(false, "base/case-IV/exception-a3-even");
            }
            Verdict::new(true, "base/case-IV/congruence-holds")
        }
        CaseTag::V => {
            if b4.is_one() {
                return Verdict::new(true, "base/case-V/b4=1-reroute-case-I");
            }
            if a3.is_even() {
                let y = c1 - (a3 / 2) * c2 - &one;
                if odd(&((b4 - &one) * &y)) {
                    Verdict::new(false, "base/case-V/a3-even/parity-fails")
                } else if odd(&y) && ctx.b4_minus_one_over_l_odd() {
                    Verdict::new(false, "base/case-V/a3-even/exception")
                } else {
                    Verdict::new(true, "base/case-V/a3-even/parity-holds")
                }
            } else {
                let w = c2 + &one;
                if odd(&(((b4 - &one) / 2) * &w)) {
                    Verdict::new(false, "base/case-V/a3-odd/parity-fails")
                } else if odd(&w) && ctx.b4_minus_one_over_l_odd() {
                    Verdict::new(false, "base/case-V/a3-odd/exception")
                } else {
                    Verdict::new(true, "base/case-V/a3-odd/parity-holds")
                }
            }
        }
    }
}

/// Deformability of `fⁿ` with `n = ctx.n`.
pub fn deformable_fn(ctx: &ConditionContext) -> Verdict {
    let one = BigInt::one();
    let n = BigInt::from(ctx.n);
    let n_even = ctx.n % 2 == 0;
    let (a3, b3, b4, c1, c2) = (&ctx.a3, &ctx.b3, &ctx.b4, &ctx.c1, &ctx.c2);
    match ctx.case_tag {
        CaseTag::I => Verdict::new(true, "iterate/case-I/arbitrary"),
        CaseTag::II | CaseTag::III => {
            let tag = ctx.case_tag;
            if ctx.invariant().is_zero() {
                Verdict::new(true, format!("iterate/case-{tag}/invariant-zero"))
            } else if n_even && *b4 == -BigInt::one() {
                Verdict::new(true, format!("iterate/case-{tag}/b4=-1-even-n"))
            } else {
                Verdict::new(false, format!("iterate/case-{tag}/invariant-nonzero"))
            }
        }
        CaseTag::IV => {
            let congruence =
                &n * (b4 * (b3 + &one) - &one - c1 * (b4 - &one) + b3 * c2) - (&n - &one) * (b4 - &one);
            if odd(&congruence) {
                return Verdict::new(false, "iterate/case-IV/congruence-fails");
            }
            let tri = &n * (&n - &one) / 2;
            if odd(a3) {
                let x = &n * c1 + &tri * b3 * c2;
                let y = &n * c2;
                if quotient_member(&x, &y, QuotientLattice::Skew) {
                    return Verdict::new(false, "iterate/case-IV/exception-a3-odd");
                }
            } else {
                let x = &n * c1 + &tri * b3 * b4 * c2;
                let y = c2 + (&n - &one) * b4 * c2;
                if quotient_member(&x, &y, QuotientLattice::Even) {
                    return Verdict::new(false, "iterate/case-IV/exception-a3-even");
                }
            }
            Verdict::new(true, "iterate/case-IV/congruence-holds")
        }
        CaseTag::V => {
            if b4.is_one() {
                return Verdict::new(true, "iterate/case-V/b4=1-reroute-case-I");
            }
            if a3.is_even() {
                let y = c1 - (a3 / 2) * c2 - &one;
                let parity = &n * (b4 - &one) * &y + (&n - &one) * (b4 - &one);
                let guard = &n * &y + (&n - &one);
                if odd(&parity) {
                    Verdict::new(false, "iterate/case-V/a3-even/parity-fails")
                } else if odd(&guard) && ctx.b4_minus_one_over_l_odd() {
                    Verdict::new(false, "iterate/case-V/a3-even/exception")
                } else {
                    Verdict::new(true, "iterate/case-V/a3-even/parity-holds")
                }
            } else {
                let w = (c2 + &one) * (&one + (&n - &one) * b4);
                if odd(&(((b4 - &one) / 2) * &w)) {
                    Verdict::new(false, "iterate/case-V/a3-odd/parity-fails")
                } else if odd(&w) && ctx.b4_minus_one_over_l_odd() {
                    Verdict::new(false, "iterate/case-V/a3-odd/exception")
                } else {
                    Verdict::new(true, "iterate/case-V/a3-odd/parity-holds")
                }
            }
        }
    }
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorRow {
    pub k: u64,
    pub deformable: bool,
    pub clause: String,
}

/// One row per divisor `k | n`. If some `fᵏ` cannot be deformed, no `g ≃ f`
/// has `gⁿ` fixed-point free, so `feasible` is the conjunction of the rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub case: CaseTag,
    pub n: u64,
    pub divisors: Vec<DivisorRow>,
    pub feasible: bool,
}

pub fn obstruction_report(ctx: &ConditionContext) -> ObstructionReport {
    let rows: Vec<DivisorRow> = divisors(ctx.n)
        .into_iter()
        .map(|k| {
            let v = deformable_fn(&ctx.with_n(k));
            DivisorRow { k, deformable: v.deformable, clause: v.clause }
        })
        .collect();
    let feasible = rows.iter().all(|r| r.deformable);
    ObstructionReport { case: ctx.case_tag, n: ctx.n, divisors: rows, feasible }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realizability {
    Realizable,
    NotRealizable,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityVerdict {
    pub verdict: Realizability,
    pub clause: String,
}

impl RealizabilityVerdict {
    fn new(verdict: Realizability, clause: impl Into<String>) -> Self {
        Self { verdict, clause: clause.into() }
    }
}

/// Whether some `g ≃ f` over the circle has `gⁿ` fixed-point free.
///
/// A failing divisor settles the question negatively in every case. Beyond
/// that, cases I and II are decided exactly; cases IV and V are decided only
/// under the known sufficient conditions, and case III is left open.
pub fn realizable_fixed_point_free(ctx: &ConditionContext) -> RealizabilityVerdict {
    use Realizability::*;
    let report = obstruction_report(ctx);
    if let Some(bad) = report.divisors.iter().find(|r| !r.deformable) {
        return RealizabilityVerdict::new(NotRealizable, format!("divisor-obstruction/k={}", bad.k));
    }
    let k_zero = ctx.invariant().is_zero();
    match ctx.case_tag {
        CaseTag::I => RealizabilityVerdict::new(Realizable, "witness/case-I/arbitrary"),
        CaseTag::II => {
            if k_zero {
                RealizabilityVerdict::new(Realizable, "witness/case-II/invariant-zero")
            } else {
                RealizabilityVerdict::new(NotRealizable, "witness/case-II/invariant-nonzero")
            }
        }
        CaseTag::III => RealizabilityVerdict::new(Undetermined, "witness/case-III/open"),
        CaseTag::IV | CaseTag::V => {
            let tag = ctx.case_tag;
            if k_zero && ctx.n % 2 == 1 {
                RealizabilityVerdict::new(Realizable, format!("witness/case-{tag}/invariant-zero-odd-n"))
            } else if k_zero && ctx.b4.is_odd() && ctx.n % 4 == 2 {
                RealizabilityVerdict::new(Realizable, format!("witness/case-{tag}/invariant-zero-b4-odd-n=4k+2"))
            } else {
                RealizabilityVerdict::new(Undetermined, format!("witness/case-{tag}/no-sufficient-condition"))
            }
        }
    }
}

/// The serializable summary of all decision procedures for one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformabilityReport {
    pub case: CaseTag,
    pub n: u64,
    pub divisors: Vec<DivisorRow>,
    pub realizable: RealizabilityVerdict,
}

pub fn deformability_report(ctx: &ConditionContext) -> DeformabilityReport {
    let obstruction = obstruction_report(ctx);
    DeformabilityReport {
        case: ctx.case_tag,
        n: ctx.n,
        divisors: obstruction.divisors,
        realizable: realizable_fixed_point_free(ctx),
    }
}
