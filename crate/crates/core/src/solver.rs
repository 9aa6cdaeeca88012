//! Exact solver for the periodic-point equations of affine torus-bundle maps.
//!
//! The unknowns are a fiber coordinate `y ∈ [0, 1)`, a parameter
//! `s ∈ [s_lo, s_hi]` and integer lifts `(a, b)` with
//!
//! ```text
//! M·(y, s) + r = (a, b)
//! ```
//!
//! where `M` is an integer matrix and `r` has entries in `Q(√2)`. The solver
//! is complete: it either returns a solution or proves that none exists.
//! Among all solutions it prefers the one minimizing `(|a|, |b|, a, b)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{ext_gcd, IntMatrix2, IntVec2};
use crate::scalar::ExactScalar;

/// Above this many candidate values of `a`, rank-two systems skip the
/// minimizing scan and return a canonical cell representative instead.
pub const SCAN_LIMIT: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSystem {
    /// Columns act on `y` and `s` respectively.
    pub m: IntMatrix2,
    pub r: [ExactScalar; 2],
    pub s_lo: ExactScalar,
    pub s_hi: ExactScalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSolution {
    pub y: ExactScalar,
    pub s: ExactScalar,
    pub a: BigInt,
    pub b: BigInt,
    /// `M = 0` and `r ∈ Z²`: every point solves the system.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptinessKind {
    /// An integer would have to equal a number with nonzero `√2` part.
    Irrational,
    /// An integer would have to equal a non-integral rational.
    NonIntegral,
    /// The admissible parameter range contains no lattice point.
    NoLatticePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptinessProof {
    pub kind: EmptinessKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    Found(LiftSolution),
    Empty(EmptinessProof),
}

fn scalar(v: &BigInt) -> ExactScalar {
    ExactScalar::from(v)
}

fn lift_key(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    (a.abs(), b.abs(), a.clone(), b.clone())
}

fn non_integer(value: &ExactScalar, what: &str) -> EmptinessProof {
    if value.quad().is_zero() {
        EmptinessProof { kind: EmptinessKind::NonIntegral, detail: format!("{what} = {value} must be an integer") }
    } else {
        EmptinessProof { kind: EmptinessKind::Irrational, detail: format!("{what} = {value} must be an integer but is irrational") }
    }
}

/// Integer interval, unbounded where `None`.
#[derive(Clone, Debug, Default)]
struct IntRange {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

impl IntRange {
    fn raise_lo(&mut self, v: BigInt) {
        if self.lo.as_ref().map_or(true, |lo| v > *lo) {
            self.lo = Some(v);
        }
    }

    fn lower_hi(&mut self, v: BigInt) {
        if self.hi.as_ref().map_or(true, |hi| v < *hi) {
            self.hi = Some(v);
        }
    }

    fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(lo), Some(hi)) if lo > hi)
    }

    /// Restricts to integers `k` with `lo ≤ c0 + c1·k ≤ hi`, where a strict
    /// flag turns the matching side into `<`. Returns false if nothing is left.
    fn constrain(&mut self, c0: &ExactScalar, c1: &ExactScalar, lo: &ExactScalar, hi: &ExactScalar, hi_strict: bool) -> bool {
        if c1.is_zero() {
            let ok = c0 >= lo && if hi_strict { c0 < hi } else { c0 <= hi };
            if !ok {
                self.lo = Some(BigInt::one());
                self.hi = Some(BigInt::zero());
            }
            return ok;
        }
        let from_lo = (lo - c0) / c1;
        let from_hi = (hi - c0) / c1;
        if c1.is_positive() {
            self.raise_lo(from_lo.ceil());
            self.lower_hi(if hi_strict { from_hi.ceil() - 1 } else { from_hi.floor() });
        } else {
            self.lower_hi(from_lo.floor());
            self.raise_lo(if hi_strict { from_hi.floor() + 1 } else { from_hi.ceil() });
        }
        !self.is_empty()
    }

    /// The element closest to zero, ties going to the negative side.
    fn nearest_zero(&self) -> Option<BigInt> {
        if self.is_empty() {
            return None;
        }
        let zero = BigInt::zero();
        Some(match (&self.lo, &self.hi) {
            (Some(lo), _) if *lo > zero => lo.clone(),
            (_, Some(hi)) if *hi < zero => hi.clone(),
            _ => zero,
        })
    }
}

pub fn solve(sys: &LiftSystem) -> LiftOutcome {
    let m = &sys.m;
    if m.is_zero() {
        return solve_rank_zero(sys);
    }
    if m.det().is_zero() {
        solve_rank_one(sys)
    } else {
        solve_rank_two(sys)
    }
}

fn solve_rank_zero(sys: &LiftSystem) -> LiftOutcome {
    for (i, name) in [(0, "first offset"), (1, "second offset")] {
        if !sys.r[i].is_integer() {
            return LiftOutcome::Empty(non_integer(&sys.r[i], name));
        }
    }
    LiftOutcome::Found(LiftSolution {
        y: ExactScalar::zero(),
        s: sys.s_lo.clone(),
        a: sys.r[0].to_integer().expect("integral"),
        b: sys.r[1].to_integer().expect("integral"),
        degenerate: true,
    })
}

fn primitive_direction(m: &IntMatrix2) -> IntVec2 {
    let col = if m.col1().is_zero() { m.col2() } else { m.col1() };
    let g = col.content();
    let d = IntVec2 { x: &col.x / &g, y: &col.y / &g };
    if d.x.is_negative() || (d.x.is_zero() && d.y.is_negative()) {
        -&d
    } else {
        d
    }
}

/// Integer `k` with `col = k·d` for a column parallel to `d`.
fn multiple_of(col: &IntVec2, d: &IntVec2) -> BigInt {
    if !d.x.is_zero() {
        &col.x / &d.x
    } else {
        &col.y / &d.y
    }
}

fn solve_rank_one(sys: &LiftSystem) -> LiftOutcome {
    let d = primitive_direction(&sys.m);
    let alpha = multiple_of(&sys.m.col1(), &d);
    let beta = multiple_of(&sys.m.col2(), &d);
    let [r1, r2] = &sys.r;

    // (p, q)·(a, b) is the same for every point of the image line.
    let along = r1 * &d.y - r2 * &d.x;
    if !along.is_integer() {
        return LiftOutcome::Empty(non_integer(&along, "the lift combination across the image line"));
    }
    // r + w·d is integral exactly when w ≡ -(u, v)·r mod 1, where u·d1 + v·d2 = 1.
    let (_, u, v) = ext_gcd(&d.x, &d.y);
    let sigma = -(r1 * &scalar(&u) + r2 * &scalar(&v));

    // Range of w = alpha·y + beta·s.
    let (bs_lo, bs_hi) = {
        let p = &sys.s_lo * &scalar(&beta);
        let q = &sys.s_hi * &scalar(&beta);
        if p <= q { (p, q) } else { (q, p) }
    };
    let alpha_s = scalar(&alpha);
    let (w_lo, w_hi, lo_open, hi_open) = if alpha.is_positive() {
        (bs_lo, bs_hi + &alpha_s, false, true)
    } else if alpha.is_negative() {
        (bs_lo + &alpha_s, bs_hi, true, false)
    } else {
        (bs_lo, bs_hi, false, false)
    };
    let j_lo = if lo_open { (&w_lo - &sigma).floor() + 1 } else { (&w_lo - &sigma).ceil() };
    let j_hi = if hi_open { (&w_hi - &sigma).ceil() - 1 } else { (&w_hi - &sigma).floor() };
    if j_lo > j_hi {
        return LiftOutcome::Empty(EmptinessProof {
            kind: EmptinessKind::NoLatticePoint,
            detail: format!("no integer point on the image segment for parameter values in [{w_lo}, {w_hi}]"),
        });
    }

    let base_a = (r1 + &sigma * &scalar(&d.x)).to_integer().expect("integral by construction");
    let base_b = (r2 + &sigma * &scalar(&d.y)).to_integer().expect("integral by construction");
    let lift = |j: &BigInt| (&base_a + j * &d.x, &base_b + j * &d.y);
    let clamp = |j: BigInt| j.max(j_lo.clone()).min(j_hi.clone());

    let mut candidates = vec![j_lo.clone(), j_hi.clone()];
    let (num, den) = if !d.x.is_zero() { (-&base_a, d.x.clone()) } else { (-&base_b, d.y.clone()) };
    let root = num.div_floor(&den);
    candidates.push(clamp(root.clone()));
    candidates.push(clamp(root + 1));
    let j = candidates
        .into_iter()
        .min_by_key(|j| {
            let (a, b) = lift(j);
            lift_key(&a, &b)
        })
        .expect("nonempty");
    let (a, b) = lift(&j);
    let w = &sigma + scalar(&j);

    let (y, s) = recover_point(&w, &alpha, &beta, &sys.s_lo, &sys.s_hi).expect("w lies in the admissible range");
    LiftOutcome::Found(LiftSolution { y, s, a, b, degenerate: false })
}

/// Some `(y, s) ∈ [0,1) × [s_lo, s_hi]` with `alpha·y + beta·s = w`.
fn recover_point(w: &ExactScalar, alpha: &BigInt, beta: &BigInt, s_lo: &ExactScalar, s_hi: &ExactScalar) -> Option<(ExactScalar, ExactScalar)> {
    let zero = ExactScalar::zero();
    let one = ExactScalar::one();
    if !beta.is_zero() {
        let s = w / &scalar(beta);
        if &s >= s_lo && &s <= s_hi {
            return Some((zero, s));
        }
    }
    if !alpha.is_zero() {
        for s in [s_lo, s_hi] {
            let y = (w - s * &scalar(beta)) / scalar(alpha);
            if y >= zero && y < one {
                return Some((y, s.clone()));
            }
        }
    }
    None
}

fn solve_rank_two(sys: &LiftSystem) -> LiftOutcome {
    let m = &sys.m;
    let r1 = &sys.r[0];
    let (lo, hi) = {
        let m12 = scalar(&m.a3);
        let ends = [&sys.s_lo * &m12, &sys.s_hi * &m12];
        let (s_min, s_max) = if ends[0] <= ends[1] { (ends[0].clone(), ends[1].clone()) } else { (ends[1].clone(), ends[0].clone()) };
        let m11 = scalar(&m.a1);
        let (y_min, y_max) = if m.a1.is_positive() { (ExactScalar::zero(), m11) } else { (m11, ExactScalar::zero()) };
        ((r1 + &y_min + &s_min).floor(), (r1 + &y_max + &s_max).ceil())
    };
    let width = (&hi - &lo).to_u64_digits();
    let span_small = width.0 != num_bigint::Sign::Minus && width.1.len() <= 1 && width.1.first().copied().unwrap_or(0) <= SCAN_LIMIT;
    if span_small && (&sys.s_hi - &sys.s_lo) >= ExactScalar::zero() {
        if let Some(sol) = scan_rank_two(sys, &lo, &hi) {
            return LiftOutcome::Found(sol);
        }
        if &sys.s_hi - &sys.s_lo < ExactScalar::one() {
            return LiftOutcome::Empty(EmptinessProof {
                kind: EmptinessKind::NoLatticePoint,
                detail: "every candidate lift leaves the parameter box".into(),
            });
        }
    }
    LiftOutcome::Found(cell_representative(sys))
}

fn b_range_for(sys: &LiftSystem, a: &BigInt) -> IntRange {
    let m = &sys.m;
    let det = scalar(&m.det());
    let [r1, r2] = &sys.r;
    let da = scalar(a) - r1;
    // (y, s) = M⁻¹·((a, b) - r)
    let y0 = (&da * &scalar(&m.a4) + r2 * &scalar(&m.a3)) / &det;
    let yb = -scalar(&m.a3) / &det;
    let s0 = (-(&da * &scalar(&m.a2)) - r2 * &scalar(&m.a1)) / &det;
    let sb = scalar(&m.a1) / &det;
    let mut range = IntRange::default();
    if range.constrain(&y0, &yb, &ExactScalar::zero(), &ExactScalar::one(), true) {
        range.constrain(&s0, &sb, &sys.s_lo, &sys.s_hi, false);
    }
    range
}

fn point_for(sys: &LiftSystem, a: &BigInt, b: &BigInt) -> (ExactScalar, ExactScalar) {
    let m = &sys.m;
    let det = scalar(&m.det());
    let da = scalar(a) - &sys.r[0];
    let db = scalar(b) - &sys.r[1];
    let y = (&da * &scalar(&m.a4) - &db * &scalar(&m.a3)) / &det;
    let s = (&db * &scalar(&m.a1) - &da * &scalar(&m.a2)) / &det;
    (y, s)
}

fn scan_rank_two(sys: &LiftSystem, lo: &BigInt, hi: &BigInt) -> Option<LiftSolution> {
    // Visit a in order of |a|; for equal |a| the better b decides.
    let zero = BigInt::zero();
    let start = zero.clone().max(lo.clone()).min(hi.clone());
    let reach = (hi - &start).max(&start - lo);
    let mut step = BigInt::zero();
    let mut best: Option<(BigInt, BigInt)> = None;
    let mut best_abs_a: Option<BigInt> = None;
    while step <= reach {
        for a in [&start - &step, &start + &step] {
            if a < *lo || a > *hi {
                continue;
            }
            if let Some(bound) = &best_abs_a {
                if a.abs() > *bound {
                    continue;
                }
            }
            if let Some(b) = b_range_for(sys, &a).nearest_zero() {
                let better = best.as_ref().map_or(true, |(ba, bb)| lift_key(&a, &b) < lift_key(ba, bb));
                if better {
                    best_abs_a = Some(a.abs());
                    best = Some((a, b));
                }
            }
            if step.is_zero() {
                break;
            }
        }
        if let Some(bound) = &best_abs_a {
            // Later steps can only reach larger |a| once both sides passed it.
            if (&start - &step).abs() > *bound && (&start + &step).abs() > *bound {
                break;
            }
        }
        step += 1;
    }
    best.map(|(a, b)| {
        let (y, s) = point_for(sys, &a, &b);
        LiftSolution { y, s, a, b, degenerate: false }
    })
}

/// The unique lift whose preimage lies in `[0,1) × [s_lo, s_lo + 1)`.
fn cell_representative(sys: &LiftSystem) -> LiftSolution {
    let m = &sys.m;
    let guess = (sys.r[0].floor(), sys.r[1].floor());
    let (y, s) = point_for(sys, &guess.0, &guess.1);
    let ky = y.floor();
    let ks = (&s - &sys.s_lo).floor();
    let shift = m.apply(&IntVec2 { x: ky.clone(), y: ks.clone() });
    let a = &guess.0 - &shift.x;
    let b = &guess.1 - &shift.y;
    let (y, s) = (y - scalar(&ky), s - scalar(&ks));
    LiftSolution { y, s, a, b, degenerate: false }
}

/// `M·(y, s) + r - (a, b)`, zero for a genuine solution.
pub fn residual(sys: &LiftSystem, sol: &LiftSolution) -> [ExactScalar; 2] {
    let m = &sys.m;
    let x = &sol.y * &scalar(&m.a1) + &sol.s * &scalar(&m.a3) + &sys.r[0] - scalar(&sol.a);
    let y = &sol.y * &scalar(&m.a2) + &sol.s * &scalar(&m.a4) + &sys.r[1] - scalar(&sol.b);
    [x, y]
}
