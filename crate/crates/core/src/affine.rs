//! Affine representatives of normalized fibered maps on `T × [0,1]`, their
//! exact iterates, the descent condition, and periodic-point search.
//!
//! In the normalized basis the representative is
//!
//! ```text
//! f(x, y, t) = (x + b3·y + c1·t + ε,  b4·y + c2·t + δ,  t)
//! ```
//!
//! and its n-th iterate is `Bⁿ(x, y) + t·(c1n, c2n) + eₙ` with
//! `eₙ = (n·ε + b3·δ·S1, δ·S0)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleSpec, FiberedMapSpec};
use crate::classification::{CaseTag, Classification};
use crate::error::{Error, Result};
use crate::iterates::{geometric_sums, power_exponents};
use crate::matrix::IntMatrix2;
use crate::scalar::ExactScalar;
use crate::solver::{self, EmptinessKind, EmptinessProof, LiftOutcome, LiftSystem};

fn sc(v: &BigInt) -> ExactScalar {
    ExactScalar::from(v)
}

fn half() -> ExactScalar {
    ExactScalar::ratio(1, 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineParams {
    #[serde(with = "crate::serde_int")]
    pub b3: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b4: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c1: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c2: BigInt,
    pub eps: ExactScalar,
    pub delta: ExactScalar,
}

impl AffineParams {
    pub fn new(
        b3: impl Into<BigInt>,
        b4: impl Into<BigInt>,
        c1: impl Into<BigInt>,
        c2: impl Into<BigInt>,
        eps: ExactScalar,
        delta: ExactScalar,
    ) -> Self {
        Self { b3: b3.into(), b4: b4.into(), c1: c1.into(), c2: c2.into(), eps, delta }
    }

    /// Reads `b3, b4, c1, c2` off a normalized map.
    pub fn from_map(f: &FiberedMapSpec, eps: ExactScalar, delta: ExactScalar) -> Result<Self> {
        if !f.is_normalized() {
            return Err(Error::NotNormalized { b1: f.fiber.a1.clone(), b2: f.fiber.a2.clone() });
        }
        Ok(Self::new(f.b3().clone(), f.b4().clone(), f.c1().clone(), f.c2().clone(), eps, delta))
    }

    pub fn map(&self) -> FiberedMapSpec {
        FiberedMapSpec::normalized(self.b3.clone(), self.b4.clone(), self.c1.clone(), self.c2.clone())
    }

    /// Constant part `eₙ` of the n-th iterate.
    pub fn iterate_offset(&self, n: u64) -> [ExactScalar; 2] {
        let sums = geometric_sums(&self.b4, n);
        let nb = BigInt::from(n);
        [&self.eps * &nb + &self.delta * &(&self.b3 * &sums.s1), &self.delta * &sums.s0]
    }

    /// The periodic-point equations `xₙ = x + a`, `yₙ = y + b` as a lift
    /// system in the unknowns `(y, t)`.
    pub fn iterate_system(&self, n: u64) -> Result<LiftSystem> {
        let pe = power_exponents(&self.map(), n)?;
        let m = IntMatrix2 {
            a1: pe.b3n.clone(),
            a2: &pe.b4n - BigInt::one(),
            a3: pe.c1n.clone(),
            a4: pe.c2n.clone(),
        };
        Ok(LiftSystem { m, r: self.iterate_offset(n), s_lo: ExactScalar::zero(), s_hi: ExactScalar::one() })
    }
}

/// A point of `R² × [0,1]`, before reduction modulo the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: ExactScalar,
    pub y: ExactScalar,
    pub t: ExactScalar,
}

impl LiftedPoint {
    pub fn new(x: ExactScalar, y: ExactScalar, t: ExactScalar) -> Self {
        Self { x, y, t }
    }
}

pub fn one_step(p: &AffineParams, pt: &LiftedPoint) -> LiftedPoint {
    LiftedPoint {
        x: &pt.x + &(&pt.y * &p.b3) + &pt.t * &p.c1 + &p.eps,
        y: &pt.y * &p.b4 + &pt.t * &p.c2 + &p.delta,
        t: pt.t.clone(),
    }
}

/// `fⁿ` from the closed form, without composing steps.
pub fn iterate_closed_form(p: &AffineParams, pt: &LiftedPoint, n: u64) -> Result<LiftedPoint> {
    if n == 0 {
        return Ok(pt.clone());
    }
    let pe = power_exponents(&p.map(), n)?;
    let e = p.iterate_offset(n);
    Ok(LiftedPoint {
        x: &pt.x + &(&pt.y * &pe.b3n) + &pt.t * &pe.c1n + &e[0],
        y: &pt.y * &pe.b4n + &pt.t * &pe.c2n + &e[1],
        t: pt.t.clone(),
    })
}

/// `(A - I)·eₙ`; the n-th iterate descends to the bundle exactly when both
/// entries are integers.
pub fn descent_defect(a: &IntMatrix2, p: &AffineParams, n: u64) -> [ExactScalar; 2] {
    let e = p.iterate_offset(n);
    let d = a - &IntMatrix2::identity();
    [&e[0] * &d.a1 + &e[1] * &d.a3, &e[0] * &d.a2 + &e[1] * &d.a4]
}

/// The per-case descent condition for `fⁿ`, with `A` in normal form.
pub fn check_gluing(case: CaseTag, bundle: &BundleSpec, p: &AffineParams, n: u64) -> bool {
    let a = &bundle.gluing;
    let sums = geometric_sums(&p.b4, n);
    let nb = BigInt::from(n);
    let two = BigInt::from(2);
    let d_s0 = &p.delta * &sums.s0;
    // first entry of eₙ
    let x_off = &p.eps * &nb + &p.delta * &(&p.b3 * &sums.s1);
    match case {
        CaseTag::I => {
            let (ne, nd) = (&p.eps * &nb, &p.delta * &nb);
            let u = &ne * &a.a1 + &nd * &a.a3 - &ne;
            let v = &ne * &a.a2 + &nd * &a.a4 - &nd;
            u.is_integer() && v.is_integer()
        }
        CaseTag::II => (&d_s0 * &a.a3).is_integer(),
        CaseTag::III => (&d_s0 * &two).is_integer() && (&d_s0 * &a.a3).is_integer(),
        CaseTag::IV => (&d_s0 * &two).is_integer() && (&x_off * &two - &d_s0 * &a.a3).is_integer(),
        CaseTag::V => (&x_off * &two - &d_s0 * &a.a3).is_integer(),
    }
}

/// A point of the bundle: `x, y ∈ [0,1)` and `t ∈ [0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundlePoint {
    pub x: ExactScalar,
    pub y: ExactScalar,
    pub t: ExactScalar,
}

impl BundlePoint {
    /// Reduces `x, y` modulo 1. Fails if `t ∉ [0, 1]`.
    pub fn new(x: &ExactScalar, y: &ExactScalar, t: &ExactScalar) -> Result<Self> {
        if t.is_negative() || *t > ExactScalar::one() {
            return Err(Error::InvalidContext(format!("t = {t} is outside [0, 1]")));
        }
        Ok(Self { x: x.fract(), y: y.fract(), t: t.clone() })
    }

    pub fn from_lifted(pt: &LiftedPoint) -> Result<Self> {
        Self::new(&pt.x, &pt.y, &pt.t)
    }

    /// The representative with `t < 1`, using `(p, 0) ~ (A·p, 1)`.
    pub fn canonical(&self, a: &IntMatrix2) -> Result<Self> {
        if self.t < ExactScalar::one() {
            return Ok(self.clone());
        }
        let inv = a.inverse()?;
        let x = &self.x * &inv.a1 + &self.y * &inv.a3;
        let y = &self.x * &inv.a2 + &self.y * &inv.a4;
        Self::new(&x, &y, &ExactScalar::zero())
    }

    pub fn same_point(&self, other: &Self, a: &IntMatrix2) -> Result<bool> {
        Ok(self.canonical(a)? == other.canonical(a)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicSolution {
    pub point: BundlePoint,
    #[serde(with = "crate::serde_int")]
    pub a: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b: BigInt,
    pub n: u64,
    /// Every point of the bundle (or of one piece of it) is periodic.
    pub degenerate: bool,
}

impl PeriodicSolution {
    fn lifted(&self) -> LiftedPoint {
        LiftedPoint::new(self.point.x.clone(), self.point.y.clone(), self.point.t.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PeriodicOutcome {
    Solution(PeriodicSolution),
    NoneFound { search_bound: u64 },
    ProvenEmpty(EmptinessProof),
}

impl PeriodicOutcome {
    pub fn solution(&self) -> Option<&PeriodicSolution> {
        match self {
            Self::Solution(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_proven_empty(&self) -> bool {
        matches!(self, Self::ProvenEmpty(_))
    }
}

/// Decides whether `fⁿ` has a fixed point on the bundle. The search is
/// exact and complete, so the answer is always a solution or a proof.
pub fn find_periodic(p: &AffineParams, n: u64) -> Result<PeriodicOutcome> {
    let sys = p.iterate_system(n)?;
    Ok(match solver::solve(&sys) {
        LiftOutcome::Found(sol) => {
            let point = BundlePoint::new(&ExactScalar::zero(), &sol.y, &sol.s)?;
            let out = PeriodicSolution { point, a: sol.a, b: sol.b, n, degenerate: sol.degenerate };
            debug_assert!(verify_affine_solution(p, &out).unwrap_or(false));
            PeriodicOutcome::Solution(out)
        }
        LiftOutcome::Empty(proof) => PeriodicOutcome::ProvenEmpty(proof),
    })
}

/// Substitutes a solution into the closed form and checks the residual is zero.
pub fn verify_affine_solution(p: &AffineParams, sol: &PeriodicSolution) -> Result<bool> {
    let pt = sol.lifted();
    let img = iterate_closed_form(p, &pt, sol.n)?;
    Ok(img.t == pt.t && img.x - &pt.x == sc(&sol.a) && img.y - &pt.y == sc(&sol.b))
}

/// A map `g(p, t) = B·p + e(t)` with `B = [[1, b3], [0, 1]]` and `e` the
/// two-segment path from `e0` to `e1` that first moves `x` (for `t ≤ 1/2`)
/// and then `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPieceMap {
    #[serde(with = "crate::serde_int")]
    pub b3: BigInt,
    pub e0: [ExactScalar; 2],
    pub e1: [ExactScalar; 2],
}

impl TwoPieceMap {
    pub fn path(&self, t: &ExactScalar) -> [ExactScalar; 2] {
        let h = half();
        if *t <= h {
            let s = t * &ExactScalar::from(2);
            [&self.e0[0] + &(&s * &(&self.e1[0] - &self.e0[0])), self.e0[1].clone()]
        } else {
            let s = t * &ExactScalar::from(2) - ExactScalar::one();
            [self.e1[0].clone(), &self.e0[1] + &(&s * &(&self.e1[1] - &self.e0[1]))]
        }
    }

    /// `Σ_{i<n} Bⁱ` applied to `e`: `(n·e_x + b3·n(n-1)/2·e_y, n·e_y)`.
    fn summed(&self, e: &[ExactScalar; 2], n: u64) -> [ExactScalar; 2] {
        let nb = BigInt::from(n);
        let tri = &self.b3 * BigInt::from(n * n.saturating_sub(1) / 2);
        [&e[0] * &nb + &e[1] * &tri, &e[1] * &nb]
    }

    pub fn eval_iter(&self, pt: &LiftedPoint, n: u64) -> LiftedPoint {
        let e = self.summed(&self.path(&pt.t), n);
        let nb3 = &self.b3 * BigInt::from(n);
        LiftedPoint { x: &pt.x + &(&pt.y * &nb3) + &e[0], y: &pt.y + &e[1], t: pt.t.clone() }
    }

    /// The map descends when `e1 - A·e0` is integral.
    pub fn gluing_offset(&self, a: &IntMatrix2) -> [ExactScalar; 2] {
        let ae = [&self.e0[0] * &a.a1 + &self.e0[1] * &a.a3, &self.e0[0] * &a.a2 + &self.e0[1] * &a.a4];
        [&self.e1[0] - &ae[0], &self.e1[1] - &ae[1]]
    }

    pub fn find_periodic(&self, n: u64) -> Result<PeriodicOutcome> {
        if n == 0 {
            return Err(Error::ZeroIterate);
        }
        let two = ExactScalar::from(2);
        // piece k: e(s) = start + s·dir for s ∈ [0, 1], t = (k + s)/2
        let pieces = [
            (self.e0.clone(), [&self.e1[0] - &self.e0[0], ExactScalar::zero()]),
            ([self.e1[0].clone(), self.e0[1].clone()], [ExactScalar::zero(), &self.e1[1] - &self.e0[1]]),
        ];
        let mut best: Option<PeriodicSolution> = None;
        let mut proofs = Vec::new();
        for (k, (start, dir)) in pieces.iter().enumerate() {
            let p = self.summed(start, n);
            let d = self.summed(dir, n);
            // With b3 ≠ 0 the x-equation is met by a suitable y ∈ [0,1), so only
            // the y-component constrains s.
            let active: &[usize] = if self.b3.is_zero() { &[0, 1] } else { &[1] };
            match segment_lattice(&p, &d, active) {
                Ok((s, degenerate)) => {
                    let t = (sc(&BigInt::from(k as u64)) + &s) / &two;
                    let e = [&p[0] + &(&s * &d[0]), &p[1] + &(&s * &d[1])];
                    let b = e[1].to_integer().expect("integral");
                    let (y, a) = if self.b3.is_zero() {
                        (ExactScalar::zero(), e[0].to_integer().expect("integral"))
                    } else {
                        // a - e_x = n·b3·y with y ∈ [0, 1)
                        let nb3 = &self.b3 * BigInt::from(n);
                        let a = if nb3.is_positive() { e[0].ceil() } else { e[0].floor() };
                        ((sc(&a) - &e[0]) / sc(&nb3), a)
                    };
                    let sol = PeriodicSolution {
                        point: BundlePoint::new(&ExactScalar::zero(), &y, &t)?,
                        a,
                        b,
                        n,
                        degenerate: degenerate && self.b3.is_zero(),
                    };
                    let better = best.as_ref().map_or(true, |cur| {
                        (sol.a.abs(), sol.b.abs(), &sol.a, &sol.b) < (cur.a.abs(), cur.b.abs(), &cur.a, &cur.b)
                    });
                    if better {
                        best = Some(sol);
                    }
                }
                Err(proof) => proofs.push(proof),
            }
        }
        if let Some(sol) = best {
            return Ok(PeriodicOutcome::Solution(sol));
        }
        let kind = if proofs.iter().all(|p| p.kind == proofs[0].kind) { proofs[0].kind } else { EmptinessKind::NoLatticePoint };
        let detail = format!("first half: {}; second half: {}", proofs[0].detail, proofs[1].detail);
        Ok(PeriodicOutcome::ProvenEmpty(EmptinessProof { kind, detail }))
    }

    pub fn verify_solution(&self, sol: &PeriodicSolution) -> bool {
        let pt = sol.lifted();
        let img = self.eval_iter(&pt, sol.n);
        img.x - &pt.x == sc(&sol.a) && img.y - &pt.y == sc(&sol.b)
    }
}

/// Some `s ∈ [0, 1]` making `p_i + s·d_i` integral for every active `i`,
/// preferring small integer values. The flag reports that every `s` works.
fn segment_lattice(p: &[ExactScalar; 2], d: &[ExactScalar; 2], active: &[usize]) -> std::result::Result<(ExactScalar, bool), EmptinessProof> {
    let moving: Vec<usize> = active.iter().copied().filter(|&i| !d[i].is_zero()).collect();
    for &i in active {
        if d[i].is_zero() && !p[i].is_integer() {
            let kind = if p[i].quad().is_zero() { EmptinessKind::NonIntegral } else { EmptinessKind::Irrational };
            let coord = if i == 0 { "x" } else { "y" };
            return Err(EmptinessProof { kind, detail: format!("{coord}-displacement {} is constant and not an integer", p[i]) });
        }
    }
    let Some(&j) = moving.first() else {
        return Ok((ExactScalar::zero(), true));
    };
    let end = &p[j] + &d[j];
    let (lo, hi) = if d[j].is_positive() { (p[j].ceil(), end.floor()) } else { (end.ceil(), p[j].floor()) };
    let mut best: Option<(BigInt, ExactScalar)> = None;
    let mut k = lo.clone();
    while k <= hi {
        let s = (sc(&k) - &p[j]) / &d[j];
        if moving.iter().all(|&i| (&p[i] + &(&s * &d[i])).is_integer()) && best.as_ref().map_or(true, |(bk, _)| k.abs() < bk.abs()) {
            best = Some((k.clone(), s));
        }
        k += 1;
    }
    best.map(|(_, s)| (s, false)).ok_or_else(|| EmptinessProof {
        kind: EmptinessKind::NoLatticePoint,
        detail: format!("displacement sweeps [{}, {}] without meeting the lattice", p[j].clone().min(end.clone()), p[j].clone().max(end)),
    })
}

/// The witness map produced for the realizable cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessMap {
    Affine(AffineParams),
    TwoPiece(TwoPieceMap),
}

impl WitnessMap {
    pub fn eval_iter(&self, pt: &LiftedPoint, n: u64) -> Result<LiftedPoint> {
        match self {
            Self::Affine(p) => iterate_closed_form(p, pt, n),
            Self::TwoPiece(m) => Ok(m.eval_iter(pt, n)),
        }
    }

    pub fn find_periodic(&self, n: u64) -> Result<PeriodicOutcome> {
        match self {
            Self::Affine(p) => find_periodic(p, n),
            Self::TwoPiece(m) => m.find_periodic(n),
        }
    }

    pub fn verify_solution(&self, sol: &PeriodicSolution) -> Result<bool> {
        match self {
            Self::Affine(p) => verify_affine_solution(p, sol),
            Self::TwoPiece(m) => Ok(m.verify_solution(sol)),
        }
    }

    /// Whether the map is well defined on the bundle with gluing `a`.
    pub fn descends(&self, a: &IntMatrix2) -> bool {
        match self {
            Self::Affine(p) => descent_defect(a, p, 1).iter().all(ExactScalar::is_integer),
            Self::TwoPiece(m) => m.gluing_offset(a).iter().all(ExactScalar::is_integer),
        }
    }
}

/// A map fiberwise homotopic to the classified map whose iterates are all
/// fixed-point free, for case I and for case II with vanishing invariant.
pub fn build_main_theorem_g(c: &Classification) -> Result<WitnessMap> {
    let a = &c.a1;
    let (c1, c2) = (sc(c.c1()), sc(c.c2()));
    let r2 = ExactScalar::sqrt2();
    match c.case_tag {
        CaseTag::I => {
            let e0 = if (&a.a1 + &a.a3).is_zero() { [ExactScalar::zero(), r2] } else { [r2.clone(), r2] };
            let e1 = [&e0[0] * &a.a1 + &e0[1] * &a.a3 + &c1, &e0[0] * &a.a2 + &e0[1] * &a.a4 + &c2];
            Ok(WitnessMap::TwoPiece(TwoPieceMap { b3: BigInt::zero(), e0, e1 }))
        }
        CaseTag::II => {
            let f = c.map();
            let k = f.c1() * (f.b4() - BigInt::one()) - f.c2() * f.b3();
            if !k.is_zero() {
                return Err(Error::ConditionsNotMet(format!("case II needs c1(b4 - 1) - c2·b3 = 0, got {k}")));
            }
            if c.b4().is_one() && c.c2().is_zero() {
                // Constant irrational y-drift; descent forces the x-endpoint.
                let e0 = [ExactScalar::zero(), r2.clone()];
                let e1 = [&r2 * &a.a3 + &c1, r2];
                Ok(WitnessMap::TwoPiece(TwoPieceMap { b3: c.b3().clone(), e0, e1 }))
            } else {
                Ok(WitnessMap::Affine(AffineParams::from_map(&f, r2, ExactScalar::zero())?))
            }
        }
        other => Err(Error::ConditionsNotMet(format!("no witness construction for case {other}"))),
    }
}

/// Case I witness from user-supplied `ε, δ`, joining `(ε, δ)` to `(ε + c1, δ + c2)`.
/// Requires `(A - I)·(ε, δ) ∈ Z²`.
pub fn build_case_one_g(c: &Classification, eps: ExactScalar, delta: ExactScalar) -> Result<WitnessMap> {
    if c.case_tag != CaseTag::I {
        return Err(Error::ConditionsNotMet(format!("expected case I, got {}", c.case_tag)));
    }
    let e1 = [&eps + &sc(c.c1()), &delta + &sc(c.c2())];
    let g = TwoPieceMap { b3: BigInt::zero(), e0: [eps, delta], e1 };
    if !g.gluing_offset(&c.a1).iter().all(ExactScalar::is_integer) {
        return Err(Error::GluingViolation("(A - I)·(ε, δ) must be integral".into()));
    }
    Ok(WitnessMap::TwoPiece(g))
}
