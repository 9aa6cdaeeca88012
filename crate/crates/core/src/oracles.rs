//! Slow, independent reference computations used to cross-check the fast
//! paths. None of these share code with the routines they check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::affine::AffineParams;
use crate::matrix::IntMatrix2;
use crate::scalar::ExactScalar;

/// Number of points `x ∈ [0,1)²` with `M·x ∈ Z²`, found by enumerating the
/// grid `(1/d)·Z²` with `d = |det M|`. `None` when `M` is singular or too
/// large to enumerate.
pub fn lattice_fixed_count(m: &IntMatrix2) -> Option<BigInt> {
    let d = m.det().abs();
    if d.is_zero() {
        return None;
    }
    let d = d.to_i128().filter(|&d| d <= 1 << 24)?;
    let e = [m.a1.to_i128()?, m.a2.to_i128()?, m.a3.to_i128()?, m.a4.to_i128()?].map(|v| v.rem_euclid(d));
    let g = e[2].gcd(&d);
    let step = d / g;
    // inverse of a3/g modulo d/g
    let inv = if step == 1 { 0 } else { (e[2] / g).extended_gcd(&step).x.rem_euclid(step) };
    let mut count: u64 = 0;
    // Solutions lie in M⁻¹Z² ⊂ (1/d)Z², so x = k/d with k ∈ [0,d)².
    for k1 in 0..d {
        // a1·k1 + a3·k2 ≡ 0 (mod d)
        let rhs = (-(e[0] * k1)).rem_euclid(d);
        if rhs % g != 0 {
            continue;
        }
        let mut k2 = ((rhs / g) * inv).rem_euclid(step.max(1));
        while k2 < d {
            if (e[1] * k1 + e[3] * k2) % d == 0 {
                count += 1;
            }
            k2 += step;
        }
    }
    Some(BigInt::from(count))
}

/// Diagonal form `U·G·V = diag(d1, d2)` by elementary row and column moves.
/// Only `U` and the diagonal are tracked; `V` is never needed for membership.
fn smith(g: [[BigInt; 2]; 2]) -> ([[BigInt; 2]; 2], [BigInt; 2]) {
    let mut a = g;
    let mut u = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    loop {
        // pivot: smallest nonzero entry moved to (0,0)
        let mut pivot = None;
        for i in 0..2 {
            for j in 0..2 {
                if !a[i][j].is_zero() && pivot.map_or(true, |(pi, pj): (usize, usize)| a[i][j].abs() < a[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            return (u, [BigInt::zero(), BigInt::zero()]);
        };
        if pi == 1 {
            a.swap(0, 1);
            u.swap(0, 1);
        }
        if pj == 1 {
            for row in a.iter_mut() {
                row.swap(0, 1);
            }
        }
        let p = a[0][0].clone();
        let q_row = a[1][0].div_floor(&p);
        let q_col = a[0][1].div_floor(&p);
        for j in 0..2 {
            let t = &a[0][j] * &q_row;
            a[1][j] -= t;
            let t = &u[0][j] * &q_row;
            u[1][j] -= t;
        }
        for row in a.iter_mut() {
            let t = &row[0] * &q_col;
            row[1] -= t;
        }
        if a[1][0].is_zero() && a[0][1].is_zero() {
            if (&a[1][1] % &a[0][0]).is_zero() {
                return (u, [a[0][0].clone(), a[1][1].clone()]);
            }
            // fold the second row into the first to restore divisibility
            let row1 = a[1].clone();
            let urow1 = u[1].clone();
            for j in 0..2 {
                a[0][j] += &row1[j];
                u[0][j] += &urow1[j];
            }
        }
    }
}

/// Whether `(x, y)` lies in the lattice spanned by the two generators,
/// decided through the diagonal form of the generator matrix.
pub fn snf_member(x: &BigInt, y: &BigInt, gens: [(i64, i64); 2]) -> bool {
    let g = [
        [BigInt::from(gens[0].0), BigInt::from(gens[1].0)],
        [BigInt::from(gens[0].1), BigInt::from(gens[1].1)],
    ];
    let (u, d) = smith(g);
    // v ∈ G·Z² iff U·v ∈ diag(d)·Z²
    let w = [&u[0][0] * x + &u[0][1] * y, &u[1][0] * x + &u[1][1] * y];
    w.iter().zip(d.iter()).all(|(wi, di)| if di.is_zero() { wi.is_zero() } else { (wi % di).is_zero() })
}

/// Affine form `cy·y + ct·t + c0` (the `x` coefficient is always 1 for the
/// first coordinate and 0 for the second, so it is not stored).
#[derive(Clone)]
struct Form {
    cy: ExactScalar,
    ct: ExactScalar,
    c0: ExactScalar,
}

/// A fixed point of `fⁿ` with lift `(a, b)`, found by trying each lift in the
/// window `|a|, |b| ≤ bound` in order of `(|a|, |b|, a, b)`. The iterate is
/// obtained by composing the one-step map `n` times on symbolic forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowHit {
    pub a: BigInt,
    pub b: BigInt,
    pub y: ExactScalar,
    pub t: ExactScalar,
}

pub fn window_scan(p: &AffineParams, n: u64, bound: u64) -> Option<WindowHit> {
    let z = ExactScalar::zero;
    // x-displacement and y-coordinate after k steps
    let mut dx = Form { cy: z(), ct: z(), c0: z() };
    let mut y = Form { cy: ExactScalar::one(), ct: z(), c0: z() };
    for _ in 0..n {
        let b3 = ExactScalar::from(&p.b3);
        let b4 = ExactScalar::from(&p.b4);
        dx = Form {
            cy: &dx.cy + &(&b3 * &y.cy),
            ct: &dx.ct + &(&b3 * &y.ct) + ExactScalar::from(&p.c1),
            c0: &dx.c0 + &(&b3 * &y.c0) + &p.eps,
        };
        y = Form {
            cy: &b4 * &y.cy,
            ct: &b4 * &y.ct + ExactScalar::from(&p.c2),
            c0: &b4 * &y.c0 + &p.delta,
        };
    }
    let dy = Form { cy: &y.cy - &ExactScalar::one(), ..y };
    let bound = bound as i64;
    let mut lifts: Vec<(i64, i64)> = (-bound..=bound).flat_map(|a| (-bound..=bound).map(move |b| (a, b))).collect();
    lifts.sort_by_key(|&(a, b)| (a.abs(), b.abs(), a, b));
    lifts.into_iter().find_map(|(a, b)| {
        let rhs = [ExactScalar::from(a) - &dx.c0, ExactScalar::from(b) - &dy.c0];
        solve_box([[&dx.cy, &dx.ct], [&dy.cy, &dy.ct]], &rhs)
            .map(|(y, t)| WindowHit { a: a.into(), b: b.into(), y, t })
    })
}

/// Some `(y, t) ∈ [0,1) × [0,1]` with `m·(y, t) = rhs`.
fn solve_box(m: [[&ExactScalar; 2]; 2], rhs: &[ExactScalar; 2]) -> Option<(ExactScalar, ExactScalar)> {
    let inside = |y: &ExactScalar, t: &ExactScalar| {
        !y.is_negative() && *y < ExactScalar::one() && !t.is_negative() && *t <= ExactScalar::one()
    };
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !det.is_zero() {
        let y = (&rhs[0] * m[1][1] - &rhs[1] * m[0][1]) / &det;
        let t = (&rhs[1] * m[0][0] - &rhs[0] * m[1][0]) / &det;
        return inside(&y, &t).then_some((y, t));
    }
    // A solution line through the box also crosses y = 0, t = 0 or t = 1.
    let one_unknown = |col: usize, fixed: &ExactScalar| -> Option<ExactScalar> {
        let other = 1 - col;
        let mut val: Option<ExactScalar> = None;
        for i in 0..2 {
            let v = &rhs[i] - &(m[i][other] * fixed);
            if m[i][col].is_zero() {
                if !v.is_zero() {
                    return None;
                }
            } else {
                let c = &v / m[i][col];
                if val.as_ref().is_some_and(|w| *w != c) {
                    return None;
                }
                val = Some(c);
            }
        }
        Some(val.unwrap_or_else(ExactScalar::zero))
    };
    let y0 = ExactScalar::zero();
    if let Some(t) = one_unknown(1, &y0) {
        if inside(&y0, &t) {
            return Some((y0, t));
        }
    }
    for t in [ExactScalar::zero(), ExactScalar::one()] {
        if let Some(y) = one_unknown(0, &t) {
            if inside(&y, &t) {
                return Some((y, t));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_counts() {
        let m = IntMatrix2::from_rows([[1, 1], [1, 0]]);
        assert_eq!(lattice_fixed_count(&m), Some(BigInt::from(1)));
        let m = IntMatrix2::from_rows([[2, 0], [0, 3]]);
        assert_eq!(lattice_fixed_count(&m), Some(BigInt::from(6)));
        assert_eq!(lattice_fixed_count(&IntMatrix2::zero()), None);
    }

    #[test]
    fn window_scan_examples() {
        let p = AffineParams::new(0, 2, 1, 1, ExactScalar::ratio(1, 3), ExactScalar::ratio(1, 5));
        let hit = window_scan(&p, 1, 4).expect("solvable");
        // x + t + 1/3 = x + a and 2y + t + 1/5 = y + b
        assert_eq!(ExactScalar::from(&hit.a), &hit.t + &ExactScalar::ratio(1, 3));
        let p = AffineParams::new(0, 1, 1, 1, ExactScalar::sqrt2(), ExactScalar::zero());
        assert_eq!(window_scan(&p, 3, 6), None);
    }

    #[test]
    fn membership() {
        let b = |v: i64| BigInt::from(v);
        let gens = [(2, 1), (4, 6)];
        // lattice has index 8 and contains (6, 7)
        assert!(snf_member(&b(6), &b(7), gens));
        assert!(!snf_member(&b(1), &b(0), gens));
        assert!(snf_member(&b(0), &b(0), [(0, 0), (0, 0)]));
        assert!(snf_member(&b(0), &b(3), [(0, 0), (0, 1)]));
        assert!(!snf_member(&b(1), &b(3), [(0, 0), (0, 1)]));
    }
}
