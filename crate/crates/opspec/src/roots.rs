//! Real root isolation and refinement.
//!
//! Polynomial roots are isolated by derivative recursion: between two
//! consecutive critical points the polynomial is strictly monotone, so a
//! sign change there brackets exactly one root. The only numerical
//! primitive this relies on is point evaluation, which stays accurate even
//! when coefficients span a hundred orders of magnitude (the series
//! truncations handled here routinely do; remainder-sequence methods
//! degrade badly on them). Even-multiplicity roots touch zero without a
//! sign change and are caught by a floor test at the critical points
//! themselves; that detection is best-effort by nature. Function-handle
//! roots use a geometric scan plus bisection, which is enough for
//! integrands known to cross exactly once.

use rug::ops::CompleteRound;

use crate::error::Error;
use crate::num::{rexp2, rint, Prec, Real};
use crate::poly::UniPoly;

/// Default relative tolerance exponent for refined roots: `2^-128`.
pub fn default_tol(prec: Prec) -> Real {
    rexp2(prec, crate::DEFAULT_TOL_EXP)
}

fn sign_of(x: &Real) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_sign_negative() {
        -1
    } else {
        1
    }
}

/// `sum |a_k| |x|^k`, the magnitude budget of an evaluation at `x`: the
/// scale against which a computed `p(x)` is indistinguishable from zero.
fn eval_budget(p: &UniPoly, x: &Real, prec: Prec) -> Real {
    let ax = x.clone().abs();
    let mut budget = rexp2(prec, -(prec as i32) * 2);
    let mut xp = rint(prec, 1);
    for c in p.coeffs() {
        budget += (c.clone().abs()) * &xp;
        xp *= &ax;
    }
    budget
}

/// Roots by derivative recursion: the critical points of `p` split the
/// line into monotonicity intervals, each holding at most one root.
fn isolate(p: &UniPoly, prec: Prec, tol_rel: &Real) -> Vec<Real> {
    let deg = p.degree().expect("nonzero polynomial");
    if deg == 0 {
        return Vec::new();
    }
    let c = p.coeffs();
    if deg == 1 {
        return vec![(-c[0].clone()) / &c[1]];
    }

    let bound = p.cauchy_root_bound();
    let mut nodes = vec![-bound.clone()];
    for t in isolate(&p.derivative(), prec, tol_rel) {
        // Critical points beyond the root bound cannot flank a root.
        if t > *nodes.last().unwrap() && t < bound {
            nodes.push(t);
        }
    }
    nodes.push(bound);

    // Signs at the nodes; a value below the evaluation noise floor counts
    // as a root in its own right (even-multiplicity touch, best-effort).
    let floor = rexp2(prec, -(prec as i32) / 2);
    let mut roots = Vec::new();
    let signs: Vec<i8> = nodes
        .iter()
        .map(|x| {
            let v = p.eval(x);
            if v.clone().abs() <= (&floor * &eval_budget(p, x, prec)).complete(prec) {
                roots.push(x.clone());
                0
            } else {
                sign_of(&v)
            }
        })
        .collect();
    for i in 0..nodes.len() - 1 {
        if signs[i] != 0 && signs[i + 1] != 0 && signs[i] != signs[i + 1] {
            roots.push(refine(p, nodes[i].clone(), nodes[i + 1].clone(), prec, tol_rel));
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Distinct real roots of `p` in increasing order, refined to relative
/// tolerance `tol_rel`. The zero polynomial has every point as a root and
/// is rejected; a nonzero constant has none.
pub fn real_roots(p: &UniPoly, prec: Prec, tol_rel: &Real) -> Result<Vec<Real>, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut roots = isolate(p, prec, tol_rel);
    roots.dedup_by(|x, y| {
        let gap = (&*x - &*y).complete(prec).abs();
        let scale = Real::with_val(prec, 1).max(&x.clone().abs());
        gap <= scale * (tol_rel * &rint(prec, 4)).complete(prec)
    });
    Ok(roots)
}

/// Newton iteration guarded by a sign-change bracket. A Newton step is
/// taken only when it stays inside the bracket and is at most half the
/// step before last; otherwise the iteration bisects, so the bracket
/// width shrinks geometrically no matter how the polynomial behaves.
/// Brackets here can open at the coefficient-ratio root bound, many
/// orders of magnitude beyond the largest root, and unguarded Newton
/// crawls down such a tail by a factor (d-1)/d per step; the halving
/// rule is what keeps that descent bounded.
fn refine(p: &UniPoly, lo: Real, hi: Real, prec: Prec, tol_rel: &Real) -> Real {
    let dp = p.derivative();
    let flo = p.eval(&lo);
    if flo.is_zero() {
        return lo;
    }
    let fhi = p.eval(&hi);
    if fhi.is_zero() {
        return hi;
    }
    if sign_of(&flo) == sign_of(&fhi) {
        // The counting said one root is here but the sign test cannot see
        // it (residual even-multiplicity cluster after inexact square-free
        // reduction). Return the midpoint; it is within the bracket width.
        return ((&lo + &hi).complete(prec)) / rint(prec, 2);
    }

    // Orient the bracket by sign: f(xl) < 0 < f(xh).
    let (mut xl, mut xh) = if flo.is_sign_negative() { (lo, hi) } else { (hi, lo) };
    let mut x: Real = ((&xl + &xh).complete(prec)) / rint(prec, 2);
    let mut dx = (&xh - &xl).complete(prec).abs();
    for _ in 0..(4 * prec as usize) {
        let fx = p.eval(&x);
        if fx.is_zero() {
            return x;
        }
        if fx.is_sign_negative() {
            xl = x.clone();
        } else {
            xh = x.clone();
        }
        let width = (&xh - &xl).complete(prec).abs();
        let scale = Real::with_val(prec, 1).max(&x.clone().abs());
        if width <= (tol_rel * &scale).complete(prec) {
            break;
        }
        let dxold = dx;
        let dfx = dp.eval(&x);
        let newton = if dfx.is_zero() {
            None
        } else {
            let step = fx / &dfx;
            let cand = (&x - &step).complete(prec);
            let inside = (cand > xl) != (cand > xh);
            let step_abs = step.abs();
            if inside && step_abs.clone() * &rint(prec, 2) <= dxold {
                Some((cand, step_abs))
            } else {
                None
            }
        };
        match newton {
            Some((cand, step_abs)) => {
                dx = step_abs;
                x = cand;
            }
            None => {
                dx = width / rint(prec, 2);
                x = ((&xl + &xh).complete(prec)) / rint(prec, 2);
            }
        }
    }
    ((&xl + &xh).complete(prec)) / rint(prec, 2)
}

/// Smallest positive root of the polynomial, `None` if it has no positive
/// root.
pub fn min_positive_root_poly(
    p: &UniPoly,
    prec: Prec,
    tol_rel: &Real,
) -> Result<Option<Real>, Error> {
    let roots = real_roots(p, prec, tol_rel)?;
    Ok(roots.into_iter().find(|r| *r > 0))
}

/// Smallest root of `f` in `(0, hi]` for a continuous `f` with `f(0+) > 0`,
/// refined by bisection to relative tolerance `tol_rel`. Returns `None`
/// when no sign change is detected; the scan is geometric over 96 octaves
/// below `hi` followed by two linear rescans, so a crossing can only be
/// missed if `f` dips below zero and returns inside one scan cell.
pub fn min_positive_root_fn<F>(
    f: F,
    hi: &Real,
    prec: Prec,
    tol_rel: &Real,
) -> Result<Option<Real>, Error>
where
    F: Fn(&Real) -> Real,
{
    if !(hi.is_finite() && *hi > 0) {
        return Err(Error::DomainError("search ceiling must be positive and finite".into()));
    }
    let eval = |x: &Real| -> Result<Real, Error> {
        let v = f(x);
        if v.is_nan() {
            return Err(Error::DomainError(format!("objective not finite at {x}")));
        }
        Ok(v)
    };

    // Geometric grid: hi * 2^(-96 + 96 i / 384).
    let mut bracket: Option<(Real, Real)> = None;
    let steps = 384u32;
    let ratio = rexp2(prec, 96).root(steps); // 2^(96/384) per step
    let mut x = (hi * &rexp2(prec, -96)).complete(prec);
    let mut prev_x = x.clone();
    let mut prev_f = eval(&x)?;
    if prev_f.is_zero() {
        return Ok(Some(x));
    }
    if prev_f.is_sign_negative() {
        // Already negative at the bottom of the scan: the crossing is
        // below; bracket against (effectively) zero.
        bracket = Some(((hi * &rexp2(prec, -(prec as i32))).complete(prec), x.clone()));
    }
    if bracket.is_none() {
        for _ in 0..steps {
            x = (&x * &ratio).complete(prec);
            if x > *hi {
                x = hi.clone();
            }
            let fx = eval(&x)?;
            if fx.is_zero() {
                return Ok(Some(x));
            }
            if sign_of(&fx) != sign_of(&prev_f) {
                bracket = Some((prev_x, x.clone()));
                break;
            }
            prev_x = x.clone();
            prev_f = fx;
        }
    }

    // Linear rescans at increasing density for crossings the geometric
    // grid stepped over.
    if bracket.is_none() {
        'outer: for n in [512u32, 4096] {
            let h = (hi / &rint(prec, n as i64)).complete(prec);
            let mut a = h.clone();
            let mut fa = eval(&a)?;
            if fa.is_zero() {
                return Ok(Some(a));
            }
            for k in 2..=n {
                let b = (&h * &rint(prec, k as i64)).complete(prec);
                let fb = eval(&b)?;
                if fb.is_zero() {
                    return Ok(Some(b));
                }
                if sign_of(&fb) != sign_of(&fa) {
                    bracket = Some((a, b));
                    break 'outer;
                }
                a = b;
                fa = fb;
            }
        }
    }

    let Some((mut lo, mut hi_b)) = bracket else {
        return Ok(None);
    };
    let mut flo = eval(&lo)?;
    for _ in 0..(prec as usize + 64) {
        let width = (&hi_b - &lo).complete(prec);
        let scale = Real::with_val(prec, 1).min(&hi_b.clone().abs());
        if width <= (tol_rel * &scale).complete(prec) {
            break;
        }
        let mid: Real = ((&lo + &hi_b).complete(prec)) / rint(prec, 2);
        let fm = eval(&mid)?;
        if fm.is_zero() {
            return Ok(Some(mid));
        }
        if sign_of(&fm) == sign_of(&flo) {
            lo = mid;
            flo = fm;
        } else {
            hi_b = mid;
        }
    }
    Ok(Some(((&lo + &hi_b).complete(prec)) / rint(prec, 2)))
}
