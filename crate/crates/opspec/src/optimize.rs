//! Scalar minimization on an interval: coarse sampling to pick a basin,
//! then golden-section refinement. Objectives may return `+inf` (open-set
//! boundaries); comparisons treat NaN as `+inf` so poles cannot capture the
//! minimum.

use rug::ops::CompleteRound;

use crate::error::Error;
use crate::num::{rinf, rint, Prec, Real};

fn val_or_inf(v: Real, prec: Prec) -> Real {
    if v.is_nan() {
        rinf(prec)
    } else {
        v
    }
}

/// Minimizes `f` on `[lo, hi]`: 128 interior samples select the basin
/// (leftmost minimal sample on ties), golden-section narrows it to width
/// `tol_abs`. Returns `(argmin, f(argmin))`. Errors with `DomainError` when
/// every sample is non-finite.
pub fn minimize_scalar<F>(
    f: F,
    lo: &Real,
    hi: &Real,
    prec: Prec,
    tol_abs: &Real,
) -> Result<(Real, Real), Error>
where
    F: Fn(&Real) -> Real,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::DomainError("invalid minimization interval".into()));
    }
    // Promote the endpoints so every sample carries the working precision
    // even when the caller's bounds are stored at fewer bits.
    let lo = &Real::with_val(prec, lo);
    let hi = &Real::with_val(prec, hi);
    let n = 128u32;
    let span = (hi - lo).complete(prec);
    let step = (&span / &rint(prec, (n + 1) as i64)).complete(prec);

    let mut best_i = 0usize;
    let mut best_v = rinf(prec);
    let mut xs = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let x = lo.clone() + (&step * &rint(prec, i as i64)).complete(prec);
        let v = val_or_inf(f(&x), prec);
        if v < best_v {
            best_v = v.clone();
            best_i = xs.len();
        }
        xs.push(x);
    }
    if !best_v.is_finite() {
        return Err(Error::DomainError("objective has no finite value on the interval".into()));
    }

    let mut a = if best_i == 0 { lo.clone() } else { xs[best_i - 1].clone() };
    let mut b = if best_i + 1 == xs.len() { hi.clone() } else { xs[best_i + 1].clone() };

    // Golden section: keep the interior point with the smaller value.
    let phi = (Real::with_val(prec, 5).sqrt() + 1) / rint(prec, 2);
    let mut c: Real = b.clone() - (&b - &a).complete(prec) / &phi;
    let mut d: Real = a.clone() + (&b - &a).complete(prec) / &phi;
    let mut fc = val_or_inf(f(&c), prec);
    let mut fd = val_or_inf(f(&d), prec);
    while (&b - &a).complete(prec) > *tol_abs {
        if fc <= fd {
            b = d;
            d = c.clone();
            fd = fc;
            c = b.clone() - (&b - &a).complete(prec) / &phi;
            fc = val_or_inf(f(&c), prec);
        } else {
            a = c;
            c = d.clone();
            fc = fd;
            d = a.clone() + (&b - &a).complete(prec) / &phi;
            fd = val_or_inf(f(&d), prec);
        }
    }
    let x: Real = ((&a + &b).complete(prec)) / rint(prec, 2);
    let v = val_or_inf(f(&x), prec);
    Ok((x, v))
}
