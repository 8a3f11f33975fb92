//! Spectrum estimators built from truncated elementary-symmetric series.
//!
//! For a trace-class self-adjoint operator with eigenvalues `{lambda_i}`,
//! the entire function `g(x) = prod_i (1 + lambda_i x)` has zeros exactly at
//! `-1/lambda_i`, and its Taylor coefficients are the elementary symmetric
//! functions `e_k`. Truncating at degree `n` gives three estimators:
//!
//! * [`lambda_n`]: the whole approximate spectrum `{-1/x : g_n(x) = 0}`;
//! * [`q_n0`]: `-1/(least positive root of g_n)`, a fast estimate of the
//!   minimal eigenvalue (no positive root means no estimate at that order);
//! * [`q_nc`]: same with `g_n` replaced by `h_{n,c} = g_n - tail`, where the
//!   subtracted exponential tail turns the estimate into a certified lower
//!   bound, monotone in `n`, at the price of slower convergence.
//!
//! [`rate_report`] compares observed gaps against the closed-form
//! convergence bound for `q_{n,c}`.

use rug::ops::{CompleteRound, Pow};

use crate::elemsym::{check_ek_bound, ElemSymSequence};
use crate::error::Error;
use crate::num::{rexp2, rf64, rint, rzero, Prec, Real};
use crate::poly::UniPoly;
use crate::roots::{default_tol, min_positive_root_fn, min_positive_root_poly, real_roots};

/// Approximate point spectrum at truncation order `n`.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub n: u32,
    /// Elements sorted increasing. Never contains zero: every element is
    /// `-1/x` for a finite nonzero root `x`.
    pub lambda_set: Vec<Real>,
    /// The same elements sorted by decreasing magnitude.
    pub by_abs: Vec<Real>,
}

/// Which estimator produced a [`LowerBoundSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Truncated series roots alone (`q_{n,0}`); entries may be absent.
    Q0,
    /// Tail-corrected certified lower bounds (`q_{n,c}`).
    Qc,
}

/// Estimates indexed by consecutive orders `n`, starting at `start_n`.
#[derive(Debug, Clone)]
pub struct LowerBoundSeries {
    pub kind: SeriesKind,
    /// Tail weight; zero for the [`SeriesKind::Q0`] estimator.
    pub c: Real,
    pub start_n: u32,
    pub values: Vec<Option<Real>>,
}

impl LowerBoundSeries {
    pub fn n_at(&self, idx: usize) -> u32 {
        self.start_n + idx as u32
    }
}

/// Observed convergence gaps of a series against the closed-form rate bound.
#[derive(Debug, Clone)]
pub struct RateReport {
    /// `c / |lambda_min|`.
    pub alpha: Real,
    pub start_n: u32,
    /// `(e alpha / (n+1))^((n+1)/alpha)` per order; a bound on the implicit
    /// contraction factor once `n >= max(3, 2(alpha-1))`.
    pub delta_bound: Vec<Real>,
    /// `|q_n - lambda_min|` per order, absent where the series is.
    pub observed_gap: Vec<Option<Real>>,
    /// Orders where the gap exceeds the guaranteed
    /// `delta/(1-delta) * |lambda_min|` beyond rounding slack; empty means
    /// the observed convergence is consistent with the rate bound.
    pub flagged: Vec<u32>,
}

fn series_poly(e: &ElemSymSequence, n: u32) -> Result<UniPoly, Error> {
    if e.max_k() < n as usize {
        return Err(Error::InsufficientMoments { have: e.max_k(), need: n as usize });
    }
    Ok(UniPoly::new(e.e[..=n as usize].to_vec()))
}

/// The approximate spectrum `{-1/x : x real root of g_n}`, both sorted ways.
/// A vanishing `e_n` just lowers the degree. Roots are deduplicated by the
/// underlying isolation, so a degenerate (multiple) root contributes one
/// element.
pub fn lambda_n(e: &ElemSymSequence, n: u32) -> Result<SpectrumEstimate, Error> {
    let p = e.prec();
    let g = series_poly(e, n)?;
    let mut lambda_set: Vec<Real> = Vec::new();
    if g.degree().is_some_and(|d| d >= 1) {
        for x in real_roots(&g, p, &default_tol(p))? {
            // g(0) = e_0 = 1 bounds roots away from zero.
            lambda_set.push(-x.recip());
        }
    }
    lambda_set.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut by_abs = lambda_set.clone();
    by_abs.sort_by(|a, b| b.clone().abs().partial_cmp(&a.clone().abs()).unwrap());
    Ok(SpectrumEstimate { n, lambda_set, by_abs })
}

/// Hausdorff distance of two non-empty finite sets: the larger of the two
/// directed distances `max_x min_y |x - y|`.
pub fn hausdorff(a: &[Real], b: &[Real]) -> Result<Real, Error> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let p = a
        .iter()
        .chain(b)
        .map(|x| x.prec())
        .max()
        .unwrap();
    let directed = |from: &[Real], to: &[Real]| -> Real {
        let mut worst = rzero(p);
        for x in from {
            let mut best: Option<Real> = None;
            for y in to {
                let d = (x - y).complete(p).abs();
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
            let best = best.unwrap();
            if best > worst {
                worst = best;
            }
        }
        worst
    };
    let ab = directed(a, b);
    let ba = directed(b, a);
    Ok(if ab > ba { ab } else { ba })
}

/// `-1/(least positive root of g_n)`, `None` when `g_n` has no positive
/// root. Absence is meaningful data: reporting 0 instead would silently
/// assert the operator is positive semidefinite.
pub fn q_n0(e: &ElemSymSequence, n: u32) -> Result<Option<Real>, Error> {
    let p = e.prec();
    let g = series_poly(e, n)?;
    if g.degree() == Some(0) {
        return Ok(None);
    }
    let root = min_positive_root_poly(&g, p, &default_tol(p))?;
    Ok(root.map(|x| -x.recip()))
}

/// Exponential tail `sum_{k>n} t^k / k!` at working precision.
///
/// Two regimes: for `t < n/2` the direct difference `exp(t) - partial`
/// cancels catastrophically, so the tail is summed termwise (ratio below
/// 1/2, so `P + 17` terms reach full precision); otherwise the difference
/// is benign and uses one `exp`.
fn exp_tail(t: &Real, n: u32, p: Prec) -> Real {
    let half_n = (rint(p, n as i64)) / rint(p, 2);
    if *t < half_n {
        let mut term = t.clone().pow(n + 1) / Real::factorial(n + 1).complete(p);
        let mut sum = term.clone();
        let cutoff = rexp2(p, -(p as i32 + 16));
        let mut k = n + 2;
        for _ in 0..(2 * p + 64) {
            term *= (t / &rint(p, k as i64)).complete(p);
            sum += &term;
            if term <= (&sum * &cutoff).complete(p) {
                break;
            }
            k += 1;
        }
        sum
    } else {
        let mut partial = rzero(p);
        let mut term = rint(p, 1);
        partial += &term;
        for k in 1..=n {
            term *= (t / &rint(p, k as i64)).complete(p);
            partial += &term;
        }
        t.clone().exp() - partial
    }
}

/// `h_{n,c}(x) = sum_{k<=n} e_k x^k - sum_{k>n} (cx)^k / k!` for `x >= 0`.
pub fn h_nc(e: &ElemSymSequence, c: &Real, n: u32, x: &Real) -> Real {
    assert!(*x >= 0, "h is defined on the nonnegative half-line");
    assert!(*c > 0, "tail weight must be positive");
    assert!(e.max_k() >= n as usize, "series needs coefficients up to order n");
    let p = e.prec();
    let mut poly = rzero(p);
    for k in (0..=n as usize).rev() {
        poly = poly.mul_add(x, &e.e[k]);
    }
    let t = (c * x).complete(p);
    poly - exp_tail(&t, n, p)
}

/// Search ceiling for the least positive root of `h_{n,c}`: doubles until
/// the tail alone exceeds `sum |e_k| x^k + 1`, which forces `h < 0`.
fn q_nc_ceiling(e: &ElemSymSequence, c: &Real, n: u32, p: Prec) -> Real {
    let mut hi = rint(p, 1);
    for _ in 0..1024 {
        let mut dominated = rzero(p);
        for k in (0..=n as usize).rev() {
            dominated = dominated.mul_add(&hi, &e.e[k].clone().abs());
        }
        dominated += 1i32;
        let t = (c * &hi).complete(p);
        if exp_tail(&t, n, p) > dominated {
            return hi;
        }
        hi *= rint(p, 2);
    }
    hi
}

/// `-1/(least positive root of h_{n,c})`: a certified lower bound for the
/// minimal eigenvalue, provided `c` bounds the operator 1-norm. The budget
/// is verified through the coefficient bound `|e_k| <= c^k/k!`; a violation
/// is returned as an error because every conclusion downstream would be
/// unsound. The root always exists (`h(0) = 1`, `h -> -inf`).
pub fn q_nc(e: &ElemSymSequence, c: &Real, n: u32) -> Result<Real, Error> {
    if let Some(k) = check_ek_bound(e, c) {
        return Err(Error::BoundViolated { k });
    }
    let p = e.prec();
    let hi = q_nc_ceiling(e, c, n, p);
    let f = |x: &Real| h_nc(e, c, n, x);
    let root = min_positive_root_fn(f, &hi, p, &default_tol(p))?
        .ok_or_else(|| Error::DomainError("no sign change below the tail-dominance ceiling".into()))?;
    Ok(-root.recip())
}

/// `q_{n,0}` for `n = 1..=n_max`.
pub fn q0_series(e: &ElemSymSequence, n_max: u32) -> Result<LowerBoundSeries, Error> {
    let p = e.prec();
    let mut values = Vec::new();
    for n in 1..=n_max {
        values.push(q_n0(e, n)?);
    }
    Ok(LowerBoundSeries { kind: SeriesKind::Q0, c: rzero(p), start_n: 1, values })
}

/// `q_{n,c}` for `n = 1..=n_max`.
pub fn qc_series(e: &ElemSymSequence, c: &Real, n_max: u32) -> Result<LowerBoundSeries, Error> {
    let mut values = Vec::new();
    for n in 1..=n_max {
        values.push(Some(q_nc(e, c, n)?));
    }
    Ok(LowerBoundSeries { kind: SeriesKind::Qc, c: c.clone(), start_n: 1, values })
}

/// Compares a series against its guaranteed convergence rate toward a
/// reference minimal eigenvalue (which must be negative).
///
/// Per order: `delta = (e alpha/(n+1))^((n+1)/alpha)` with
/// `alpha = c/|lambda_min|`, and the guaranteed gap is
/// `delta/(1-delta) * |lambda_min|`. Orders are flagged when the observed
/// gap exceeds that by more than relative `1e-6`; the bound only applies
/// for `n >= max(3, 2(alpha-1))` and `delta < 1`, so other orders are never
/// flagged.
pub fn rate_report(series: &LowerBoundSeries, lambda_min_ref: &Real, c: &Real) -> RateReport {
    assert!(*lambda_min_ref < 0, "rate bound needs a negative minimal eigenvalue");
    let p = lambda_min_ref.prec().max(c.prec());
    let abs_l = lambda_min_ref.clone().abs();
    let alpha = (c / &abs_l).complete(p);
    let e1 = rint(p, 1).exp();
    let n_floor = {
        let two_am1 = (rint(p, 2) * (alpha.clone() - 1i32)).max(&rint(p, 3));
        two_am1
    };
    let slack = rint(p, 1) + rf64(p, 1e-6);

    let mut delta_bound = Vec::new();
    let mut observed_gap = Vec::new();
    let mut flagged = Vec::new();
    for (idx, v) in series.values.iter().enumerate() {
        let n = series.n_at(idx);
        let np1 = rint(p, (n + 1) as i64);
        let base = ((&e1 * &alpha).complete(p)) / &np1;
        let expo = (&np1 / &alpha).complete(p);
        let delta = base.pow(&expo);
        let gap = v.as_ref().map(|q| (q - lambda_min_ref).complete(p).abs());
        if let Some(g) = &gap {
            let n_ok = rint(p, n as i64) >= n_floor;
            if n_ok && delta < 1 {
                let guaranteed =
                    (&delta / &(rint(p, 1) - delta.clone())).complete(p) * &abs_l;
                if *g > guaranteed * &slack {
                    flagged.push(n);
                }
            }
        }
        delta_bound.push(delta);
        observed_gap.push(gap);
    }
    RateReport { alpha, start_n: series.start_n, delta_bound, observed_gap, flagged }
}
