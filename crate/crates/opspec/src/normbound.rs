//! Trace-norm (Schatten 1-norm) upper bounds via Hilbert-Schmidt
//! factorization.
//!
//! Writing the operator as a product `K = K1 * K2` of Hilbert-Schmidt
//! operators bounds the 1-norm by `||K1||_2 ||K2||_2` (Holder). For a
//! Gaussian kernel an explicit one-parameter family of factorizations
//! exists in closed form; for a quadratic-polynomial Gaussian the same
//! exponential factors work and the polynomial part of `K2` follows from a
//! small linear system. Minimizing the product over the free parameter `w`
//! tightens the bound, which in turn bounds the negativity and the minimal
//! eigenvalue from one side.

use rug::ops::{CompleteRound, Pow};

use crate::error::Error;
use crate::kernel::{FactorKernel, GaussianKernel, Kernel, PolyGaussianKernel};
use crate::linalg::CMat;
use crate::num::{cabs, cnew, cre, rexp2, rinf, rint, rpi, rzero, Complex, Prec, Real};
use crate::optimize::minimize_scalar;
use crate::poly::MultiPoly;
use crate::wick::{compose, l2_norm_sq};

/// One explicit factorization `K = K1 * K2` at a fixed parameter `w`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub w: Real,
    pub k1: FactorKernel,
    pub k2: FactorKernel,
    /// Max pointwise `|compose(k1,k2) - K|` over the probe grid.
    pub residual: Real,
}

/// Optimized 1-norm bound and the eigenvalue bounds it implies.
#[derive(Debug, Clone)]
pub struct NormBoundResult {
    pub w_min: Real,
    /// `sqrt(R(w_min))`, an upper bound for `sum |lambda_i|`.
    pub bound_1norm: Real,
    /// The two searched `w`-intervals (after any extension).
    pub intervals: Vec<(Real, Real)>,
    /// `(bound_1norm - trace)/2 >= sum |min(lambda_i, 0)|`.
    pub neg_upper: Real,
    /// `-neg_upper <= lambda_min`.
    pub lambda_min_lower: Real,
}

/// The two open intervals of valid factorization parameters:
/// `(0, min(A,C))` and `(max(A,C), inf)`, the unbounded one truncated at
/// `10 max(A,C)` for searching (extended on demand by the minimizer).
pub fn allowed_w(a: &Real, c: &Real) -> [(Real, Real); 2] {
    let p = a.prec().max(c.prec());
    let mn = Real::with_val(p, a).min(&Real::with_val(p, c));
    let mx = Real::with_val(p, a).max(&Real::with_val(p, c));
    [(rzero(p), mn), (mx.clone(), rint(p, 10) * &mx)]
}

fn ensure_allowed(a: &Real, c: &Real, w: &Real) -> Result<(), Error> {
    let p = a.prec().max(c.prec());
    let mn = Real::with_val(p, a).min(&Real::with_val(p, c));
    let mx = Real::with_val(p, a).max(&Real::with_val(p, c));
    let inside = (*w > 0 && *w < mn) || *w > mx;
    if inside {
        Ok(())
    } else {
        Err(Error::DisallowedW { w: format!("{:e}", w.to_f64()) })
    }
}

/// Standard deviation of the probe grid: combines the decay rates of the
/// kernel envelope along the diagonal (`C`) and the anti-diagonal (`A`).
fn probe_sigma(a: &Real, c: &Real, p: Prec) -> Real {
    let var = ((a + c).complete(p)) / (rint(p, 8) * (a * c).complete(p));
    var.sqrt()
}

/// 15 equispaced probe abscissae spanning three standard deviations either
/// side of the origin. The grid is fixed, not tuned per kernel.
fn probe_points(sigma: &Real, p: Prec) -> Vec<Real> {
    let lo = rint(p, -3) * sigma;
    let step = (rint(p, 6) * sigma) / rint(p, 14);
    (0..15).map(|i| lo.clone() + &step * rint(p, i)).collect()
}

fn grid_residual(target: &FactorKernel, composed: &FactorKernel, grid: &[Real]) -> Real {
    let mut worst = rzero(target.prec);
    for x in grid {
        for y in grid {
            let d = composed.abs_diff_at(target, x, y);
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

#[cfg(test)]
fn max_abs_on_grid(k: &FactorKernel, grid: &[Real]) -> Real {
    let mut worst = rzero(k.prec);
    for x in grid {
        for y in grid {
            let v = cabs(&k.eval(x, y));
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

/// The closed-form factor pair for a Gaussian kernel at parameter `w`. The
/// first factor carries the printed normalization; the second has unit
/// scale.
fn gaussian_factors(k: &GaussianKernel, w: &Real) -> Result<(FactorKernel, FactorKernel), Error> {
    ensure_allowed(&k.a, &k.c, w)?;
    let p = k.prec;
    let (a, c) = (&k.a, &k.c);
    let neg_b = -k.b.clone();
    let neg_d = -k.d.clone();

    // First factor exponents: w + AC/w on the squares, -2(w - AC/w) on the
    // cross term, AE/w on the linear terms; the kernel phases B, D ride
    // along as imaginary parts with opposite signs on the two variables.
    let ac_over_w = ((a * c).complete(p)) / w;
    let sq1 = (w + &ac_over_w).complete(p);
    let cross1 = rint(p, -2) * ((w - &ac_over_w).complete(p));
    let lin1 = ((a * &k.e).complete(p)) / w;
    let a1 = cnew(p, &sq1, &k.b);
    let b1 = cnew(p, &sq1, &neg_b);
    let c1 = cre(p, &cross1);
    let d1 = cnew(p, &lin1, &k.d);
    let e1 = cnew(p, &lin1, &neg_d);

    let aw = (a - w).complete(p);
    let cw = (c - w).complete(p);
    let w2 = w.clone().square();
    let ac = (a * c).complete(p);
    let num = ((&w2 - &ac).complete(p)).square();
    let den = (w * &aw).complete(p) * &cw;
    let radicand = num / &den;
    if radicand < 0 {
        return Err(Error::NegativeRadicand);
    }
    let e_sq = k.e.clone().square();
    let exp_arg =
        -(((&ac - &w2).complete(p)) * &e_sq) / (rint(p, 4) * (w * &cw).complete(p) * c);
    let n1 = (rint(p, 2) * c.clone().sqrt() / rpi(p)) * radicand.sqrt() * exp_arg.exp();
    let k1 = FactorKernel {
        prefactor: MultiPoly::constant(2, cre(p, &rint(p, 1))),
        a: a1,
        b: b1,
        c: c1,
        d: d1,
        e: e1,
        scale: cre(p, &n1),
        prec: p,
    };

    // Second factor exponents: (A-w)C/(C-w) + A(C-w)/(A-w) on the squares,
    // twice their difference on the cross term, (A-w)E/(C-w) on the linear
    // terms; unit scale.
    let t1 = ((&aw * c).complete(p)) / &cw;
    let t2 = ((a * &cw).complete(p)) / &aw;
    let sq2 = (&t1 + &t2).complete(p);
    let cross2 = rint(p, 2) * ((&t1 - &t2).complete(p));
    let lin2 = ((&aw * &k.e).complete(p)) / &cw;
    let k2 = FactorKernel {
        prefactor: MultiPoly::constant(2, cre(p, &rint(p, 1))),
        a: cnew(p, &sq2, &k.b),
        b: cnew(p, &sq2, &neg_b),
        c: cre(p, &cross2),
        d: cnew(p, &lin2, &k.d),
        e: cnew(p, &lin2, &neg_d),
        scale: cre(p, &rint(p, 1)),
        prec: p,
    };
    Ok((k1, k2))
}

/// Factorizes a Gaussian kernel at parameter `w` and verifies the identity
/// `K(x,y) = int K1(x,z) K2(z,y) dz` on the probe grid.
pub fn decompose_gaussian(k: &GaussianKernel, w: &Real) -> Result<Decomposition, Error> {
    let (k1, k2) = gaussian_factors(k, w)?;
    let composed = compose(&k1, &k2)?;
    let grid = probe_points(&probe_sigma(&k.a, &k.c, k.prec), k.prec);
    let residual = grid_residual(&k.to_factor(), &composed, &grid);
    Ok(Decomposition { w: w.clone(), k1, k2, residual })
}

/// Closed-form Holder product `(w^2-AC)^2 / (4Aw(A-w)(C-w))` whose square
/// root bounds the 1-norm of the Gaussian operator.
pub fn gaussian_product_r(k: &GaussianKernel, w: &Real) -> Result<Real, Error> {
    ensure_allowed(&k.a, &k.c, w)?;
    let p = k.prec;
    let ac = (&k.a * &k.c).complete(p);
    let num = (w.clone().square() - &ac).square();
    let den = rint(p, 4)
        * (&k.a * w).complete(p)
        * ((&k.a - w).complete(p))
        * ((&k.c - w).complete(p));
    Ok(num / den)
}

/// The parameter minimizing the Gaussian Holder product, in closed form:
/// `M - sqrt(M^2 - MN)` with `M = max(A,C)`, `N = min(A,C)`. This is the
/// branch inside `(0, min(A,C))`; the mirrored `+` branch in the upper
/// interval attains the same product value. At `A = C` the formula
/// degenerates to the common interval endpoint `A`, approachable only in
/// the limit.
pub fn w_min_gaussian(a: &Real, c: &Real) -> Real {
    let p = a.prec().max(c.prec());
    let mn = Real::with_val(p, a).min(&Real::with_val(p, c));
    let mx = Real::with_val(p, a).max(&Real::with_val(p, c));
    let rad = (mx.clone().square() - (&mx * &mn).complete(p)).sqrt();
    mx - rad
}

const MONOMIALS: [[u32; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];

/// Coefficients of `scale * prefactor` on the degree-2 monomial basis.
fn coeff_vector(k: &FactorKernel) -> Vec<Complex> {
    let p = k.prec;
    let mut v = vec![Complex::with_val(p, (0, 0)); 6];
    for (key, c) in k.prefactor.terms() {
        let pos = MONOMIALS
            .iter()
            .position(|m| m[0] == key[0] && m[1] == key[1])
            .expect("composition of quadratic prefactors stays quadratic");
        v[pos] = (c * &k.scale).complete((p, p));
    }
    v
}

/// Factors a quadratic-polynomial Gaussian at parameter `w`: the first
/// factor is the closed-form Gaussian one, the second keeps the matching
/// Gaussian exponents and gains a quadratic prefactor determined by a
/// linear system (one equation per monomial of the composed prefactor).
///
/// The prefactor is solved over the full complex quadratic space. The
/// self-adjoint subfamily (real combinations of `(x-y)^2, i(x^2-y^2), ...`)
/// is not rich enough: composing maps the integration variable to an
/// affine image `px + qy`, and matching a symmetric target through that
/// substitution is overdetermined unless `p, q` satisfy a relation that
/// fails strictly inside the allowed intervals. The product bound does not
/// need self-adjoint factors, so the general solution is the right one.
fn polygauss_factors(
    k: &PolyGaussianKernel,
    w: &Real,
) -> Result<(FactorKernel, FactorKernel), Error> {
    let p = k.prec;
    let (k1, k2) = gaussian_factors(&k.gauss, w)?;
    let target = k.to_factor();

    let mut columns = Vec::with_capacity(6);
    for (j, mono) in MONOMIALS.iter().enumerate() {
        let mut pref = MultiPoly::zero(2);
        pref.add_term(vec![mono[0], mono[1]], cre(p, &rint(p, 1)));
        let k2j = FactorKernel { prefactor: pref, ..k2.clone() };
        let composed = compose(&k1, &k2j)?;
        if j == 0 {
            // The exponential parts cancel by construction; their mismatch
            // can only be rounding noise.
            let tol = rexp2(p, -(p as i32) / 2);
            for (lhs, rhs) in [
                (&composed.a, &target.a),
                (&composed.b, &target.b),
                (&composed.c, &target.c),
                (&composed.d, &target.d),
                (&composed.e, &target.e),
            ] {
                let scale = rint(p, 1) + cabs(rhs);
                assert!(
                    cabs(&(lhs - rhs).complete((p, p))) <= scale * &tol,
                    "composed Gaussian exponent drifted from the kernel's"
                );
            }
        }
        columns.push(coeff_vector(&composed));
    }
    let rhs = coeff_vector(&target);

    let a = CMat::from_fn(6, 6, |i, j| columns[j][i].clone());
    let scale = a.frob();
    let lu = a.lu().ok_or(Error::SingularSystem)?;
    if cabs(&lu.det()) < scale.pow(6u32) * rexp2(p, -(p as i32) / 2) {
        return Err(Error::SingularSystem);
    }
    let coeffs = lu.solve(&rhs);

    let mut prefactor = MultiPoly::zero(2);
    for (mono, cj) in MONOMIALS.iter().zip(coeffs) {
        prefactor.add_term(vec![mono[0], mono[1]], cj);
    }
    let k2_full = FactorKernel { prefactor, ..k2 };
    Ok((k1, k2_full))
}

/// Factorizes a quadratic-polynomial Gaussian at parameter `w` and
/// verifies the composition identity on the probe grid.
pub fn decompose_polygauss(k: &PolyGaussianKernel, w: &Real) -> Result<Decomposition, Error> {
    let (k1, k2) = polygauss_factors(k, w)?;
    let composed = compose(&k1, &k2)?;
    let grid = probe_points(&probe_sigma(&k.gauss.a, &k.gauss.c, k.prec), k.prec);
    let residual = grid_residual(&k.to_factor(), &composed, &grid);
    Ok(Decomposition { w: w.clone(), k1, k2, residual })
}

/// Holder product `||K1||_2^2 ||K2||_2^2` for any kernel at parameter `w`,
/// by the numeric route (factorize, then integrate each factor).
pub fn product_r(k: &Kernel, w: &Real) -> Result<Real, Error> {
    let (k1, k2) = match k {
        Kernel::Gaussian(g) => gaussian_factors(g, w)?,
        Kernel::PolyGaussian(q) => polygauss_factors(q, w)?,
    };
    Ok(l2_norm_sq(&k1)? * l2_norm_sq(&k2)?)
}

fn objective(k: &Kernel, p: Prec) -> impl Fn(&Real) -> Real + '_ {
    move |w: &Real| match k {
        Kernel::Gaussian(g) => gaussian_product_r(g, w).unwrap_or_else(|_| rinf(p)),
        Kernel::PolyGaussian(_) => product_r(k, w).unwrap_or_else(|_| rinf(p)),
    }
}

/// Minimizes the Holder product over both allowed intervals and packages
/// the resulting 1-norm, negativity, and minimal-eigenvalue bounds.
///
/// The unbounded interval starts truncated at `10 max(A,C)` and doubles
/// whenever the minimizer lands in its top sixteenth, so a minimum beyond
/// the initial truncation is still found.
pub fn minimize_r(k: &Kernel) -> Result<NormBoundResult, Error> {
    let p = k.prec();
    let (a, c) = match k {
        Kernel::Gaussian(g) => (&g.a, &g.c),
        Kernel::PolyGaussian(q) => (&q.gauss.a, &q.gauss.c),
    };
    let f = objective(k, p);
    let [(lo1, hi1), (lo2, mut hi2)] = allowed_w(a, c);

    let tol1 = (&hi1 - &lo1).complete(p) * rexp2(p, -64);
    let (w1, r1) = minimize_scalar(&f, &lo1, &hi1, p, &tol1)?;

    let mut best2 = None;
    for _ in 0..40 {
        let width = (&hi2 - &lo2).complete(p);
        let tol2 = width.clone() * rexp2(p, -64);
        let (w2, r2) = minimize_scalar(&f, &lo2, &hi2, p, &tol2)?;
        let near_edge = w2 > hi2.clone() - width / rint(p, 16);
        best2 = Some((w2, r2));
        if !near_edge {
            break;
        }
        let doubled = (&hi2 - &lo2).complete(p) * rint(p, 2);
        hi2 = lo2.clone() + doubled;
    }
    let (w2, r2) = best2.unwrap();

    let (w_min, r_min) = if r1 <= r2 { (w1, r1) } else { (w2, r2) };
    let bound_1norm = r_min.sqrt();
    let trace = k.trace();
    let neg_upper = ((&bound_1norm - &trace).complete(p)) / rint(p, 2);
    let lambda_min_lower = -neg_upper.clone();
    Ok(NormBoundResult {
        w_min,
        bound_1norm,
        intervals: vec![(lo1, hi1), (lo2, hi2)],
        neg_upper,
        lambda_min_lower,
    })
}
