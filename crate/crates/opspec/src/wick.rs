//! The n-variable Gaussian integral engine:
//! `∫ poly(r) exp(-r^T M r - v^T r + F) dr` in closed form via completion
//! of the square and Gaussian moment recursion, plus the operations built
//! directly on it: kernel composition, traces, and L^2 norms.
//!
//! The matrix `M` is complex symmetric (not Hermitian). Convergence needs
//! `Re M` positive definite. The square root of `det M` is taken on the
//! branch continuous along `Re M + it Im M`, `t: 0 -> 1`: with
//! `Re M = S S^T` and `w_j` the eigenvalues of `S^{-1} (Im M) S^{-T}`,
//! `sqrt(det M) = det(S) * prod_j sqrt(1 + i w_j)` using principal square
//! roots of factors with positive real part. A principal square root of
//! the full determinant would pick the wrong sign once `arg det` wraps.

use std::collections::HashMap;

use rug::ops::{CompleteRound, Pow};

use crate::error::Error;
use crate::kernel::FactorKernel;
use crate::linalg::{jacobi_eigen, CMat, RMat};
use crate::num::{cabs, cnew, cre, czero, rexp2, rint, rpi, Complex, Prec, Real};
use crate::poly::MultiPoly;

/// Polynomial total-degree cap. Two-variable integrands (traces, composed
/// prefactors, squared norms) run a cheap linear recursion and allow high
/// degree; three and more variables pay combinatorial memo growth and are
/// capped low.
pub fn degree_cap(nvars: usize) -> usize {
    if nvars <= 2 {
        256
    } else {
        64
    }
}

/// `∫ poly(r) exp(-r^T M r - v^T r + F) dr` data.
#[derive(Debug, Clone)]
pub struct GaussianIntegrand {
    /// Complex symmetric quadratic form matrix.
    pub m: CMat,
    /// Linear coefficient vector.
    pub v: Vec<Complex>,
    /// Constant exponent offset.
    pub f: Complex,
    /// Polynomial factor, arity = dimension of `m`.
    pub poly: MultiPoly,
}

/// Completed-square data of an integrand: the Gaussian measure it induces.
#[derive(Debug, Clone)]
pub struct QuadForm {
    /// `-M^{-1} v / 2`.
    pub mean: Vec<Complex>,
    /// `M^{-1} / 2`.
    pub cov: CMat,
    /// `pi^{n/2} exp(F + v^T M^{-1} v / 4) / sqrt(det M)`.
    pub gaussian_mass: Complex,
}

/// Completes the square: checks convergence, takes the branch-continuous
/// determinant root, inverts `M`.
pub fn quad_form(g: &GaussianIntegrand) -> Result<QuadForm, Error> {
    let n = g.m.rows();
    assert!(n >= 1 && g.m.cols() == n && g.v.len() == n);
    let p = g.m.prec().max(g.poly.max_abs_coeff(64).prec());

    let re = RMat::from_fn(n, n, |i, j| g.m.at(i, j).real().clone());
    let im = RMat::from_fn(n, n, |i, j| g.m.at(i, j).imag().clone());
    let Some(s) = re.cholesky() else {
        return Err(Error::Divergent);
    };

    // W = S^{-1} Im S^{-T}, symmetric; its eigenvalues parameterize the
    // determinant along the homotopy in the imaginary part.
    let mut z = RMat::zeros(p, n, n);
    for j in 0..n {
        let col: Vec<Real> = (0..n).map(|i| im.at(i, j).clone()).collect();
        let y = s.solve_lower(&col);
        for i in 0..n {
            *z.at_mut(i, j) = y[i].clone();
        }
    }
    let mut w = RMat::zeros(p, n, n);
    for i in 0..n {
        let row: Vec<Real> = (0..n).map(|j| z.at(i, j).clone()).collect();
        let y = s.solve_lower(&row);
        for j in 0..n {
            *w.at_mut(i, j) = y[j].clone();
        }
    }
    let (eigs, _) = jacobi_eigen(&w, p, false);

    let mut det_s = rint(p, 1);
    for k in 0..n {
        det_s *= s.at(k, k);
    }
    let mut sqrt_det = cre(p, &det_s);
    let mut abs_det = det_s.clone().square();
    let one = rint(p, 1);
    for wj in &eigs {
        let factor = cnew(p, &one, wj).sqrt();
        sqrt_det *= factor;
        abs_det *= (wj.clone().square() + &one).sqrt();
    }

    let frob = g.m.frob();
    let tol = (frob.pow(n as u32) * rexp2(p, -((p / 2) as i32))).abs();
    if abs_det < tol {
        return Err(Error::SingularForm);
    }
    let lu = g.m.lu().ok_or(Error::SingularForm)?;
    let minv_v = lu.solve(&g.v);
    let cov_unscaled = lu.inverse();

    let half = cre(p, &(rint(p, 1) / rint(p, 2)));
    let mean: Vec<Complex> = minv_v.iter().map(|x| -(x * &half).complete((p, p))).collect();
    let cov = CMat::from_fn(n, n, |i, j| (cov_unscaled.at(i, j) * &half).complete((p, p)));

    let mut vmv = czero(p);
    for (vi, mi) in g.v.iter().zip(&minv_v) {
        vmv += (vi * mi).complete((p, p));
    }
    let quarter = cre(p, &(rint(p, 1) / rint(p, 4)));
    let expo = ((&g.f + &(vmv * quarter)).complete((p, p))).exp();
    let pi_pow = rpi(p).pow(n as u32).sqrt();
    let mass = (expo * pi_pow) / sqrt_det;

    Ok(QuadForm { mean, cov, gaussian_mass: mass })
}

/// Raw Gaussian moment `E[prod X_i^{k_i}]`, `X ~ N(mean, cov)`, by the
/// mean-and-covariance recursion, memoized on the exponent vector.
fn gmoment(
    key: &[u32],
    mean: &[Complex],
    cov: &CMat,
    p: Prec,
    memo: &mut HashMap<Vec<u32>, Complex>,
) -> Complex {
    if key.iter().all(|&k| k == 0) {
        return Complex::with_val(p, (1, 0));
    }
    if let Some(v) = memo.get(key) {
        return v.clone();
    }
    let i = key.iter().position(|&k| k > 0).unwrap();
    let mut k1 = key.to_vec();
    k1[i] -= 1;
    let mut acc = (&mean[i] * &gmoment(&k1, mean, cov, p, memo)).complete((p, p));
    for j in 0..key.len() {
        if k1[j] > 0 {
            let mut k2 = k1.clone();
            k2[j] -= 1;
            let sub = gmoment(&k2, mean, cov, p, memo);
            let mult = rint(p, k1[j] as i64);
            acc += (cov.at(i, j) * &sub).complete((p, p)) * mult;
        }
    }
    memo.insert(key.to_vec(), acc.clone());
    acc
}

/// Closed-form value of the integrand.
pub fn integrate(g: &GaussianIntegrand) -> Result<Complex, Error> {
    let n = g.m.rows();
    let cap = degree_cap(n);
    let deg = g.poly.total_degree();
    if deg > cap {
        return Err(Error::DegreeCap { degree: deg, cap });
    }
    let qf = quad_form(g)?;
    let p = g.m.prec();
    let mut memo = HashMap::new();
    let mut acc = czero(p);
    for (key, coeff) in g.poly.terms() {
        let m = gmoment(key, &qf.mean, &qf.cov, p, &mut memo);
        acc += (coeff * &m).complete((p, p));
    }
    Ok(acc * qf.gaussian_mass)
}

/// Kernel of the operator product: integrates out the shared variable of
/// `k1(x,z) k2(z,y)` in closed form. The `z`-moments enter through the
/// polynomials `R_m(x,y) = E[(mu(x,y) + Z)^m]`, built by the shifted-moment
/// recursion `R_m = mu R_{m-1} + (m-1) sigma^2 R_{m-2}`.
pub fn compose(k1: &FactorKernel, k2: &FactorKernel) -> Result<FactorKernel, Error> {
    let p = k1.prec.max(k2.prec);
    let a = (&k1.b + &k2.a).complete((p, p));
    if !(a.real().is_finite() && *a.real() > 0) {
        return Err(Error::Divergent);
    }
    let deg_out = k1.prefactor.total_degree() + k2.prefactor.total_degree();
    if deg_out > degree_cap(2) {
        return Err(Error::DegreeCap { degree: deg_out, cap: degree_cap(2) });
    }

    let b0 = (&k1.e + &k2.d).complete((p, p));
    let quarter_a = Complex::with_val(p, (1, 0)) / (&a * &rint(p, 4)).complete((p, p));
    let half_a = (&quarter_a * &rint(p, 2)).complete((p, p));

    // mu(x,y) = -(c1 x + c2 y + b0)/(2a); sigma^2 = 1/(2a).
    let mut mu = MultiPoly::zero(2);
    mu.add_term(vec![1, 0], -((&k1.c * &half_a).complete((p, p))));
    mu.add_term(vec![0, 1], -((&k2.c * &half_a).complete((p, p))));
    mu.add_term(vec![0, 0], -((&b0 * &half_a).complete((p, p))));
    let sigma2 = half_a.clone();

    // Product prefactor in (x, y, z), grouped by z-degree.
    let p1 = k1.prefactor.embed(3, &[0, 2]);
    let p2 = k2.prefactor.embed(3, &[2, 1]);
    let q = p1.mul(&p2);
    let mz = q.terms().map(|(k, _)| k[2] as usize).max().unwrap_or(0);
    let mut by_z: Vec<MultiPoly> = vec![MultiPoly::zero(2); mz + 1];
    for (key, coeff) in q.terms() {
        by_z[key[2] as usize].add_term(vec![key[0], key[1]], coeff.clone());
    }

    let mut r_prev2 = MultiPoly::constant(2, Complex::with_val(p, (1, 0)));
    let mut r_prev = mu.clone();
    let mut out = by_z[0].clone();
    if mz >= 1 {
        out = out.add(&by_z[1].mul(&r_prev));
    }
    for m in 2..=mz {
        let scaled = r_prev2.scale(&(&sigma2 * &rint(p, (m - 1) as i64)).complete((p, p)));
        let r_m = mu.mul(&r_prev).add(&scaled);
        if !by_z[m].is_zero() {
            out = out.add(&by_z[m].mul(&r_m));
        }
        r_prev2 = r_prev;
        r_prev = r_m;
    }

    // Exponent bookkeeping from (c1 x + c2 y + b0)^2 / (4a).
    let ta = k1.c.clone().square() * &quarter_a;
    let a_out = (&k1.a - &ta).complete((p, p));
    let tb = k2.c.clone().square() * &quarter_a;
    let b_out = (&k2.b - &tb).complete((p, p));
    let c_out = -((&k1.c * &k2.c).complete((p, p)) * &half_a);
    let td = (&k1.c * &b0).complete((p, p)) * &half_a;
    let d_out = (&k1.d - &td).complete((p, p));
    let te = (&k2.c * &b0).complete((p, p)) * &half_a;
    let e_out = (&k2.e - &te).complete((p, p));

    let root = (cre(p, &rpi(p)) / &a).sqrt();
    let gain = (b0.clone().square() * &quarter_a).exp();
    let scale = (&k1.scale * &k2.scale).complete((p, p)) * root * gain;

    Ok(FactorKernel {
        prefactor: out,
        a: a_out,
        b: b_out,
        c: c_out,
        d: d_out,
        e: e_out,
        scale,
        prec: p,
    })
}

/// `∫ K(x,x) dx`: the diagonal is a one-variable polynomial-Gaussian
/// integrand.
pub fn trace_factor(k: &FactorKernel) -> Result<Complex, Error> {
    let p = k.prec;
    let msum = (&k.a + &k.b).complete((p, p)) + &k.c;
    let vsum = (&k.d + &k.e).complete((p, p));
    let diag = k.prefactor.embed(1, &[0, 0]);
    let g = GaussianIntegrand {
        m: CMat::from_fn(1, 1, |_, _| msum.clone()),
        v: vec![vsum],
        f: czero(p),
        poly: diag,
    };
    let val = integrate(&g)?;
    Ok(val * &k.scale)
}

/// `∫∫ |K(x,y)|^2 dx dy`.
pub fn l2_norm_sq(k: &FactorKernel) -> Result<Real, Error> {
    let p = k.prec;
    let two = rint(p, 2);
    let m = CMat::from_fn(2, 2, |i, j| {
        let r = match (i, j) {
            (0, 0) => (k.a.real() * &two).complete(p),
            (1, 1) => (k.b.real() * &two).complete(p),
            _ => k.c.real().clone(),
        };
        cre(p, &r)
    });
    let v = vec![
        cre(p, &(k.d.real() * &two).complete(p)),
        cre(p, &(k.e.real() * &two).complete(p)),
    ];
    let poly = k.prefactor.mul(&k.prefactor.conj());
    let g = GaussianIntegrand { m, v, f: czero(p), poly };
    let val = integrate(&g)?;
    let s2 = cabs(&k.scale).square();
    Ok(val.into_real_imag().0 * s2)
}

/// The cyclic trace integral `Tr K^l` assembled as one `l`-variable
/// integrand: the product of `l` factors `K(x_j, x_{j+1})` around the
/// cycle. Kept as the short-cycle cross-check for the sequential
/// composition path; the memoized pairing recursion in many variables is
/// capped low.
pub fn cyclic_trace(k: &FactorKernel, l: usize) -> Result<Complex, Error> {
    assert!(l >= 1);
    if l == 1 {
        return trace_factor(k);
    }
    let p = k.prec;
    let half = (rint(p, 1)) / rint(p, 2);
    let mut m = CMat::zeros(p, l, l);
    let mut v = vec![czero(p); l];
    let mut poly = MultiPoly::constant(l, Complex::with_val(p, (1, 0)));
    for j in 0..l {
        let nj = (j + 1) % l;
        *m.at_mut(j, j) += &k.a;
        *m.at_mut(nj, nj) += &k.b;
        let ch = (&k.c * &half).complete((p, p));
        *m.at_mut(j, nj) += &ch;
        *m.at_mut(nj, j) += &ch;
        v[j] += &k.d;
        v[nj] += &k.e;
        poly = poly.mul(&k.prefactor.embed(l, &[j, nj]));
    }
    let g = GaussianIntegrand { m, v, f: czero(p), poly };
    let val = integrate(&g)?;
    let mut scale_pow = Complex::with_val(p, (1, 0));
    for _ in 0..l {
        scale_pow *= &k.scale;
    }
    Ok(val * scale_pow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GaussianKernel;
    use crate::num::{rel_close, rf64};

    fn rp(v: f64) -> Real {
        rf64(256, v)
    }

    fn c(re: f64, im: f64) -> Complex {
        cnew(256, &rp(re), &rp(im))
    }

    fn one_var(m: Complex, poly: MultiPoly) -> GaussianIntegrand {
        GaussianIntegrand {
            m: CMat::from_fn(1, 1, |_, _| m.clone()),
            v: vec![czero(256)],
            f: czero(256),
            poly,
        }
    }

    #[test]
    fn standard_gaussian_integral() {
        let p1 = MultiPoly::constant(1, c(1.0, 0.0));
        let v = integrate(&one_var(c(1.0, 0.0), p1)).unwrap();
        assert!(rel_close(v.real(), &rpi(256).sqrt(), &rexp2(256, -240)));
        assert!(v.imag().is_zero());
    }

    #[test]
    fn second_moment_integral() {
        // ∫ x^2 e^{-x^2} dx = sqrt(pi)/2.
        let mut p1 = MultiPoly::zero(1);
        p1.add_term(vec![2], c(1.0, 0.0));
        let v = integrate(&one_var(c(1.0, 0.0), p1)).unwrap();
        let want = rpi(256).sqrt() / rint(256, 2);
        assert!(rel_close(v.real(), &want, &rexp2(256, -240)));
    }

    #[test]
    fn complex_quadratic_coefficient() {
        // ∫ e^{-(1+i)x^2} dx = sqrt(pi/(1+i)), principal.
        let p1 = MultiPoly::constant(1, c(1.0, 0.0));
        let v = integrate(&one_var(c(1.0, 1.0), p1)).unwrap();
        let want = (cre(256, &rpi(256)) / c(1.0, 1.0)).sqrt();
        assert!(cabs(&(v - want)) < rexp2(256, -240));
    }

    #[test]
    fn determinant_branch_beyond_principal() {
        // diag(1+10i) three times: arg(det) wraps past pi, so the naive
        // principal sqrt of det flips sign. The product of the three 1-D
        // integrals is the ground truth.
        let p1 = MultiPoly::constant(1, c(1.0, 0.0));
        let single = integrate(&one_var(c(1.0, 10.0), p1)).unwrap();
        let want = single.clone() * &single * &single;

        let m = CMat::from_fn(3, 3, |i, j| if i == j { c(1.0, 10.0) } else { czero(256) });
        let g = GaussianIntegrand {
            m,
            v: vec![czero(256); 3],
            f: czero(256),
            poly: MultiPoly::constant(3, c(1.0, 0.0)),
        };
        let got = integrate(&g).unwrap();
        assert!(cabs(&(got.clone() - &want)) < rexp2(256, -230) * cabs(&want));
    }

    #[test]
    fn divergent_and_cap_errors() {
        let p1 = MultiPoly::constant(1, c(1.0, 0.0));
        assert!(matches!(integrate(&one_var(c(-1.0, 0.0), p1)), Err(Error::Divergent)));

        let mut high = MultiPoly::zero(3);
        high.add_term(vec![65, 0, 0], c(1.0, 0.0));
        let m = CMat::from_fn(3, 3, |i, j| if i == j { c(1.0, 0.0) } else { czero(256) });
        let g = GaussianIntegrand { m, v: vec![czero(256); 3], f: czero(256), poly: high };
        assert!(matches!(integrate(&g), Err(Error::DegreeCap { degree: 65, cap: 64 })));
    }

    #[test]
    fn linear_term_shifts_mean() {
        // ∫ x e^{-x^2 - 2x} dx = -e * sqrt(pi) (mean -1, mass e*sqrt(pi)).
        let mut p1 = MultiPoly::zero(1);
        p1.add_term(vec![1], c(1.0, 0.0));
        let g = GaussianIntegrand {
            m: CMat::from_fn(1, 1, |_, _| c(1.0, 0.0)),
            v: vec![c(2.0, 0.0)],
            f: czero(256),
            poly: p1,
        };
        let v = integrate(&g).unwrap();
        let want = -(rpi(256).sqrt() * rp(1.0).exp());
        assert!(rel_close(v.real(), &want, &rexp2(256, -240)));
    }

    #[test]
    fn compose_squares_to_second_moment() {
        // Normalized Gaussian A=1, C=4: Tr K^2 = (1-b)^2/(1-b^2) with
        // b = -1/3, i.e. exactly 2.
        let k = GaussianKernel::centered(256, rp(1.0), rp(4.0)).unwrap().to_factor();
        let k2 = compose(&k, &k).unwrap();
        let tr = trace_factor(&k2).unwrap();
        assert!(rel_close(tr.real(), &rp(2.0), &rexp2(256, -230)));
        assert!(tr.imag().clone().abs() < rexp2(256, -230));
    }

    #[test]
    fn trace_of_normalized_kernel_is_one() {
        let k = GaussianKernel::new(256, rp(1.5), rp(0.2), rp(1.0), rp(-0.3), rp(0.4))
            .unwrap()
            .to_factor();
        let tr = trace_factor(&k).unwrap();
        assert!(rel_close(tr.real(), &rp(1.0), &rexp2(256, -230)));
    }

    #[test]
    fn l2_norm_of_balanced_gaussian() {
        // A=C=1 normalized kernel is the rank-one projector with eigenvalue
        // 1, so the squared Hilbert-Schmidt norm is 1.
        let k = GaussianKernel::centered(256, rp(1.0), rp(1.0)).unwrap().to_factor();
        let v = l2_norm_sq(&k).unwrap();
        assert!(rel_close(&v, &rp(1.0), &rexp2(256, -230)));
    }

    #[test]
    fn cyclic_trace_matches_compose_chain() {
        let k = GaussianKernel::centered(256, rp(1.0), rp(4.0)).unwrap().to_factor();
        let k2 = compose(&k, &k).unwrap();
        let k3 = compose(&k2, &k).unwrap();
        let chain = trace_factor(&k3).unwrap();
        let oneshot = cyclic_trace(&k, 3).unwrap();
        assert!(cabs(&(chain.clone() - &oneshot)) < rexp2(256, -220) * cabs(&chain));
        // Closed form at l=3: (4/3)^3/(1-(-1/3)^3) = 16/7.
        let want = rp(16.0) / rp(7.0);
        assert!(rel_close(chain.real(), &want, &rexp2(256, -220)));
    }

    #[test]
    fn compose_reproduces_pointwise_product_integral() {
        // Self-composition of a kernel with a linear term; check against
        // the generic 2-variable integrand for the same product at fixed
        // (x, y) by evaluating both kernels at probe points.
        let k = GaussianKernel::new(256, rp(1.5), rp(0.0), rp(1.0), rp(0.0), rp(0.4))
            .unwrap()
            .to_factor();
        let k2 = compose(&k, &k).unwrap();
        // Tr K^2 both ways.
        let direct = trace_factor(&k2).unwrap();
        let oneshot = cyclic_trace(&k, 2).unwrap();
        assert!(cabs(&(direct.clone() - &oneshot)) < rexp2(256, -230) * cabs(&direct));
    }
}
