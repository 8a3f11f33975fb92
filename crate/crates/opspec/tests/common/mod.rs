//! Shared fixtures for the integration suites: the standard kernel family,
//! a double-exponential whole-line quadrature used as an independent
//! evaluation path, and a tiny deterministic generator.
#![allow(dead_code)]

use opspec::kernel::{FactorKernel, GaussianKernel, Kernel, PolyGaussianKernel};
use opspec::num::{rf64, rzero, Complex, Prec, Real};

pub fn gauss(p: Prec, a: f64, c: f64) -> GaussianKernel {
    GaussianKernel::centered(p, rf64(p, a), rf64(p, c)).unwrap()
}

pub fn gauss_full(p: Prec, a: f64, b: f64, c: f64, d: f64, e: f64) -> GaussianKernel {
    GaussianKernel::new(p, rf64(p, a), rf64(p, b), rf64(p, c), rf64(p, d), rf64(p, e)).unwrap()
}

/// The quadratic-prefactor family used throughout: width parameters
/// A=3/2, C=1, prefactor `-(x-y)^2 + c_p (x+y)^2 + 1`. `c_p = 1` is
/// positive semidefinite; `c_p = 5` and `c_p = 40` are the two reference
/// non-PSD members.
pub fn quad_family(p: Prec, c_p: f64) -> PolyGaussianKernel {
    PolyGaussianKernel::new(
        p,
        gauss(p, 1.5, 1.0),
        rf64(p, -1.0),
        rzero(p),
        rf64(p, c_p),
        rzero(p),
        rzero(p),
        rf64(p, 1.0),
    )
    .unwrap()
}

pub fn as_kernel(k: PolyGaussianKernel) -> Kernel {
    Kernel::PolyGaussian(k)
}

/// Trapezoid rule under `x = sinh(t)`: double-exponential convergence for
/// analytic integrands with Gaussian-type decay. The fixed step/range pair
/// is good far beyond 1e-40 for the kernels in this suite.
pub fn de_quad_1d<F: FnMut(&Real) -> Complex>(p: Prec, mut f: F) -> Complex {
    let h = rf64(p, 0.045);
    let steps = 104i64;
    let mut acc = Complex::with_val(p, (0, 0));
    for j in -steps..=steps {
        let t = rf64(p, j as f64) * &h;
        let x = t.clone().sinh();
        let w = t.cosh();
        acc += f(&x) * w;
    }
    acc * &h
}

/// Tensor version of [`de_quad_1d`] over the plane.
pub fn de_quad_2d<F: FnMut(&Real, &Real) -> Complex>(p: Prec, mut f: F) -> Complex {
    let h = rf64(p, 0.045);
    let steps = 104i64;
    let mut nodes = Vec::new();
    for j in -steps..=steps {
        let t = rf64(p, j as f64) * &h;
        nodes.push((t.clone().sinh(), t.cosh()));
    }
    let mut acc = Complex::with_val(p, (0, 0));
    for (x, wx) in &nodes {
        let mut row = Complex::with_val(p, (0, 0));
        for (y, wy) in &nodes {
            row += f(x, y) * wy;
        }
        acc += row * wx;
    }
    acc * h.clone().square()
}

/// Pointwise evaluation distance between two factor kernels at a probe point.
pub fn factor_diff_at(a: &FactorKernel, b: &FactorKernel, x: &Real, y: &Real) -> Real {
    let d = a.eval(x, y) - b.eval(x, y);
    d.abs().into_real_imag().0
}

/// Small deterministic generator for scattered probe points.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}
