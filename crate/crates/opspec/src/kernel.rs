//! Kernel types: self-adjoint Gaussian and polynomial-Gaussian kernels in
//! one dimension, plus the general (possibly non-self-adjoint) exponential
//! factor kernels produced by Hilbert-Schmidt decompositions.
//!
//! Parameter conventions, with all parameters real unless noted:
//!
//! * Gaussian: `K(x,y) = N0 exp{-A(x-y)^2 - iB(x^2-y^2) - C(x+y)^2
//!   - iD(x-y) - E(x+y)}` with `A, C > 0`; `N0 = 2 sqrt(C/pi)
//!   exp(-E^2/(4C))` makes the trace 1.
//! * Polynomial-Gaussian: the Gaussian above times `P(x,y)/N` where
//!   `P = A_P(x-y)^2 + iB_P(x^2-y^2) + C_P(x+y)^2 + iD_P(x-y) + E_P(x+y)
//!   + F_P` and `N` restores trace 1.
//! * Factor: `scale * prefactor(x,y) * exp{-(a x^2 + b y^2 + c xy + d x
//!   + e y)}` with complex coefficients; square integrability needs the
//!   real part of the quadratic form positive definite.

use rug::ops::CompleteRound;

use crate::num::{cabs, cnew, conj, cre, czero, rexp2, rint, rzero, Complex, Prec, Real};
use crate::poly::MultiPoly;

/// A failed kernel invariant. Violations are data, not errors: `validate`
/// reports all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A > 0 fails.
    NonPositiveA,
    /// C > 0 fails.
    NonPositiveC,
    /// Stored normalization disagrees with the recomputed one.
    NormalizationMismatch,
    /// The polynomial normalization N vanishes; the kernel cannot be
    /// scaled to trace 1.
    ZeroNormalization,
    /// The real part of the exponent quadratic form is not positive
    /// definite, so |K|^2 is not integrable.
    NotSquareIntegrable,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = match self {
            Violation::NonPositiveA => "A > 0",
            Violation::NonPositiveC => "C > 0",
            Violation::NormalizationMismatch => "stored normalization matches recomputed value",
            Violation::ZeroNormalization => "N != 0",
            Violation::NotSquareIntegrable => "real part of the quadratic form positive definite",
        };
        write!(f, "violated invariant: {msg}")
    }
}

/// Self-adjoint Gaussian kernel, trace normalized.
#[derive(Debug, Clone)]
pub struct GaussianKernel {
    pub a: Real,
    pub b: Real,
    pub c: Real,
    pub d: Real,
    pub e: Real,
    /// Derived: `2 sqrt(C/pi) exp(-E^2/(4C))`.
    pub n0: Real,
    pub prec: Prec,
}

fn gaussian_n0(prec: Prec, c: &Real, e: &Real) -> Real {
    let pi = crate::num::rpi(prec);
    let front = rint(prec, 2) * (c / &pi).complete(prec).sqrt();
    let expo = -(e.clone().square() / (rint(prec, 4) * c.clone()));
    front * expo.exp()
}

impl GaussianKernel {
    pub fn new(prec: Prec, a: Real, b: Real, c: Real, d: Real, e: Real) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        if !(a > 0) {
            violations.push(Violation::NonPositiveA);
        }
        if !(c > 0) {
            violations.push(Violation::NonPositiveC);
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        let n0 = gaussian_n0(prec, &c, &e);
        Ok(GaussianKernel { a, b, c, d, e, n0, prec })
    }

    /// Centered kernel with only the quadratic parameters set.
    pub fn centered(prec: Prec, a: Real, c: Real) -> Result<Self, Vec<Violation>> {
        let z = rzero(prec);
        GaussianKernel::new(prec, a, z.clone(), c, z.clone(), z)
    }

    pub fn eval(&self, x: &Real, y: &Real) -> Complex {
        let p = self.prec;
        let diff = (x - y).complete(p);
        let sum = (x + y).complete(p);
        let re = -((&self.a * &diff.clone().square()).complete(p))
            - (&self.c * &sum.clone().square()).complete(p)
            - (&self.e * &sum).complete(p);
        let im = -((&self.b * &((x.clone().square()) - (y.clone().square()))).complete(p))
            - (&self.d * &diff).complete(p);
        let z = cnew(p, &re, &im).exp();
        z * &self.n0
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if !(self.a > 0) {
            v.push(Violation::NonPositiveA);
        }
        if !(self.c > 0) {
            v.push(Violation::NonPositiveC);
        } else {
            let expect = gaussian_n0(self.prec, &self.c, &self.e);
            let tol = rexp2(self.prec, -(self.prec as i32 - 8));
            if !crate::num::rel_close(&self.n0, &expect, &tol) {
                v.push(Violation::NormalizationMismatch);
            }
        }
        v
    }

    /// Expanded exponential form: exponent coefficients for
    /// `x^2, y^2, xy, x, y` and the overall scale.
    pub fn to_factor(&self) -> FactorKernel {
        let p = self.prec;
        let ac = (&self.a + &self.c).complete(p);
        let one = MultiPoly::constant(2, cnew(p, &rint(p, 1).clone(), &rzero(p)));
        FactorKernel {
            prefactor: one,
            a: cnew(p, &ac, &self.b),
            b: cnew(p, &ac, &(-self.b.clone())),
            c: cre(p, &((rint(p, 2) * (&self.c - &self.a).complete(p)))),
            d: cnew(p, &self.e, &self.d),
            e: cnew(p, &self.e, &(-self.d.clone())),
            scale: cre(p, &self.n0),
            prec: p,
        }
    }
}

/// Self-adjoint polynomial-Gaussian kernel: quadratic prefactor over the
/// Gaussian family, trace normalized.
#[derive(Debug, Clone)]
pub struct PolyGaussianKernel {
    pub gauss: GaussianKernel,
    pub a_p: Real,
    pub b_p: Real,
    pub c_p: Real,
    pub d_p: Real,
    pub e_p: Real,
    pub f_p: Real,
    /// Derived: `F_P + (C_P - E_P E)/(2C) + C_P E^2/(4C^2)`, the trace of
    /// the unnormalized prefactor against the Gaussian.
    pub n: Real,
    pub prec: Prec,
}

fn polygauss_n(prec: Prec, g: &GaussianKernel, c_p: &Real, e_p: &Real, f_p: &Real) -> Real {
    let two_c = rint(prec, 2) * g.c.clone();
    let mid = (c_p.clone() - e_p.clone() * g.e.clone()) / two_c;
    let quad = c_p.clone() * g.e.clone().square() / (rint(prec, 4) * g.c.clone().square());
    f_p.clone() + mid + quad
}

impl PolyGaussianKernel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        prec: Prec,
        gauss: GaussianKernel,
        a_p: Real,
        b_p: Real,
        c_p: Real,
        d_p: Real,
        e_p: Real,
        f_p: Real,
    ) -> Result<Self, Vec<Violation>> {
        let n = polygauss_n(prec, &gauss, &c_p, &e_p, &f_p);
        let scale = Real::with_val(prec, 1)
            .max(&a_p.clone().abs())
            .max(&c_p.clone().abs())
            .max(&f_p.clone().abs());
        if n.clone().abs() <= scale * rexp2(prec, -(prec as i32 - 16)) {
            return Err(vec![Violation::ZeroNormalization]);
        }
        Ok(PolyGaussianKernel { gauss, a_p, b_p, c_p, d_p, e_p, f_p, n, prec })
    }

    /// Prefactor `P(x,y)/N` at a point.
    pub fn prefactor_at(&self, x: &Real, y: &Real) -> Complex {
        let p = self.prec;
        let diff = (x - y).complete(p);
        let sum = (x + y).complete(p);
        let re = (&self.a_p * &diff.clone().square()).complete(p)
            + (&self.c_p * &sum.clone().square()).complete(p)
            + (&self.e_p * &sum).complete(p)
            + &self.f_p;
        let im = (&self.b_p * &((x.clone().square()) - (y.clone().square()))).complete(p)
            + (&self.d_p * &diff).complete(p);
        cnew(p, &re, &im) / &self.n
    }

    pub fn eval(&self, x: &Real, y: &Real) -> Complex {
        self.prefactor_at(x, y) * self.gauss.eval(x, y)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = self.gauss.validate();
        let expect = polygauss_n(self.prec, &self.gauss, &self.c_p, &self.e_p, &self.f_p);
        if expect.is_zero() {
            v.push(Violation::ZeroNormalization);
        } else {
            let tol = rexp2(self.prec, -(self.prec as i32 - 8));
            if !crate::num::rel_close(&self.n, &expect, &tol) {
                v.push(Violation::NormalizationMismatch);
            }
        }
        v
    }

    /// Expanded factor form; the polynomial normalization joins the scale.
    pub fn to_factor(&self) -> FactorKernel {
        let p = self.prec;
        let mut f = self.gauss.to_factor();
        let mut pre = MultiPoly::zero(2);
        pre.add_term(vec![2, 0], cnew(p, &(&self.a_p + &self.c_p).complete(p), &self.b_p));
        pre.add_term(vec![0, 2], cnew(p, &(&self.a_p + &self.c_p).complete(p), &(-self.b_p.clone())));
        pre.add_term(
            vec![1, 1],
            cre(p, &(rint(p, 2) * (&self.c_p - &self.a_p).complete(p))),
        );
        pre.add_term(vec![1, 0], cnew(p, &self.e_p, &self.d_p));
        pre.add_term(vec![0, 1], cnew(p, &self.e_p, &(-self.d_p.clone())));
        pre.add_term(vec![0, 0], cre(p, &self.f_p));
        f.prefactor = pre;
        f.scale = cre(p, &(&self.gauss.n0 / &self.n).complete(p));
        f
    }
}

/// Either self-adjoint kernel type; the common currency of the pipeline
/// drivers.
#[derive(Debug, Clone)]
pub enum Kernel {
    Gaussian(GaussianKernel),
    PolyGaussian(PolyGaussianKernel),
}

impl Kernel {
    pub fn prec(&self) -> Prec {
        match self {
            Kernel::Gaussian(k) => k.prec,
            Kernel::PolyGaussian(k) => k.prec,
        }
    }

    pub fn eval(&self, x: &Real, y: &Real) -> Complex {
        match self {
            Kernel::Gaussian(k) => k.eval(x, y),
            Kernel::PolyGaussian(k) => k.eval(x, y),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Kernel::Gaussian(k) => k.validate(),
            Kernel::PolyGaussian(k) => k.validate(),
        }
    }

    pub fn to_factor(&self) -> FactorKernel {
        match self {
            Kernel::Gaussian(k) => k.to_factor(),
            Kernel::PolyGaussian(k) => k.to_factor(),
        }
    }

    /// Trace in closed form. Self-adjointness makes it real; the imaginary
    /// rounding residue is dropped.
    pub fn trace(&self) -> Real {
        let f = self.to_factor();
        let t = crate::wick::trace_factor(&f).expect("valid kernel has a convergent trace");
        t.into_real_imag().0
    }
}

/// General exponential factor kernel
/// `scale * prefactor(x,y) * exp{-(a x^2 + b y^2 + c xy + d x + e y)}`.
#[derive(Debug, Clone)]
pub struct FactorKernel {
    pub prefactor: MultiPoly,
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
    pub e: Complex,
    pub scale: Complex,
    pub prec: Prec,
}

impl FactorKernel {
    pub fn eval(&self, x: &Real, y: &Real) -> Complex {
        let p = self.prec;
        let cx = cre(p, x);
        let cy = cre(p, y);
        let x2 = cre(p, &x.clone().square());
        let y2 = cre(p, &y.clone().square());
        let xy = cre(p, &(x * y).complete(p));
        let mut expo = czero(p);
        expo += (&self.a * &x2).complete((p, p));
        expo += (&self.b * &y2).complete((p, p));
        expo += (&self.c * &xy).complete((p, p));
        expo += (&self.d * &cx).complete((p, p));
        expo += (&self.e * &cy).complete((p, p));
        let pre = self.prefactor.eval(&[cx, cy]);
        (-expo).exp() * pre * &self.scale
    }

    /// Positive definiteness of the real part of the exponent form,
    /// equivalent to square integrability of |K|.
    pub fn is_square_integrable(&self) -> bool {
        let p = self.prec;
        let ra = self.a.real();
        let rb = self.b.real();
        let rc = self.c.real();
        if !(ra.is_finite() && *ra > 0) {
            return false;
        }
        let det = (rint(p, 4) * (ra * rb).complete(p)) - rc.clone().square();
        det > 0
    }

    pub fn validate(&self) -> Vec<Violation> {
        if self.is_square_integrable() {
            Vec::new()
        } else {
            vec![Violation::NotSquareIntegrable]
        }
    }

    /// Pointwise distance to another factor kernel at a point, used by
    /// decomposition residual checks.
    pub fn abs_diff_at(&self, other: &FactorKernel, x: &Real, y: &Real) -> Real {
        cabs(&(self.eval(x, y) - other.eval(x, y)))
    }

    /// The adjoint kernel `conj(K(y,x))`.
    pub fn adjoint(&self) -> FactorKernel {
        let swap = self.prefactor.embed(2, &[1, 0]).conj();
        FactorKernel {
            prefactor: swap,
            a: conj(&self.b),
            b: conj(&self.a),
            c: conj(&self.c),
            d: conj(&self.e),
            e: conj(&self.d),
            scale: conj(&self.scale),
            prec: self.prec,
        }
    }
}
