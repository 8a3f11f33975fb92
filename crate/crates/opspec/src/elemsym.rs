//! Elementary symmetric functions `e_k` of an operator spectrum, computed
//! from its moment sequence.
//!
//! The working path is the Newton recurrence
//! `k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} M_i` (O(n^2), transparent
//! rounding behavior). The equivalent `k x k` Hessenberg determinant is kept
//! as an independent cross-check, and the Gaussian geometric family has a
//! closed form used as another oracle. Cancellation is controlled purely by
//! the working precision: `e_k` of size `10^-36` emerging from order-one
//! moments needs the bits, not a cleverer summation.

use rug::ops::{CompleteRound, Pow};

use crate::error::Error;
use crate::linalg::CMat;
use crate::moments::MomentSequence;
use crate::num::{cre, rexp2, rint, rzero, Prec, Real};

/// Elementary symmetric function values `e_0..e_n` with their source
/// moments. `budget` is a certified 1-norm bound `c`, present only after
/// [`check_ek_bound`] accepted it.
#[derive(Debug, Clone)]
pub struct ElemSymSequence {
    pub e: Vec<Real>,
    pub source: MomentSequence,
    pub budget: Option<Real>,
}

impl ElemSymSequence {
    /// Highest computed index.
    pub fn max_k(&self) -> usize {
        self.e.len() - 1
    }

    /// Working precision inherited from the source kernel.
    pub fn prec(&self) -> Prec {
        self.source.kernel.prec()
    }

    /// Runs [`check_ek_bound`]; on success stores `c` as the certified
    /// budget and returns `None`, otherwise returns the first violating `k`.
    pub fn certify_budget(&mut self, c: &Real) -> Option<usize> {
        match check_ek_bound(self, c) {
            None => {
                self.budget = Some(c.clone());
                None
            }
            Some(k) => Some(k),
        }
    }
}

/// `e_0..e_n` by the Newton recurrence
/// `k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} M_i`.
pub fn ek_newton(m: &MomentSequence, n: u32) -> Result<ElemSymSequence, Error> {
    if m.max_order < n {
        return Err(Error::InsufficientMoments {
            have: m.max_order as usize,
            need: n as usize,
        });
    }
    let p = m.kernel.prec();
    let mut e = vec![rint(p, 1)];
    for k in 1..=n as usize {
        let mut acc = rzero(p);
        for i in 1..=k {
            let term = (&e[k - i] * m.m(i as u32)).complete(p);
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / rint(p, k as i64));
    }
    Ok(ElemSymSequence { e, source: m.clone(), budget: None })
}

/// `e_k` as `(1/k!) det H` where `H` is the `k x k` lower-Hessenberg matrix
/// with `H[i][j] = M_{i-j+1}` on and below the diagonal and `H[i][i+1] =
/// i+1` on the superdiagonal. Same mathematics as the recurrence through an
/// entirely different elimination; serves as a cross-check oracle.
pub fn ek_determinant(m: &MomentSequence, k: u32) -> Result<Real, Error> {
    if m.max_order < k {
        return Err(Error::InsufficientMoments {
            have: m.max_order as usize,
            need: k as usize,
        });
    }
    let p = m.kernel.prec();
    if k == 0 {
        return Ok(rint(p, 1));
    }
    let n = k as usize;
    let h = CMat::from_fn(n, n, |i, j| {
        if j <= i {
            cre(p, m.m((i - j + 1) as u32))
        } else if j == i + 1 {
            cre(p, &rint(p, (i + 1) as i64))
        } else {
            cre(p, &rzero(p))
        }
    });
    let det = match h.lu() {
        Some(lu) => lu.det(),
        None => cre(p, &rzero(p)),
    };
    let fact = Real::factorial(k).complete(p);
    Ok(det.into_real_imag().0 / fact)
}

/// Closed form for the Gaussian geometric spectrum
/// `(1-beta)^k beta^(k(k-1)/2) / prod_{i=1..k} (1-beta^i)`, `|beta| < 1`.
pub fn ek_gaussian_closed(beta: &Real, k: u32) -> Real {
    let p = beta.prec();
    assert!(beta.clone().abs() < 1, "spectral ratio must satisfy |beta| < 1");
    if k == 0 {
        return rint(p, 1);
    }
    let num = (Real::with_val(p, 1) - beta).pow(k) * beta.clone().pow(k * (k - 1) / 2);
    let mut den = rint(p, 1);
    for i in 1..=k {
        den *= Real::with_val(p, 1) - beta.clone().pow(i);
    }
    num / den
}

/// Checks `|e_k| <= c^k / k!` for every computed `k`, with multiplicative
/// slack `1 + 2^-(P-32)` absorbing the rounding of both sides. Returns the
/// first violating `k`, or `None` when `c` is consistent with being a 1-norm
/// upper bound. A violation is data, not an error: it certifies that `c`
/// underestimates the 1-norm.
pub fn check_ek_bound(e: &ElemSymSequence, c: &Real) -> Option<usize> {
    assert!(*c > 0, "1-norm budget must be positive");
    let p = e.prec();
    let slack = rint(p, 1) + rexp2(p, -(p as i32 - 32));
    for (k, ek) in e.e.iter().enumerate() {
        let fact = Real::factorial(k as u32).complete(p);
        let bound = c.clone().pow(k as u32) / fact * &slack;
        if ek.clone().abs() > bound {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{GaussianKernel, Kernel, PolyGaussianKernel};
    use crate::moments::{gaussian_beta, moment_sequence};
    use crate::num::{rf64, rrat, scale_close};

    const P: Prec = 256;

    fn rp(v: f64) -> Real {
        rf64(P, v)
    }

    fn gauss(a: f64, c: f64) -> GaussianKernel {
        GaussianKernel::centered(P, rp(a), rp(c)).unwrap()
    }

    fn quad_kernel() -> PolyGaussianKernel {
        PolyGaussianKernel::new(
            P,
            gauss(1.5, 1.0),
            rp(-1.0),
            rzero(P),
            rp(5.0),
            rzero(P),
            rzero(P),
            rp(1.0),
        )
        .unwrap()
    }

    /// Moment sequence with hand-picked values; the kernel slot only
    /// supplies the working precision.
    fn synthetic(values: Vec<Real>) -> MomentSequence {
        let max_order = values.len() as u32;
        MomentSequence { values, kernel: Kernel::Gaussian(gauss(1.0, 1.0)), max_order }
    }

    #[test]
    fn rank_one_sequence_truncates() {
        // M_l = lambda^l for a single eigenvalue: e_1 = lambda, rest vanish.
        let lam = rp(0.7);
        let m = synthetic(vec![lam.clone(), lam.clone().square(), lam.clone().pow(3u32)]);
        let e = ek_newton(&m, 3).unwrap();
        assert_eq!(e.e[0], rint(P, 1));
        assert!((e.e[1].clone() - &lam).abs() < rexp2(P, -240));
        assert!(e.e[2].clone().abs() < rexp2(P, -240));
        assert!(e.e[3].clone().abs() < rexp2(P, -240));
    }

    #[test]
    fn newton_requires_enough_moments() {
        let m = synthetic(vec![rp(1.0), rp(0.5)]);
        assert!(matches!(
            ek_newton(&m, 5),
            Err(Error::InsufficientMoments { have: 2, need: 5 })
        ));
        assert!(matches!(
            ek_determinant(&m, 3),
            Err(Error::InsufficientMoments { have: 2, need: 3 })
        ));
    }

    #[test]
    fn quadratic_kernel_reproduces_reference_table() {
        // Reference e_k values for the quadratic-prefactor kernel. The
        // 10-digit reference table supports ~6-7 significant digits when
        // checked against the defining integrals (its k=7 entry is
        // inconsistent with them altogether), so the frozen values below
        // are the independently recomputed ones, verified by two integral
        // paths at two precisions; agreement with the rounded reference
        // digits is asserted at the level the table actually sustains.
        let m = moment_sequence(&Kernel::PolyGaussian(quad_kernel()), 10).unwrap();
        let e = ek_newton(&m, 10).unwrap();
        let frozen: [(usize, f64); 9] = [
            (2, 2.49357767249e-1),
            (3, 2.84108608927e-3),
            (4, 2.29101155560e-6),
            (5, -3.73463999286e-8),
            (6, -6.49383363510e-12),
            (7, -1.46855247426e-16),
            (8, -3.22664626948e-22),
            (9, -8.41430089056e-29),
            (10, -2.39649631865e-36),
        ];
        for (k, v) in frozen {
            let tol = rp(2e-11);
            let rel = ((e.e[k].clone() / rp(v)) - 1i32).abs();
            assert!(rel < tol, "k={k}: {} vs frozen {v}", e.e[k].to_f64());
        }
        let reference: [(usize, f64); 8] = [
            (2, 0.2493580000),
            (3, 0.002841083333),
            (4, 2.291012500e-6),
            (5, -3.7346411667e-8),
            (6, -6.493833333e-12),
            (8, -3.226636905e-22),
            (9, -8.414296737e-29),
            (10, -2.396497465e-36),
        ];
        for (k, v) in reference {
            let rel = ((e.e[k].clone() / rp(v)) - 1i32).abs();
            assert!(rel < rp(5e-6), "k={k} drifted from reference: {rel}");
        }
    }

    #[test]
    fn gaussian_newton_matches_closed_form() {
        // Scale-relative comparison: an e_k of size 1e-13 emerges from
        // cancellation of order-one products, so its error floor is
        // absolute at 2^-P regardless of how small the value is.
        let k = gauss(1.0, 4.0);
        let beta = gaussian_beta(&k);
        let m = moment_sequence(&Kernel::Gaussian(k), 8).unwrap();
        let e = ek_newton(&m, 8).unwrap();
        let tol = rexp2(P, -(P as i32 - 40));
        for kk in 0..=8u32 {
            let closed = ek_gaussian_closed(&beta, kk);
            assert!(
                scale_close(&e.e[kk as usize], &closed, &tol),
                "k={kk}: {} vs {}",
                e.e[kk as usize].to_f64(),
                closed.to_f64()
            );
        }
    }

    #[test]
    fn closed_form_small_cases() {
        let beta = rrat(P, -1, 3);
        assert_eq!(ek_gaussian_closed(&beta, 0), rint(P, 1));
        // k=1: (1-beta)/(1-beta) = 1, the trace.
        assert!((ek_gaussian_closed(&beta, 1) - 1i32).abs() < rexp2(P, -250));
    }

    #[test]
    fn closed_form_matches_newton_across_ratios() {
        // Synthetic moment sequences from the geometric spectrum for
        // several ratios, k up to 15.
        for b in [-0.9f64, -0.5, 0.3, 0.9] {
            let beta = rp(b);
            let mut values = Vec::new();
            for ell in 1..=15u32 {
                let num = (Real::with_val(P, 1) - &beta).pow(ell);
                let den = Real::with_val(P, 1) - beta.clone().pow(ell);
                values.push(num / den);
            }
            let m = synthetic(values);
            let e = ek_newton(&m, 15).unwrap();
            let tol = rexp2(P, -(P as i32 - 48));
            for k in 0..=15u32 {
                let closed = ek_gaussian_closed(&beta, k);
                assert!(
                    scale_close(&e.e[k as usize], &closed, &tol),
                    "beta={b}, k={k}"
                );
            }
        }
    }

    #[test]
    fn determinant_small_cases() {
        let m = synthetic(vec![rp(0.8), rp(0.9)]);
        // k=1: M_1. k=2: (M_1^2 - M_2)/2.
        assert!((ek_determinant(&m, 1).unwrap() - rp(0.8)).abs() < rexp2(P, -240));
        let want = (rp(0.8).square() - rp(0.9)) / rint(P, 2);
        assert!((ek_determinant(&m, 2).unwrap() - want).abs() < rexp2(P, -240));
    }

    #[test]
    fn determinant_matches_newton_on_quadratic_kernel() {
        let m = moment_sequence(&Kernel::PolyGaussian(quad_kernel()), 10).unwrap();
        let e = ek_newton(&m, 10).unwrap();
        let tol = rexp2(P, -(P as i32 - 40));
        for k in 1..=10u32 {
            let det = ek_determinant(&m, k).unwrap();
            assert!(
                scale_close(&det, &e.e[k as usize], &tol),
                "k={k}: det {} vs newton {}",
                det.to_f64(),
                e.e[k as usize].to_f64()
            );
        }
    }

    #[test]
    fn bound_check_accepts_true_norm_budget() {
        // For A=1, C=4 the 1-norm is sqrt(C/A) = 2.
        let m = moment_sequence(&Kernel::Gaussian(gauss(1.0, 4.0)), 10).unwrap();
        let mut e = ek_newton(&m, 10).unwrap();
        assert_eq!(e.certify_budget(&rp(2.0)), None);
        assert!(e.budget.is_some());
    }

    #[test]
    fn bound_check_flags_undersized_budget() {
        let m = moment_sequence(&Kernel::Gaussian(gauss(1.0, 4.0)), 6).unwrap();
        let e = ek_newton(&m, 6).unwrap();
        // e_1 = 1 > 0.5 = c^1/1! already.
        assert_eq!(check_ek_bound(&e, &rp(0.5)), Some(1));
    }

    #[test]
    fn bound_check_rank_one() {
        let lam = rp(0.6);
        let m = synthetic(vec![lam.clone(), lam.clone().square()]);
        let e = ek_newton(&m, 2).unwrap();
        assert_eq!(check_ek_bound(&e, &lam), None);
    }

    #[test]
    fn positive_spectrum_gives_positive_ek() {
        // A >= C means beta >= 0: all eigenvalues nonnegative, so every e_k
        // is nonnegative. A < C flips beta's sign and some e_k with it.
        let m = moment_sequence(&Kernel::Gaussian(gauss(4.0, 1.0)), 8).unwrap();
        let e = ek_newton(&m, 8).unwrap();
        for ek in &e.e {
            assert!(*ek >= 0);
        }
        let m = moment_sequence(&Kernel::Gaussian(gauss(1.0, 4.0)), 8).unwrap();
        let e = ek_newton(&m, 8).unwrap();
        assert!(e.e.iter().any(|ek| *ek < 0));
    }
}
