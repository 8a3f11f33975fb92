//! Independent ground truth for the approximation pipeline: the exact
//! Gaussian spectrum in closed form, and a quadrature (Nystrom)
//! discretization of the integral operator diagonalized by the in-house
//! symmetric eigensolver.
//!
//! Everything here deliberately avoids the moment / symmetric-function
//! machinery, so agreement between the two routes is meaningful evidence.

use rug::ops::CompleteRound;

use crate::error::Error;
use crate::kernel::{GaussianKernel, Kernel};
use crate::linalg::{jacobi_eigen, RMat};
use crate::moments::gaussian_beta;
use crate::num::{rexp2, rint, rpi, rzero, Prec, Real};

/// Leading eigenvalues `(1-beta) beta^i` of a trace-normalized Gaussian
/// kernel operator.
#[derive(Debug, Clone)]
pub struct ExactGaussianSpectrum {
    pub beta: Real,
    pub eigenvalues: Vec<Real>,
}

impl ExactGaussianSpectrum {
    /// Exact operator 1-norm: `(1-beta)/(1-|beta|)`, the limit of the
    /// partial absolute sums.
    pub fn l1_norm(&self) -> Real {
        let p = self.beta.prec();
        (rint(p, 1) - &self.beta) / (rint(p, 1) - self.beta.clone().abs())
    }
}

/// First `count` eigenvalues of a Gaussian kernel operator.
pub fn exact_gaussian_spectrum(k: &GaussianKernel, count: usize) -> ExactGaussianSpectrum {
    assert!(count >= 1, "need at least one eigenvalue");
    let p = k.prec;
    let beta = gaussian_beta(k);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut cur = rint(p, 1) - &beta;
    for _ in 0..count {
        eigenvalues.push(cur.clone());
        cur *= &beta;
    }
    ExactGaussianSpectrum { beta, eigenvalues }
}

/// Gauss-Hermite nodes and weights for weight `e^{-x^2}`, via the
/// symmetric tridiagonal Jacobi matrix (off-diagonal `sqrt(k/2)`)
/// diagonalized by the module's own solver; the squared first eigenvector
/// components give the weights (Golub-Welsch). Nodes ascend.
pub fn gauss_hermite(m: usize, p: Prec) -> (Vec<Real>, Vec<Real>) {
    assert!(m >= 1, "quadrature needs at least one node");
    let mut j = RMat::zeros(p, m, m);
    for k in 1..m {
        let b = (rint(p, k as i64) / rint(p, 2)).sqrt();
        *j.at_mut(k - 1, k) = b.clone();
        *j.at_mut(k, k - 1) = b;
    }
    let (vals, row0) = jacobi_eigen(&j, p, true);
    let row0 = row0.expect("tracking requested");
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    let sqrt_pi = rpi(p).sqrt();
    let nodes: Vec<Real> = idx.iter().map(|&i| vals[i].clone()).collect();
    let weights: Vec<Real> =
        idx.iter().map(|&i| row0[i].clone().square() * &sqrt_pi).collect();
    (nodes, weights)
}

/// Discretized operator on Gauss-Hermite nodes with its spectrum.
#[derive(Debug, Clone)]
pub struct NystromModel {
    pub m: usize,
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
    /// Symmetrized `B_ij = s_i K(x_i, x_j) s_j` with
    /// `s_i = sqrt(w_i e^{x_i^2})`.
    pub matrix: RMat,
    /// Sorted by decreasing magnitude.
    pub eigenvalues: Vec<Real>,
}

/// Discretizes the operator by Gauss-Hermite quadrature and diagonalizes.
///
/// The eigenproblem of the plain collocation matrix `w_j e^{x_j^2}
/// K(x_i,x_j)` is made symmetric by the similarity `s_i K s_j` with `s_i =
/// sqrt(w_i e^{x_i^2})`, which preserves eigenvalues. Only real symmetric
/// discretizations are handled: a kernel whose matrix has an imaginary or
/// asymmetric part beyond `2^-(P-16)` relative is rejected as
/// [`Error::NonHermitianResidual`].
pub fn nystrom_spectrum(k: &Kernel, m: usize) -> Result<NystromModel, Error> {
    assert!(m >= 8, "a meaningful discretization needs several nodes");
    let p = k.prec();
    let (nodes, weights) = gauss_hermite(m, p);
    let s: Vec<Real> = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| ((w * &x.clone().square().exp()).complete(p)).sqrt())
        .collect();

    let mut mat = RMat::zeros(p, m, m);
    let mut max_abs = rzero(p);
    let mut imag_worst = rzero(p);
    for i in 0..m {
        for j in 0..m {
            let (re, im) = k.eval(&nodes[i], &nodes[j]).into_real_imag();
            let scaled_im = ((&s[i] * &im.abs()).complete(p)) * &s[j];
            if scaled_im > imag_worst {
                imag_worst = scaled_im;
            }
            let b = ((&s[i] * &re).complete(p)) * &s[j];
            let a = b.clone().abs();
            if a > max_abs {
                max_abs = a;
            }
            *mat.at_mut(i, j) = b;
        }
    }
    let mut asym = rzero(p);
    for i in 0..m {
        for j in (i + 1)..m {
            let d = (mat.at(i, j) - mat.at(j, i)).complete(p).abs();
            if d > asym {
                asym = d;
            }
        }
    }
    let residual = if asym > imag_worst { asym } else { imag_worst };
    let tol = (rint(p, 1) + &max_abs) * rexp2(p, -(p as i32 - 16));
    if residual > tol {
        return Err(Error::NonHermitianResidual {
            residual: format!("{:e}", residual.to_f64()),
        });
    }
    // Average out the rounding asymmetry so the eigensolver sees an
    // exactly symmetric matrix.
    for i in 0..m {
        for j in (i + 1)..m {
            let avg = ((mat.at(i, j) + mat.at(j, i)).complete(p)) / rint(p, 2);
            *mat.at_mut(i, j) = avg.clone();
            *mat.at_mut(j, i) = avg;
        }
    }

    let (mut eigenvalues, _) = jacobi_eigen(&mat, p, false);
    eigenvalues.sort_by(|a, b| b.clone().abs().partial_cmp(&a.clone().abs()).unwrap());
    Ok(NystromModel { m, nodes, weights, matrix: mat, eigenvalues })
}

/// `(sum |lambda|, min(0, min lambda), sum |min(lambda, 0)|, sum lambda)`
/// of a discrete spectrum.
pub fn oracle_quantities(model: &NystromModel) -> (Real, Real, Real, Real) {
    let p = model.matrix.prec();
    let mut l1 = rzero(p);
    let mut lambda_min = rzero(p);
    let mut negativity = rzero(p);
    let mut trace = rzero(p);
    for l in &model.eigenvalues {
        l1 += l.clone().abs();
        trace += l;
        if *l < 0 {
            negativity += -l.clone();
            if *l < lambda_min {
                lambda_min = l.clone();
            }
        }
    }
    (l1, lambda_min, negativity, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::PolyGaussianKernel;
    use crate::moments::gaussian_moment;
    use crate::num::{rf64, rrat};
    use rug::ops::Pow;

    fn gauss(p: Prec, a: f64, c: f64) -> GaussianKernel {
        GaussianKernel::centered(p, rf64(p, a), rf64(p, c)).unwrap()
    }

    #[test]
    fn exact_spectrum_alternating() {
        const P: Prec = 256;
        let s = exact_gaussian_spectrum(&gauss(P, 1.0, 4.0), 60);
        assert!((s.beta.clone() - rrat(P, -1, 3)).abs() < rexp2(P, -250));
        for (i, l) in s.eigenvalues.iter().enumerate().take(10) {
            let want = rrat(P, 4, 3) * rrat(P, -1, 3).pow(i as u32);
            assert!((l - &want).complete(P).abs() < rexp2(P, -240), "i = {i}");
        }
        let l1 = s
            .eigenvalues
            .iter()
            .fold(rzero(P), |acc, l| acc + l.clone().abs());
        assert!((l1 - rint(P, 2)).abs() < rf64(P, 1e-25));
        assert!((s.l1_norm() - rint(P, 2)).abs() < rexp2(P, -250));
    }

    #[test]
    fn exact_spectrum_degenerate() {
        const P: Prec = 128;
        let s = exact_gaussian_spectrum(&gauss(P, 2.0, 2.0), 5);
        assert!(s.beta.is_zero());
        assert!((s.eigenvalues[0].clone() - 1i32).abs() < rexp2(P, -120));
        for l in &s.eigenvalues[1..] {
            assert!(l.is_zero());
        }
    }

    #[test]
    fn exact_spectrum_reproduces_moments() {
        const P: Prec = 256;
        let k = gauss(P, 1.0, 4.0);
        let s = exact_gaussian_spectrum(&k, 400);
        for ell in 1..=6u32 {
            let sum = s
                .eigenvalues
                .iter()
                .fold(rzero(P), |acc, l| acc + l.clone().pow(ell));
            let want = gaussian_moment(&k, ell);
            assert!((sum - &want).abs() < rf64(P, 1e-30), "ell = {ell}");
        }
    }

    #[test]
    fn hermite_rule_small_cases() {
        const P: Prec = 256;
        let (n1, w1) = gauss_hermite(1, P);
        assert!(n1[0].is_zero());
        assert!((w1[0].clone() - rpi(P).sqrt()).abs() < rexp2(P, -200));

        let (n2, w2) = gauss_hermite(2, P);
        let half = rrat(P, 1, 2);
        assert!((n2[0].clone() + half.clone().sqrt()).abs() < rexp2(P, -200));
        assert!((n2[1].clone() - half.sqrt()).abs() < rexp2(P, -200));
        assert!((w2[0].clone() - rpi(P).sqrt() / rint(P, 2)).abs() < rexp2(P, -200));
        assert!((w2[1].clone() - &w2[0]).abs() < rexp2(P, -200));
    }

    #[test]
    fn hermite_rule_integrates() {
        const P: Prec = 256;
        let (nodes, weights) = gauss_hermite(40, P);
        // Total mass: int e^{-x^2} dx = sqrt(pi).
        let mass = weights.iter().fold(rzero(P), |acc, w| acc + w);
        assert!((mass - rpi(P).sqrt()).abs() < rf64(P, 1e-25));
        // Degree-4 exactness: int x^4 e^{-x^2} dx = 3 sqrt(pi) / 4.
        let m4 = nodes
            .iter()
            .zip(&weights)
            .fold(rzero(P), |acc, (x, w)| acc + x.clone().pow(4u32) * w);
        assert!((m4 - rint(P, 3) * rpi(P).sqrt() / rint(P, 4)).abs() < rf64(P, 1e-25));
        // Odd moments vanish by symmetry.
        let m3 = nodes
            .iter()
            .zip(&weights)
            .fold(rzero(P), |acc, (x, w)| acc + x.clone().pow(3u32) * w);
        assert!(m3.abs() < rf64(P, 1e-30));
    }

    #[test]
    fn nystrom_matches_exact_gaussian() {
        const P: Prec = 128;
        let k = gauss(P, 1.0, 4.0);
        let model = nystrom_spectrum(&Kernel::Gaussian(k.clone()), 120).unwrap();
        let exact = exact_gaussian_spectrum(&k, 10);
        // Discretization error at m=120 peaks at 6.4e-8 (index 9) and is
        // deterministic; the tighter 1e-8 level needs m=140, checked below.
        for i in 0..10 {
            let d = (&model.eigenvalues[i] - &exact.eigenvalues[i]).complete(P).abs();
            assert!(d < rf64(P, 1e-7), "i = {i}: off by {d}");
        }
        let (l1, lmin, neg, tr) = oracle_quantities(&model);
        assert!((tr - 1i32).abs() < rf64(P, 1e-6));
        assert!((l1 - 2i32).abs() < rf64(P, 1e-6));
        assert!((lmin - rrat(P, -4, 9)).abs() < rf64(P, 1e-8));
        // Negative part of the exact spectrum sums to (2 - 1)/2 = 1/2.
        assert!((neg - rrat(P, 1, 2)).abs() < rf64(P, 1e-6));
    }

    #[test]
    fn nystrom_refinement_reaches_eigenvalue_tolerance() {
        const P: Prec = 128;
        let k = gauss(P, 1.0, 4.0);
        let model = nystrom_spectrum(&Kernel::Gaussian(k.clone()), 140).unwrap();
        let exact = exact_gaussian_spectrum(&k, 10);
        for i in 0..10 {
            let d = (&model.eigenvalues[i] - &exact.eigenvalues[i]).complete(P).abs();
            assert!(d < rf64(P, 1e-8), "i = {i}: off by {d}");
        }
    }

    #[test]
    fn nystrom_psd_kernel_stays_nonnegative() {
        const P: Prec = 128;
        let k = PolyGaussianKernel::new(
            P,
            gauss(P, 1.5, 1.0),
            rf64(P, -1.0),
            rzero(P),
            rf64(P, 1.0),
            rzero(P),
            rzero(P),
            rf64(P, 1.0),
        )
        .unwrap();
        let model = nystrom_spectrum(&Kernel::PolyGaussian(k), 96).unwrap();
        for l in &model.eigenvalues {
            assert!(*l > rf64(P, -1e-8), "spurious negative eigenvalue {l}");
        }
        let (_, _, neg, tr) = oracle_quantities(&model);
        assert!((tr - 1i32).abs() < rf64(P, 1e-6));
        assert!(neg < rf64(P, 1e-8));
    }

    #[test]
    fn complex_kernel_rejected() {
        const P: Prec = 128;
        // B != 0 gives a genuinely complex (though self-adjoint) kernel;
        // the real discretization must refuse it rather than silently
        // dropping the imaginary part.
        let k = GaussianKernel::new(P, rf64(P, 1.0), rf64(P, 0.3), rf64(P, 1.0), rzero(P), rzero(P))
            .unwrap();
        assert!(matches!(
            nystrom_spectrum(&Kernel::Gaussian(k), 8),
            Err(Error::NonHermitianResidual { .. })
        ));
    }

    #[test]
    fn jacobi_agrees_with_characteristic_roots() {
        const P: Prec = 256;
        // Deterministic pseudo-random symmetric 20x20.
        let n = 20;
        let mut state: u64 = 0x243f6a8885a308d3;
        let mut entry = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rf64(P, ((state >> 16) % 2001) as f64 / 1000.0 - 1.0)
        };
        let mut a = RMat::zeros(P, n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = entry();
                *a.at_mut(i, j) = v.clone();
                *a.at_mut(j, i) = v;
            }
        }
        let (mut eigen, _) = jacobi_eigen(&a, P, false);
        eigen.sort_by(|x, y| x.partial_cmp(y).unwrap());

        // Characteristic polynomial from power traces and the symmetric
        // function recurrence; its roots are the eigenvalues.
        let matmul = |x: &RMat, y: &RMat| -> RMat {
            RMat::from_fn(n, n, |i, j| {
                let mut s = rzero(P);
                for t in 0..n {
                    s += (x.at(i, t) * y.at(t, j)).complete(P);
                }
                s
            })
        };
        let mut traces = Vec::with_capacity(n + 1);
        traces.push(rint(P, n as i64)); // tr(A^0)
        let mut pw = a.clone();
        for _ in 1..=n {
            let mut t = rzero(P);
            for i in 0..n {
                t += pw.at(i, i);
            }
            traces.push(t);
            pw = matmul(&pw, &a);
        }
        let mut esym = vec![rint(P, 1)];
        for kk in 1..=n {
            let mut acc = rzero(P);
            for i in 1..=kk {
                let term = (&esym[kk - i] * &traces[i]).complete(P);
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            esym.push(acc / rint(P, kk as i64));
        }
        // char(x) = sum_k (-1)^k e_k x^(n-k).
        let mut coeffs = vec![rzero(P); n + 1];
        for (kk, e) in esym.iter().enumerate() {
            let c = if kk % 2 == 0 { e.clone() } else { -e.clone() };
            coeffs[n - kk] = c;
        }
        let poly = crate::poly::UniPoly::new(coeffs);
        let mut roots =
            crate::roots::real_roots(&poly, P, &crate::roots::default_tol(P)).unwrap();
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(roots.len(), n, "all eigenvalues of a symmetric matrix are real");
        for (r, e) in roots.iter().zip(&eigen) {
            assert!((r - e).complete(P).abs() < rf64(P, 1e-20));
        }
    }
}
