//! Small dense linear algebra at arbitrary precision: complex LU (for
//! determinants, solves and inverses of the quadratic-form matrices),
//! real Cholesky (positive-definiteness witness), and a cyclic Jacobi
//! eigensolver for real symmetric matrices.
//!
//! Matrix orders here are tiny (quadratic forms) or moderate (quadrature
//! discretizations, a few hundred), so simple dense algorithms are the
//! right tool.

use rug::ops::CompleteRound;

use crate::num::{cabs, czero, rint, rzero, Complex, Prec, Real};

/// Dense complex matrix, row major.
#[derive(Debug, Clone)]
pub struct CMat {
    n: usize,
    m: usize,
    data: Vec<Complex>,
}

impl CMat {
    pub fn zeros(p: Prec, n: usize, m: usize) -> Self {
        CMat { n, m, data: vec![czero(p); n * m] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex>(n: usize, m: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        CMat { n, m, data }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn at(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.m + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex {
        &mut self.data[i * self.m + j]
    }

    pub fn prec(&self) -> Prec {
        self.data.iter().map(|z| z.prec().0).max().unwrap_or(64)
    }

    /// Frobenius norm.
    pub fn frob(&self) -> Real {
        let p = self.prec();
        let mut acc = rzero(p);
        for z in &self.data {
            acc += cabs(z).square();
        }
        acc.sqrt()
    }

    /// LU factorization with partial pivoting by magnitude. `None` when a
    /// pivot column is exactly zero (structurally singular at working
    /// precision); near-singularity is the caller's check, via `det`.
    pub fn lu(&self) -> Option<Lu> {
        assert_eq!(self.n, self.m, "LU needs a square matrix");
        let n = self.n;
        let p = self.prec();
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = false;
        for k in 0..n {
            let mut best = k;
            let mut best_mag = cabs(a.at(k, k));
            for i in (k + 1)..n {
                let mag = cabs(a.at(i, k));
                if mag > best_mag {
                    best_mag = mag;
                    best = i;
                }
            }
            if best_mag.is_zero() {
                return None;
            }
            if best != k {
                for j in 0..n {
                    a.data.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
                parity = !parity;
            }
            let pivot = a.at(k, k).clone();
            for i in (k + 1)..n {
                let factor = (a.at(i, k) / &pivot).complete((p, p));
                *a.at_mut(i, k) = factor.clone();
                for j in (k + 1)..n {
                    let t = (&factor * a.at(k, j)).complete((p, p));
                    *a.at_mut(i, j) -= t;
                }
            }
        }
        Some(Lu { a, perm, parity })
    }
}

/// Packed LU factors with the pivoting permutation.
pub struct Lu {
    a: CMat,
    perm: Vec<usize>,
    parity: bool,
}

impl Lu {
    /// Determinant: signed product of the pivots.
    pub fn det(&self) -> Complex {
        let p = self.a.prec();
        let n = self.a.n;
        let mut d = Complex::with_val(p, (if self.parity { -1 } else { 1 }, 0));
        for k in 0..n {
            d *= self.a.at(k, k);
        }
        d
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.a.n;
        assert_eq!(b.len(), n);
        let p = self.a.prec();
        let mut x: Vec<Complex> = self.perm.iter().map(|&i| b[i].clone()).collect();
        for i in 1..n {
            for j in 0..i {
                let t = (self.a.at(i, j) * &x[j]).complete((p, p));
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = (self.a.at(i, j) * &x[j]).complete((p, p));
                x[i] -= t;
            }
            x[i] /= self.a.at(i, i);
        }
        x
    }

    /// Inverse by solving against the identity columns.
    pub fn inverse(&self) -> CMat {
        let n = self.a.n;
        let p = self.a.prec();
        let mut out = CMat::zeros(p, n, n);
        for j in 0..n {
            let mut e = vec![czero(p); n];
            e[j] = Complex::with_val(p, (1, 0));
            let col = self.solve(&e);
            for i in 0..n {
                *out.at_mut(i, j) = col[i].clone();
            }
        }
        out
    }
}

/// Dense real matrix, row major.
#[derive(Debug, Clone)]
pub struct RMat {
    n: usize,
    m: usize,
    data: Vec<Real>,
}

impl RMat {
    pub fn zeros(p: Prec, n: usize, m: usize) -> Self {
        RMat { n, m, data: vec![rzero(p); n * m] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Real>(n: usize, m: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        RMat { n, m, data }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn at(&self, i: usize, j: usize) -> &Real {
        &self.data[i * self.m + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Real {
        &mut self.data[i * self.m + j]
    }

    pub fn prec(&self) -> Prec {
        self.data.iter().map(|z| z.prec()).max().unwrap_or(64)
    }

    pub fn frob(&self) -> Real {
        let p = self.prec();
        let mut acc = rzero(p);
        for z in &self.data {
            acc += z.clone().square();
        }
        acc.sqrt()
    }

    /// Cholesky factor `L` with `A = L L^T`, or `None` when `A` is not
    /// positive definite (a pivot radicand fails to be strictly positive).
    pub fn cholesky(&self) -> Option<RMat> {
        assert_eq!(self.n, self.m);
        let n = self.n;
        let p = self.prec();
        let mut l = RMat::zeros(p, n, n);
        for j in 0..n {
            let mut d = self.at(j, j).clone();
            for k in 0..j {
                d -= l.at(j, k).clone().square();
            }
            if !(d > 0) {
                return None;
            }
            let root = d.sqrt();
            *l.at_mut(j, j) = root.clone();
            for i in (j + 1)..n {
                let mut s = self.at(i, j).clone();
                for k in 0..j {
                    s -= (l.at(i, k) * l.at(j, k)).complete(p);
                }
                *l.at_mut(i, j) = s / &root;
            }
        }
        Some(l)
    }

    /// Solves the lower-triangular system `L y = b`.
    pub fn solve_lower(&self, b: &[Real]) -> Vec<Real> {
        let n = self.n;
        let p = self.prec();
        let mut y: Vec<Real> = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let t = (self.at(i, j) * &y[j]).complete(p);
                y[i] -= t;
            }
            y[i] /= self.at(i, i);
        }
        y
    }

    /// Solves the upper-triangular system `L^T x = b` for lower `L`.
    pub fn solve_lower_transpose(&self, b: &[Real]) -> Vec<Real> {
        let n = self.n;
        let p = self.prec();
        let mut x: Vec<Real> = b.to_vec();
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = (self.at(j, i) * &x[j]).complete(p);
                x[i] -= t;
            }
            x[i] /= self.at(i, i);
        }
        x
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.
/// Converges when the off-diagonal Frobenius norm drops below
/// `2^-(prec/2)` times the initial Frobenius norm. With `track_row0` the
/// first row of the accumulated rotation is returned as well; its entries
/// are the first components of the orthonormal eigenvectors, which is all
/// a Golub-Welsch quadrature rule needs.
pub fn jacobi_eigen(a: &RMat, prec: Prec, track_row0: bool) -> (Vec<Real>, Option<Vec<Real>>) {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut b = a.clone();
    let mut row0: Option<Vec<Real>> = if track_row0 {
        let mut r = vec![rzero(prec); n];
        r[0] = Real::with_val(prec, 1);
        Some(r)
    } else {
        None
    };
    if n == 1 {
        return (vec![b.at(0, 0).clone()], row0);
    }

    let frob0 = b.frob();
    let target = (&frob0 * &crate::num::rexp2(prec, -((prec / 2) as i32))).complete(prec);
    // Rotations on elements already far below the target are wasted work.
    let skip = (&target / &rint(prec, (n * n) as i64)).complete(prec);

    let off = |b: &RMat| -> Real {
        let mut acc = rzero(prec);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += b.at(i, j).clone().square();
                }
            }
        }
        acc.sqrt()
    };

    let one = rint(prec, 1);
    for _sweep in 0..200 {
        if off(&b) <= target {
            break;
        }
        for p_idx in 0..n - 1 {
            for q_idx in p_idx + 1..n {
                let apq = b.at(p_idx, q_idx).clone();
                if apq.clone().abs() <= skip {
                    continue;
                }
                let app = b.at(p_idx, p_idx).clone();
                let aqq = b.at(q_idx, q_idx).clone();
                let tau: Real = ((&aqq - &app).complete(prec)) / ((&apq * &rint(prec, 2)).complete(prec));
                let t = if tau.is_zero() {
                    one.clone()
                } else {
                    let mag = (tau.clone().square() + &one).sqrt();
                    let denom = tau.clone().abs() + mag;
                    let t = (&one / &denom).complete(prec);
                    if tau.is_sign_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let c = (&one / &(t.clone().square() + &one).sqrt()).complete(prec);
                let s = (&t * &c).complete(prec);

                // Rows/columns p and q rotate; the pivot pair goes to
                // (app - t*apq, aqq + t*apq, 0).
                for i in 0..n {
                    if i == p_idx || i == q_idx {
                        continue;
                    }
                    let aip = b.at(i, p_idx).clone();
                    let aiq = b.at(i, q_idx).clone();
                    let new_p = (&c * &aip).complete(prec) - (&s * &aiq).complete(prec);
                    let new_q = (&s * &aip).complete(prec) + (&c * &aiq).complete(prec);
                    *b.at_mut(i, p_idx) = new_p.clone();
                    *b.at_mut(p_idx, i) = new_p;
                    *b.at_mut(i, q_idx) = new_q.clone();
                    *b.at_mut(q_idx, i) = new_q;
                }
                let shift = (&t * &apq).complete(prec);
                *b.at_mut(p_idx, p_idx) = app - &shift;
                *b.at_mut(q_idx, q_idx) = aqq + &shift;
                *b.at_mut(p_idx, q_idx) = rzero(prec);
                *b.at_mut(q_idx, p_idx) = rzero(prec);

                if let Some(r) = row0.as_mut() {
                    let rp = r[p_idx].clone();
                    let rq = r[q_idx].clone();
                    r[p_idx] = (&c * &rp).complete(prec) - (&s * &rq).complete(prec);
                    r[q_idx] = (&s * &rp).complete(prec) + (&c * &rq).complete(prec);
                }
            }
        }
    }

    let eigen: Vec<Real> = (0..n).map(|i| b.at(i, i).clone()).collect();
    (eigen, row0)
}
