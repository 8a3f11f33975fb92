//! Polynomials over arbitrary-precision scalars.
//!
//! Two representations, chosen per use:
//!
//! * [`UniPoly`]: dense real-coefficient univariate, used by the root
//!   isolation code and the truncated series whose roots give eigenvalue
//!   estimates.
//! * [`MultiPoly`]: sparse complex-coefficient multivariate (exponent vector
//!   keyed), used for kernel prefactors and the Gaussian moment engine.

use std::collections::BTreeMap;

use rug::ops::{CompleteRound, Pow};

use crate::num::{cabs, czero, rzero, Complex, Prec, Real};

/// Dense univariate polynomial with real coefficients, lowest degree first.
/// Trailing zero coefficients are trimmed on construction; the zero
/// polynomial is the empty coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Real>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Real>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Working precision: maximum over coefficients, 64 for the zero poly.
    pub fn prec(&self) -> Prec {
        self.coeffs.iter().map(|c| c.prec()).max().unwrap_or(64)
    }

    /// Horner evaluation at full precision of `x`.
    pub fn eval(&self, x: &Real) -> Real {
        let p = self.prec().max(x.prec());
        let mut acc = rzero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_add(x, c);
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let p = self.prec();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Real::with_val(p, k as u64) * c)
            .collect();
        UniPoly::new(coeffs)
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> Real {
        let p = self.prec();
        let mut m = rzero(p);
        for c in &self.coeffs {
            let a = c.clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Divides every coefficient by the largest magnitude. No-op on zero.
    /// Keeps Euclidean remainder sequences in a sane dynamic range.
    pub fn normalized(&self) -> UniPoly {
        let m = self.max_abs_coeff();
        if m.is_zero() {
            return self.clone();
        }
        UniPoly::new(self.coeffs.iter().map(|c| (c / &m).complete(c.prec())).collect())
    }

    /// Drops coefficients below `threshold` in magnitude (relative cleanup
    /// after inexact remainder steps). Zeroes them; trimming happens via
    /// `new`.
    pub fn trimmed(&self, threshold: &Real) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.clone().abs() < *threshold {
                    rzero(c.prec())
                } else {
                    c.clone()
                }
            })
            .collect();
        UniPoly::new(coeffs)
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = q * div + r`, `deg r < deg div`. Panics on zero divisor.
    pub fn div_rem(&self, div: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let p = self.prec().max(div.prec());
        let dd = div.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut rem: Vec<Real> = self
            .coeffs
            .iter()
            .map(|c| {
                let mut v = rzero(p);
                v += c;
                v
            })
            .collect();
        let dq = rem.len() - 1 - dd;
        let mut quot = vec![rzero(p); dq + 1];
        let lead = &div.coeffs[dd];
        for k in (0..=dq).rev() {
            let q = (&rem[k + dd] / lead).complete(p);
            for j in 0..dd {
                let t = (&q * &div.coeffs[j]).complete(p);
                rem[k + j] -= t;
            }
            rem[k + dd] = rzero(p);
            quot[k] = q;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// `1 + max_k |a_k / a_n|`: every root lies in `[-B, B]`.
    pub fn cauchy_root_bound(&self) -> Real {
        let p = self.prec();
        let lead = self.coeffs.last().expect("zero polynomial has no root bound");
        let mut m = rzero(p);
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = (c / lead).complete(p).abs();
            if r > m {
                m = r;
            }
        }
        m + Real::with_val(p, 1)
    }
}

/// Sparse multivariate polynomial with complex coefficients, keyed by the
/// exponent vector. All keys have length `arity`. Exact-zero coefficients
/// are never stored.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Complex>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Complex) -> Self {
        let mut p = MultiPoly::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c * x^key` into the polynomial, combining with any existing
    /// term and dropping exact zeros.
    pub fn add_term(&mut self, key: Vec<u32>, c: Complex) {
        assert_eq!(key.len(), self.arity, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity);
        let mut out = MultiPoly::zero(self.arity);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                let p = ca.prec().0.max(cb.prec().0);
                out.add_term(key, (ca * cb).complete((p, p)));
            }
        }
        out
    }

    pub fn scale(&self, s: &Complex) -> MultiPoly {
        let mut out = MultiPoly::zero(self.arity);
        for (k, c) in &self.terms {
            let p = c.prec().0.max(s.prec().0);
            out.add_term(k.clone(), (c * s).complete((p, p)));
        }
        out
    }

    /// Coefficient-wise conjugate. Since the variables range over the reals
    /// this is the conjugate of the polynomial as a function.
    pub fn conj(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), crate::num::conj(c));
        }
        out
    }

    /// Reindexes variables: term exponent `key[i]` moves to slot `map[i]`
    /// of a fresh polynomial with `new_arity` variables.
    pub fn embed(&self, new_arity: usize, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.arity);
        assert!(map.iter().all(|&j| j < new_arity));
        let mut out = MultiPoly::zero(new_arity);
        for (k, c) in &self.terms {
            let mut key = vec![0u32; new_arity];
            for (i, &e) in k.iter().enumerate() {
                key[map[i]] += e;
            }
            out.add_term(key, c.clone());
        }
        out
    }

    /// Total degree of the highest-degree term; 0 for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: &[Complex]) -> Complex {
        assert_eq!(point.len(), self.arity);
        let p = point
            .iter()
            .map(|z| z.prec().0)
            .chain(self.terms.values().map(|c| c.prec().0))
            .max()
            .unwrap_or(64);
        let mut acc = czero(p);
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (e, z) in k.iter().zip(point) {
                if *e > 0 {
                    term *= z.pow(*e).complete((p, p));
                }
            }
            acc += term;
        }
        acc
    }

    /// Largest coefficient magnitude as a `Real`.
    pub fn max_abs_coeff(&self, p: Prec) -> Real {
        let mut m = rzero(p);
        for c in self.terms.values() {
            let a = cabs(c);
            if a > m {
                m = a;
            }
        }
        m
    }
}
