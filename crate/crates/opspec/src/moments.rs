//! Moment sequences `M_l = Tr K^l` of normalized kernels.
//!
//! Gaussian kernels have a closed form through the spectral ratio beta.
//! Polynomial-Gaussian kernels go through iterated composition: the running
//! power `K^j` is kept in factor form and extended by one composition per
//! order, with the trace taken on the diagonal. A per-kernel cache makes
//! sweeps over increasing order pay each composition once.

use rug::ops::{CompleteRound, Pow};

use crate::error::Error;
use crate::kernel::{FactorKernel, GaussianKernel, Kernel, PolyGaussianKernel};
use crate::num::{rexp2, Prec, Real};
use crate::wick::{compose, trace_factor};

/// Spectral ratio `beta = (sqrt A - sqrt C) / (sqrt A + sqrt C)`, in
/// `(-1, 1)` for any valid kernel. The whole Gaussian spectrum is the
/// geometric family `(1 - beta) beta^i`.
pub fn gaussian_beta(k: &GaussianKernel) -> Real {
    let p = k.prec;
    let sa = k.a.clone().sqrt();
    let sc = k.c.clone().sqrt();
    ((&sa - &sc).complete(p)) / ((&sa + &sc).complete(p))
}

fn closed_moment(beta: &Real, ell: u32, p: Prec) -> Real {
    let num = (Real::with_val(p, 1) - beta).pow(ell);
    let den = Real::with_val(p, 1) - beta.clone().pow(ell);
    num / den
}

/// Closed-form moment `(1 - beta)^l / (1 - beta^l)`, `l >= 1`.
pub fn gaussian_moment(k: &GaussianKernel, ell: u32) -> Real {
    assert!(ell >= 1, "moments are indexed from 1");
    closed_moment(&gaussian_beta(k), ell, k.prec)
}

/// Takes the real part of a trace, rejecting any imaginary residue beyond
/// `2^-(P-16)` relative to `max(1, |Re|)`; self-adjoint kernels have real
/// moments, so a larger residue means the input was not self-adjoint.
fn real_part_checked(t: crate::num::Complex, p: Prec) -> Result<Real, Error> {
    let (re, im) = t.into_real_imag();
    let scale = Real::with_val(p, 1).max(&re.clone().abs());
    if im.clone().abs() > scale * rexp2(p, -(p as i32 - 16)) {
        return Err(Error::DomainError(format!(
            "trace imaginary residue {im} exceeds self-adjointness tolerance"
        )));
    }
    Ok(re)
}

/// Per-kernel moment cache. Holds every computed `M_l` and, on the
/// composition path, the running factor-form power `K^j`.
pub struct MomentCache {
    kernel: Kernel,
    beta: Option<Real>,
    base: FactorKernel,
    power: Option<FactorKernel>,
    values: Vec<Real>,
}

impl MomentCache {
    pub fn new(k: &Kernel) -> Self {
        let beta = match k {
            Kernel::Gaussian(g) => Some(gaussian_beta(g)),
            Kernel::PolyGaussian(_) => None,
        };
        MomentCache {
            kernel: k.clone(),
            beta,
            base: k.to_factor(),
            power: None,
            values: Vec::new(),
        }
    }

    pub fn prec(&self) -> Prec {
        self.kernel.prec()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Highest order computed so far.
    pub fn computed_order(&self) -> u32 {
        self.values.len() as u32
    }

    /// `M_l`, computing and caching any missing lower orders first.
    pub fn moment(&mut self, ell: u32) -> Result<Real, Error> {
        assert!(ell >= 1, "moments are indexed from 1");
        while self.values.len() < ell as usize {
            self.extend()?;
        }
        Ok(self.values[ell as usize - 1].clone())
    }

    fn extend(&mut self) -> Result<(), Error> {
        let ell = self.values.len() as u32 + 1;
        let p = self.prec();
        let m = if let Some(beta) = &self.beta {
            closed_moment(beta, ell, p)
        } else {
            let power = match self.power.take() {
                None => self.base.clone(),
                Some(prev) => compose(&prev, &self.base)?,
            };
            let t = trace_factor(&power)?;
            self.power = Some(power);
            real_part_checked(t, p)?
        };
        self.values.push(m);
        Ok(())
    }
}

/// One moment of a polynomial-Gaussian kernel through the composition path.
/// For sweeps over many orders prefer [`MomentCache`] or
/// [`moment_sequence`], which reuse the intermediate powers.
pub fn polygauss_moment(k: &PolyGaussianKernel, ell: u32) -> Result<Real, Error> {
    MomentCache::new(&Kernel::PolyGaussian(k.clone())).moment(ell)
}

/// Batch moment sequence `M_1..M_n` with its source kernel.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    pub values: Vec<Real>,
    pub kernel: Kernel,
    pub max_order: u32,
}

impl MomentSequence {
    /// `M_l` for `1 <= l <= max_order`.
    pub fn m(&self, ell: u32) -> &Real {
        assert!(
            (1..=self.max_order).contains(&ell),
            "order {ell} outside 1..={}",
            self.max_order
        );
        &self.values[ell as usize - 1]
    }
}

/// Computes `M_1..M_n` for either kernel type.
pub fn moment_sequence(k: &Kernel, n: u32) -> Result<MomentSequence, Error> {
    assert!(n >= 1, "need at least one moment");
    let mut cache = MomentCache::new(k);
    cache.moment(n)?;
    Ok(MomentSequence { values: cache.values, kernel: cache.kernel, max_order: n })
}
