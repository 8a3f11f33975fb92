//! High-precision spectral analysis for self-adjoint trace-class integral
//! operators with (polynomial-)Gaussian kernels on the real line.
//!
//! The pipeline: kernel moments `M_l = Tr(K^l)` are evaluated in closed form
//! by a Wick-theorem Gaussian integral engine, converted to elementary
//! symmetric functions `e_k` through Newton's identities, and the truncated
//! generating polynomial `g_n(x) = sum e_k x^k` then yields
//!
//! * a finite spectrum approximation `Lambda_n = { -1/x : g_n(x) = 0 }`,
//! * minimal-eigenvalue estimates `q_{n,0}` (smallest positive root of `g_n`)
//!   and rigorous monotone lower bounds `q_{n,c}` (smallest positive root of
//!   the tail-corrected `h_{n,c}`),
//! * Schatten 1-norm upper bounds via a Hilbert-Schmidt factorization
//!   `K = K1 K2` with a free parameter `w`, optimized numerically, and
//! * an independent Nystrom discretization on Gauss-Hermite nodes serving as
//!   ground truth for tests and convergence reports.
//!
//! All arithmetic is arbitrary-precision binary floating point (MPFR via the
//! `rug` crate), round-to-nearest. Precision is carried by the values
//! themselves: constructors take an explicit precision in bits, and every
//! operation computes at the precision of its primary input. The default
//! working precision is [`DEFAULT_PREC`] (256 bits); anything below
//! [`MIN_PREC`] is rejected by constructors. Results are deterministic for a
//! fixed precision.

pub mod diag;
pub mod elemsym;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod normbound;
pub mod num;
pub mod optimize;
pub mod poly;
pub mod roots;
pub mod spectrum;
pub mod wick;

pub use error::Error;
pub use num::{Complex, Prec, Real};

/// Default working precision in bits for spectral computations.
pub const DEFAULT_PREC: Prec = 256;

/// Minimum supported precision in bits.
pub const MIN_PREC: Prec = 64;

/// Default relative tolerance for root refinement at the default precision.
///
/// Expressed as a power of two so it scales exactly: `2^-128`.
pub const DEFAULT_TOL_EXP: i32 = -128;
