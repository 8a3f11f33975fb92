//! Scalar layer: arbitrary-precision reals and complexes with a few
//! constructors and formatting helpers used across the crate.
//!
//! `Real` and `Complex` are MPFR/MPC-backed types from the `rug` crate.
//! Every value carries its own precision; helpers here take the precision
//! explicitly so call sites stay short.

use rug::float::Special;
use rug::ops::CompleteRound;

pub use rug::{Complex, Float as Real};

/// Precision in bits.
pub type Prec = u32;

/// Real zero at precision `p`.
pub fn rzero(p: Prec) -> Real {
    Real::with_val(p, 0)
}

/// Real from a machine integer at precision `p` (exact).
pub fn rint(p: Prec, v: i64) -> Real {
    Real::with_val(p, v)
}

/// Real from an `f64` at precision `p` (exact for `p >= 53`).
pub fn rf64(p: Prec, v: f64) -> Real {
    Real::with_val(p, v)
}

/// Correctly rounded quotient of two machine integers at precision `p`.
pub fn rrat(p: Prec, num: i64, den: i64) -> Real {
    Real::with_val(p, num) / Real::with_val(p, den)
}

/// `2^e` at precision `p` (exact).
pub fn rexp2(p: Prec, e: i32) -> Real {
    Real::with_val(p, Real::i_exp(1, e))
}

/// Pi at precision `p`.
pub fn rpi(p: Prec) -> Real {
    Real::with_val(p, rug::float::Constant::Pi)
}

/// Parses a decimal string into a `Real` at precision `p` with a single
/// correctly rounded conversion (no intermediate `f64`).
pub fn parse_real(p: Prec, s: &str) -> Result<Real, String> {
    match Real::parse(s) {
        Ok(incomplete) => {
            let v = Real::with_val(p, incomplete);
            if v.is_nan() {
                Err(format!("not a number: {s:?}"))
            } else {
                Ok(v)
            }
        }
        Err(e) => Err(format!("invalid number {s:?}: {e}")),
    }
}

/// Complex zero at precision `p`.
pub fn czero(p: Prec) -> Complex {
    Complex::with_val(p, (0, 0))
}

/// Complex with the given real part and zero imaginary part.
pub fn cre(p: Prec, re: &Real) -> Complex {
    Complex::with_val(p, (re, &rzero(p)))
}

/// Complex with the given imaginary part and zero real part.
pub fn cim(p: Prec, im: &Real) -> Complex {
    Complex::with_val(p, (&rzero(p), im))
}

/// Complex from real and imaginary parts.
pub fn cnew(p: Prec, re: &Real, im: &Real) -> Complex {
    Complex::with_val(p, (re, im))
}

/// Complex conjugate (owned).
pub fn conj(z: &Complex) -> Complex {
    let mut c = z.clone();
    c.conj_mut();
    c
}

/// `|z|` as a `Real` at the precision of `z`.
pub fn cabs(z: &Complex) -> Real {
    // MPC's abs lands in the real slot of a Complex; unwrap it.
    let p = z.prec();
    z.abs_ref().complete((p.0, p.1)).into_real_imag().0
}

/// True if both parts are finite (not NaN, not infinite).
pub fn cis_finite(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}

/// Scientific-notation decimal rendering with `digits` significant digits,
/// deterministic for a fixed precision. `0`, infinities and NaN render as
/// MPFR spells them.
pub fn sci(x: &Real, digits: usize) -> String {
    if x.is_zero() {
        // Normalize: MPFR renders zero without an exponent.
        let mut s = String::from(if x.is_sign_negative() { "-0." } else { "0." });
        s.push_str(&"0".repeat(digits.saturating_sub(1)));
        s.push_str("e0");
        return s;
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let s = x.to_string_radix(10, Some(digits));
    // MPFR may omit the exponent marker for moderate exponents; keep the
    // plain form, it round-trips exactly.
    s
}

/// Positive infinity at precision `p`.
pub fn rinf(p: Prec) -> Real {
    Real::with_val(p, Special::Infinity)
}

/// Closeness relative to the sequence scale: `|a - b| <= tol * max(1, |a|,
/// |b|)`. The right comparison for elements of a normalized sequence whose
/// leading entries are order one: tiny entries emerge from cancellation of
/// order-one terms, so their achievable accuracy is absolute, not relative.
pub fn scale_close(a: &Real, b: &Real, tol: &Real) -> bool {
    let p = a.prec().max(b.prec());
    let diff = (a - b).complete(p).abs();
    let scale = Real::with_val(p, 1).max(&a.clone().abs()).max(&b.clone().abs());
    diff <= scale * tol.clone()
}

/// Relative closeness check: `|a - b| <= tol * max(|a|, |b|)`, with equal
/// zeros counting as close.
pub fn rel_close(a: &Real, b: &Real, tol: &Real) -> bool {
    let p = a.prec().max(b.prec());
    let diff = (a - b).complete(p).abs();
    let ma = a.clone().abs();
    let mb = b.clone().abs();
    let scale = if ma > mb { ma } else { mb };
    if scale.is_zero() {
        return diff.is_zero();
    }
    diff <= scale * tol.clone()
}
