//! Complex arithmetic abstraction over which every numeric kernel is generic.
//!
//! Two instantiations are provided: [`num_complex::Complex64`] (binary64) and
//! [`ExtendedComplex`] (double-double real and imaginary parts, ~106
//! significand bits). Kernels never branch on the concrete type; precision
//! enters only through [`PrecisionProfile`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::Error;

mod dd;
mod extended;

pub use dd::Dd;
pub use extended::ExtendedComplex;

/// Unit roundoff and underflow threshold of a scalar instantiation.
///
/// `eps_p` is the relative precision carried by one arithmetic operation;
/// `f_norm` is the smallest positive magnitude that still holds full relative
/// precision. Both feed the rounding-error model of the evaluation loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionProfile {
    pub eps_p: f64,
    pub f_norm: f64,
}

impl PrecisionProfile {
    /// Profile of the binary64 instantiation. The unit roundoff is half the
    /// machine epsilon: one rounding step is off by at most 2^-53 relatively.
    pub const BINARY64: Self = Self {
        eps_p: f64::EPSILON / 2.0,
        f_norm: f64::MIN_POSITIVE,
    };

    /// Profile of the double-double instantiation: 2^-104 unit roundoff, with
    /// the underflow threshold inherited from the binary64 limbs.
    pub const EXTENDED: Self = Self {
        eps_p: f64::EPSILON * f64::EPSILON,
        f_norm: f64::MIN_POSITIVE,
    };
}

/// Field operations, exp/ln on the principal branch, and conversions needed
/// by the kernels.
///
/// The principal branch fixes Im(ln w) ∈ (−π, π]. Powers are always derived
/// from exp and ln (`powc`), never from repeated multiplication, so one branch
/// convention holds everywhere.
pub trait ComplexScalar:
    Copy
    + Clone
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Roundoff/underflow characteristics of this instantiation.
    const PROFILE: PrecisionProfile;

    fn zero() -> Self;
    fn one() -> Self;

    /// Embeds a binary64 real. Exact in both instantiations.
    fn from_f64(x: f64) -> Self;

    /// Builds a value from binary64 real and imaginary parts. Exact.
    fn from_parts(re: f64, im: f64) -> Self;

    /// Real part rounded to binary64.
    fn re_f64(self) -> f64;

    /// Imaginary part rounded to binary64.
    fn im_f64(self) -> f64;

    /// Magnitude rounded to binary64. Magnitudes only feed error estimates
    /// and comparisons, so binary64 range and precision suffice.
    fn abs(self) -> f64;

    fn conj(self) -> Self;

    /// Natural logarithm on the principal branch.
    fn ln(self) -> Self;

    fn exp(self) -> Self;

    /// w^s as exp(s·ln w) on the principal branch.
    fn powc(self, s: Self) -> Self {
        (s * self.ln()).exp()
    }

    fn is_finite(self) -> bool;

    /// Parses a complex literal: `a`, `ai`, `a+bi`, or `a-bi` with decimal
    /// real coefficients and no interior whitespace.
    fn parse(text: &str) -> Result<Self, Error>;

    /// Renders the value with the full precision of the instantiation (used
    /// where binary64 rounding would discard information).
    fn format_full(self) -> String;
}

impl ComplexScalar for Complex64 {
    const PROFILE: PrecisionProfile = PrecisionProfile::BINARY64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn re_f64(self) -> f64 {
        self.re
    }

    fn im_f64(self) -> f64 {
        self.im
    }

    fn abs(self) -> f64 {
        self.norm()
    }

    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    fn ln(self) -> Self {
        Complex64::ln(self)
    }

    fn exp(self) -> Self {
        Complex64::exp(self)
    }

    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn parse(text: &str) -> Result<Self, Error> {
        let (re_txt, im_txt) = split_literal(text)?;
        let re = parse_f64_strict(re_txt)?;
        let im = match im_txt {
            Some(t) => parse_f64_strict(t)?,
            None => 0.0,
        };
        Ok(Complex64::new(re, im))
    }

    fn format_full(self) -> String {
        format!("{}{}{}i", self.re, if self.im < 0.0 { "" } else { "+" }, self.im)
    }
}

/// w^s = exp(s·ln w), rejecting the undefined origin cases.
///
/// 0^s is 0 for Re s > 0 and undefined otherwise.
pub fn cpow<T: ComplexScalar>(w: T, s: T) -> Result<T, Error> {
    if w == T::zero() {
        if s.re_f64() > 0.0 {
            Ok(T::zero())
        } else {
            return Err(Error::Domain(
                "0^s is undefined for Re s <= 0".to_string(),
            ));
        }
    } else {
        Ok(w.powc(s))
    }
}

/// Log-magnitude of the factor z^n·n^λ, i.e. n·ln|z| + Re(λ)·ln n, computed
/// without forming the product so it stays meaningful when the product itself
/// underflows.
pub fn log_abs_pow<T: ComplexScalar>(z: T, n: usize, lambda: T) -> f64 {
    let nf = n as f64;
    nf * z.abs().ln() + lambda.re_f64() * nf.ln()
}

fn parse_f64_strict(text: &str) -> Result<f64, Error> {
    let ok = !text.is_empty()
        && text
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'+' | b'-' | b'e' | b'E'));
    if !ok {
        return Err(Error::Parse(format!("invalid real literal {text:?}")));
    }
    let v: f64 = text
        .parse()
        .map_err(|_| Error::Parse(format!("invalid real literal {text:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("literal {text:?} overflows")));
    }
    Ok(v)
}

/// Splits a complex literal into its real text and optional imaginary text
/// (sign included, trailing `i` stripped).
fn split_literal(text: &str) -> Result<(&str, Option<&str>), Error> {
    if text.is_empty() {
        return Err(Error::Parse("empty literal".to_string()));
    }
    if text.bytes().any(|b| b.is_ascii_whitespace()) {
        return Err(Error::Parse(format!(
            "whitespace inside complex literal {text:?}"
        )));
    }
    let bytes = text.as_bytes();
    // Last +/- that is not the leading sign and not an exponent sign marks
    // the start of the imaginary term.
    let mut sep = None;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            sep = Some(i);
        }
    }
    match sep {
        Some(i) => {
            let Some(im) = text[i..].strip_suffix('i') else {
                return Err(Error::Parse(format!(
                    "two terms but no trailing 'i' in {text:?}"
                )));
            };
            Ok((&text[..i], Some(unit_coefficient(im))))
        }
        None => match text.strip_suffix('i') {
            Some(im) => Ok(("0", Some(unit_coefficient(im)))),
            None => Ok((text, None)),
        },
    }
}

/// A bare sign (or nothing) before the trailing 'i' means a unit coefficient,
/// so "3+i" and "-i" read the usual way.
fn unit_coefficient(im: &str) -> &str {
    match im {
        "" | "+" => "1",
        "-" => "-1",
        _ => im,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_accepts_the_four_forms() {
        assert_eq!(Complex64::parse("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(Complex64::parse("-2").unwrap(), c(-2.0, 0.0));
        assert_eq!(Complex64::parse("4.5i").unwrap(), c(0.0, 4.5));
        assert_eq!(Complex64::parse("-4.5i").unwrap(), c(0.0, -4.5));
        assert_eq!(Complex64::parse("1.5+4.5i").unwrap(), c(1.5, 4.5));
        assert_eq!(Complex64::parse("1.5-4.5i").unwrap(), c(1.5, -4.5));
        assert_eq!(Complex64::parse("1e-3+2e2i").unwrap(), c(1e-3, 200.0));
        assert_eq!(Complex64::parse("3+i").unwrap(), c(3.0, 1.0));
        assert_eq!(Complex64::parse("3-i").unwrap(), c(3.0, -1.0));
        assert_eq!(Complex64::parse("i").unwrap(), c(0.0, 1.0));
        assert_eq!(Complex64::parse("-i").unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn parse_rejects_malformed_literals() {
        for bad in ["", "1 + 2i", "1+2", "2i+1", "nan", "inf", "1e999"] {
            assert!(Complex64::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn cpow_fixed_points() {
        let one = Complex64::one();
        assert_eq!(cpow(one, c(12.0, -3.5)).unwrap(), one);
        let sqrt = cpow(c(4.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((sqrt - c(2.0, 0.0)).norm() <= 4.0 * f64::EPSILON * 2.0);
        // e^(i*pi/2) = i
        let e = c(std::f64::consts::E, 0.0);
        let i = cpow(e, c(0.0, std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((i - c(0.0, 1.0)).norm() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn cpow_rejects_zero_base_without_positive_real_exponent() {
        assert!(cpow(Complex64::zero(), c(-1.0, 0.0)).is_err());
        assert!(cpow(Complex64::zero(), c(0.0, 1.0)).is_err());
        assert_eq!(cpow(Complex64::zero(), c(2.0, 1.0)).unwrap(), Complex64::zero());
    }

    #[test]
    fn log_abs_pow_hand_values() {
        let v = log_abs_pow(c(1.0, 0.0), 100, c(-0.5, 0.0));
        assert!((v - (-0.5 * 100.0f64.ln())).abs() < 1e-14);
        let v = log_abs_pow(c(0.5, 0.0), 10, Complex64::zero());
        assert!((v - 10.0 * 0.5f64.ln()).abs() < 1e-14);
        assert_eq!(log_abs_pow(c(1.0, 0.0), 5, Complex64::zero()), 0.0);
    }

    #[test]
    fn log_abs_pow_matches_direct_product_when_normalized() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm() < 1e-3 {
                continue;
            }
            let lam = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let n = rng.gen_range(1..200usize);
            let direct = z.powf(n as f64).norm().ln() + lam.re * (n as f64).ln();
            if !direct.is_finite() {
                continue;
            }
            let got = log_abs_pow(z, n, lam);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "z={z} n={n} lam={lam}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn binary64_profile_constants() {
        let p = <Complex64 as ComplexScalar>::PROFILE;
        assert_eq!(p.eps_p, 2.0f64.powi(-53));
        assert_eq!(p.f_norm, 2.2250738585072014e-308);
    }

    #[test]
    fn exp_ln_round_trip_binary64() {
        // The attainable bound scales with |ln w|: ln carries an absolute
        // rounding of order eps*|ln w|, which exp turns into the same
        // relative error in w.
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..1000 {
            let mag = 10f64.powf(rng.gen_range(-10.0..10.0));
            let arg = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let w = Complex64::from_polar(mag, arg);
            let back = ComplexScalar::exp(ComplexScalar::ln(w));
            let tol = 4.0 * f64::EPSILON * ComplexScalar::ln(w).norm().max(1.0);
            assert!(
                (back - w).norm() <= tol * w.norm(),
                "w={w}: came back {back}"
            );
        }
    }
}
