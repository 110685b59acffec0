//! Complex log-gamma and the Gauss closed form at unit argument, used as
//! the independent reference for branch-point evaluations. Both come in a
//! machine-precision flavor and an extended one; the latter keeps the
//! reference error far below the tolerances being classified against.

use crate::scalar::{ComplexScalar, Dd, ExtendedComplex};
use crate::Error;
use num_complex::Complex64;
use std::sync::LazyLock;

// Lanczos approximation, g = 7 with 9 coefficients.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

const HALF_LN_TWO_PI: f64 = 0.9189385332046727;

fn is_nonpositive_integer(w: Complex64) -> bool {
    w.im == 0.0 && w.re <= 0.0 && w.re.fract() == 0.0
}

fn lanczos_half_plane(w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, &ck) in LANCZOS.iter().enumerate().skip(1) {
        acc += ck / (w + (k as f64 - 1.0));
    }
    let t = w + 6.5;
    Complex64::new(HALF_LN_TWO_PI, 0.0) + (w - 0.5) * t.ln() - t + acc.ln()
}

/// Principal-style logarithm of Γ(w), accurate to near machine precision in
/// the exponentiated sense; the imaginary part may differ from the principal
/// branch by a multiple of 2π. Non-positive integers are poles.
pub fn complex_log_gamma(w: Complex64) -> Result<Complex64, Error> {
    if is_nonpositive_integer(w) {
        return Err(Error::Pole(format!("log-gamma pole at w = {w}")));
    }
    if w.re >= 0.5 {
        return Ok(lanczos_half_plane(w));
    }
    // reflection through Γ(w)Γ(1−w) = π / sin(πw)
    let pi = std::f64::consts::PI;
    let sin_term = (w * pi).sin().ln();
    Ok(Complex64::new(pi.ln(), 0.0) - sin_term - lanczos_half_plane(Complex64::new(1.0, 0.0) - w))
}

/// Value of the Gauss series at z = 1 by the gamma-ratio closed form.
/// Defined only where the series converges there, Re(b1 − a1 − a2) > 0.
pub fn gauss_2f1_at_one(a1: Complex64, a2: Complex64, b1: Complex64) -> Result<Complex64, Error> {
    let s = b1 - a1 - a2;
    if s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "gauss closed form needs Re(b1 - a1 - a2) > 0, got {}",
            s.re
        )));
    }
    let lg = complex_log_gamma(b1)? + complex_log_gamma(s)?
        - complex_log_gamma(b1 - a1)?
        - complex_log_gamma(b1 - a2)?;
    Ok(lg.exp())
}

// Spouge approximation with a = 31: relative error below 1e-25, which
// double-double arithmetic can actually realize.
const SPOUGE_A: usize = 31;

static SPOUGE: LazyLock<[Dd; SPOUGE_A]> = LazyLock::new(|| {
    let mut c = [Dd::ZERO; SPOUGE_A];
    let two_pi = Dd::PI.mul_pow2(2.0);
    c[0] = two_pi.sqrt();
    let mut factorial = Dd::ONE;
    for k in 1..SPOUGE_A {
        if k > 1 {
            factorial = factorial.mul_f64((k - 1) as f64);
        }
        let x = Dd::from_f64((SPOUGE_A - k) as f64);
        let power = (x.ln() * (Dd::from_f64(k as f64 - 0.5))).exp();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c[k] = (power * x.exp() / factorial).mul_f64(sign);
    }
    c
});

fn spouge_half_plane(w: ExtendedComplex) -> ExtendedComplex {
    let c = &*SPOUGE;
    let mut acc = ExtendedComplex::new(c[0], Dd::ZERO);
    for (k, &ck) in c.iter().enumerate().skip(1) {
        let denom = ExtendedComplex::new(w.re + Dd::from_f64(k as f64 - 1.0), w.im);
        acc = acc + ExtendedComplex::new(ck, Dd::ZERO) / denom;
    }
    let t = ExtendedComplex::new(w.re + Dd::from_f64((SPOUGE_A - 1) as f64), w.im);
    let half = ExtendedComplex::new(Dd::from_f64(0.5), Dd::ZERO);
    (w - half) * t.ln() - t + acc.ln()
}

fn sin_pi_dd(w: ExtendedComplex) -> ExtendedComplex {
    let (sx, cx) = (Dd::PI * w.re).sin_cos();
    let ep = (Dd::PI * w.im).exp();
    let em = Dd::ONE / ep;
    let cosh = (ep + em).mul_pow2(0.5);
    let sinh = (ep - em).mul_pow2(0.5);
    ExtendedComplex::new(sx * cosh, cx * sinh)
}

/// Logarithm of Γ(w) in double-double arithmetic; the imaginary part may
/// differ from the principal branch by a multiple of 2π.
pub fn complex_log_gamma_extended(w: ExtendedComplex) -> Result<ExtendedComplex, Error> {
    if is_nonpositive_integer(w.to_c64()) {
        return Err(Error::Pole(format!("log-gamma pole at w = {}", w.to_c64())));
    }
    if w.re.to_f64() >= 0.5 {
        return Ok(spouge_half_plane(w));
    }
    let one = ExtendedComplex::new(Dd::ONE, Dd::ZERO);
    let ln_pi = ExtendedComplex::new(Dd::PI.ln(), Dd::ZERO);
    Ok(ln_pi - sin_pi_dd(w).ln() - spouge_half_plane(one - w))
}

/// The Gauss closed form evaluated in double-double arithmetic, so the
/// rounding of the returned value is the only machine-precision step.
pub fn gauss_2f1_at_one_extended(
    a1: Complex64,
    a2: Complex64,
    b1: Complex64,
) -> Result<Complex64, Error> {
    let s = b1 - a1 - a2;
    if s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "gauss closed form needs Re(b1 - a1 - a2) > 0, got {}",
            s.re
        )));
    }
    let lift = ExtendedComplex::from_c64;
    let lg = complex_log_gamma_extended(lift(b1))? + complex_log_gamma_extended(lift(s))?
        - complex_log_gamma_extended(lift(b1 - a1))?
        - complex_log_gamma_extended(lift(b1 - a2))?;
    Ok(lg.exp().to_c64())
}
