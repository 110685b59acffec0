//! Term-ratio machinery for the series Σ t_n: validated parameter sets, the
//! exact consecutive-term ratio r(n), and the Taylor coefficients of the
//! ratio function r(x) in x = 1/n obtained through symmetric-polynomial
//! recursions.

use crate::scalar::ComplexScalar;
use crate::Error;

/// The q+1 upper and q lower parameters of a ₍q+1₎F_q series, with their sum
/// difference σ = Σα − Σβ cached at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HypergeometricParams<T> {
    upper: Vec<T>,
    lower: Vec<T>,
    sigma: T,
}

fn is_nonpositive_integer<T: ComplexScalar>(w: T) -> bool {
    let re = w.re_f64();
    w.im_f64() == 0.0 && re <= 0.0 && re.fract() == 0.0
}

impl<T: ComplexScalar> HypergeometricParams<T> {
    /// Validates the parameter lists: exactly one more upper than lower
    /// entry, and no lower entry at a non-positive integer, where the
    /// function is undefined.
    pub fn new(upper: Vec<T>, lower: Vec<T>) -> Result<Self, Error> {
        if upper.len() != lower.len() + 1 {
            return Err(Error::Domain(format!(
                "need exactly one more upper than lower parameter, got {} upper and {} lower",
                upper.len(),
                lower.len()
            )));
        }
        if let Some(b) = lower.iter().find(|&&b| is_nonpositive_integer(b)) {
            return Err(Error::Undefined(format!(
                "lower parameter {b} is a non-positive integer"
            )));
        }
        let mut sigma = T::zero();
        for &a in &upper {
            sigma = sigma + a;
        }
        for &b in &lower {
            sigma = sigma - b;
        }
        Ok(Self {
            upper,
            lower,
            sigma,
        })
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// σ = Σα − Σβ.
    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Degree at which the series terminates, if some upper parameter is a
    /// non-positive integer −d: every term past index d vanishes.
    pub fn terminating_degree(&self) -> Option<usize> {
        self.upper
            .iter()
            .filter(|&&a| is_nonpositive_integer(a))
            .map(|&a| (-a.re_f64()) as usize)
            .min()
    }
}

/// Taylor coefficients r₀..r_{m_r} of the term-ratio function.
#[derive(Clone, Debug)]
pub struct RatioCoefficients<T> {
    pub r: Vec<T>,
}

/// Power sums p_k = Σᵢ vᵢᵏ for k = 1..k_max.
pub fn power_sums<T: ComplexScalar>(values: &[T], k_max: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(k_max);
    let mut powers: Vec<T> = values.to_vec();
    for _ in 0..k_max {
        let mut s = T::zero();
        for p in &powers {
            s = s + *p;
        }
        out.push(s);
        for (p, v) in powers.iter_mut().zip(values) {
            *p = *p * *v;
        }
    }
    out
}

/// Elementary symmetric polynomials e₀..e_{k_max} via the Newton recurrence
/// k·e_k = Σᵢ (−1)^{i−1} e_{k−i} p_i. Entries past the variable count are
/// identically zero and are pinned to exact zero rather than left to the
/// recursion's cancellation.
pub fn elementary_symmetric<T: ComplexScalar>(alphas: &[T], k_max: usize) -> Vec<T> {
    let p = power_sums(alphas, k_max);
    let mut e = vec![T::zero(); k_max + 1];
    e[0] = T::one();
    for k in 1..=k_max {
        if k > alphas.len() {
            continue;
        }
        let mut s = T::zero();
        let mut sign = T::one();
        for i in 1..=k {
            s = s + sign * e[k - i] * p[i - 1];
            sign = -sign;
        }
        e[k] = s / T::from_f64(k as f64);
    }
    e
}

/// Complete homogeneous symmetric polynomials h₀..h_{k_max} via
/// k·h_k = Σᵢ h_{k−i} p_i. The caller supplies any implicit variables
/// already in the list.
pub fn complete_homogeneous<T: ComplexScalar>(betas_aug: &[T], k_max: usize) -> Vec<T> {
    let p = power_sums(betas_aug, k_max);
    let mut h = vec![T::zero(); k_max + 1];
    h[0] = T::one();
    for k in 1..=k_max {
        let mut s = T::zero();
        for i in 1..=k {
            s = s + h[k - i] * p[i - 1];
        }
        h[k] = s / T::from_f64(k as f64);
    }
    h
}

/// Taylor coefficients of the term-ratio function to order m_r, combined
/// from the elementary symmetric polynomials of the upper parameters and the
/// complete homogeneous polynomials of the lower parameters augmented with
/// the implicit 1 (placed first, for bit reproducibility).
pub fn ratio_taylor_coeffs<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    m_r: usize,
) -> RatioCoefficients<T> {
    let e = elementary_symmetric(params.upper(), m_r);
    let mut aug = Vec::with_capacity(params.q() + 1);
    aug.push(T::one());
    aug.extend_from_slice(params.lower());
    let h = complete_homogeneous(&aug, m_r);
    let mut r = Vec::with_capacity(m_r + 1);
    for k in 0..=m_r {
        let mut s = T::zero();
        for (i, &ei) in e.iter().enumerate().take(k + 1) {
            let term = ei * h[k - i];
            if (k - i) % 2 == 0 {
                s = s + term;
            } else {
                s = s - term;
            }
        }
        r.push(s);
    }
    r[0] = T::one();
    RatioCoefficients { r }
}

/// The exact term ratio t_{n+1}/t_n = Π(α_j+n) / [Π(β_j+n)·(1+n)],
/// evaluated as a rational function of n rather than from the Taylor series.
pub fn ratio_value<T: ComplexScalar>(params: &HypergeometricParams<T>, n: usize) -> T {
    let nv = T::from_f64(n as f64);
    let mut num = T::one();
    for &a in params.upper() {
        num = num * (a + nv);
    }
    let mut den = T::one() + nv;
    for &b in params.lower() {
        den = den * (b + nv);
    }
    num / den
}
