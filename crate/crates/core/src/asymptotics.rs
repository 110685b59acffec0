//! Asymptotic model of the partial-sum remainder: the exponent λ, the
//! coefficient recursions at and off the branch point, and evaluation of the
//! truncated remainder estimate ω_n^(m) with underflow-aware error tags.

use crate::scalar::{log_abs_pow, ComplexScalar, PrecisionProfile};
use crate::termratio::{ratio_taylor_coeffs, HypergeometricParams};
use crate::Error;

/// Where the argument sits relative to the convergence disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    BranchPoint,
    InsideDisk,
    OnCircle,
}

/// An argument value together with its classification. Construction rejects
/// arguments outside the closed unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint<T> {
    z: T,
    kind: PointKind,
}

impl<T: ComplexScalar> SeriesPoint<T> {
    /// Classifies z. The branch point is exactly z = 1, bit for bit; the
    /// circle membership test allows 4 binary64 ulp of slack in |z|.
    pub fn classify(z: T) -> Result<Self, Error> {
        let kind = if z == T::one() {
            PointKind::BranchPoint
        } else {
            let mag = z.abs();
            if (mag - 1.0).abs() <= 4.0 * f64::EPSILON {
                PointKind::OnCircle
            } else if mag < 1.0 {
                PointKind::InsideDisk
            } else {
                return Err(Error::Domain(format!(
                    "|z| = {mag} lies outside the closed unit disk"
                )));
            }
        };
        Ok(Self { z, kind })
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn kind(&self) -> PointKind {
        self.kind
    }
}

/// Remainder exponent λ and asymptotic coefficients c₀..c_{m−1}.
#[derive(Clone, Debug)]
pub struct AsymptoticExpansion<T> {
    pub lambda: T,
    pub c: Vec<T>,
    pub at_branch: bool,
}

impl<T> AsymptoticExpansion<T> {
    /// Model order: the number of coefficients carried.
    pub fn m(&self) -> usize {
        self.c.len()
    }
}

/// Truncated remainder estimate at one index, with its relative-error tag
/// and the log-magnitude of the leading factor z^n n^λ.
#[derive(Clone, Copy, Debug)]
pub struct RemainderEstimate<T> {
    pub value: T,
    pub rel_err: f64,
    pub leading_log_mag: f64,
}

/// The remainder exponent: σ at the branch point, σ − 1 elsewhere.
pub fn exponent<T: ComplexScalar>(params: &HypergeometricParams<T>, point: &SeriesPoint<T>) -> T {
    match point.kind() {
        PointKind::BranchPoint => params.sigma(),
        _ => params.sigma() - T::one(),
    }
}

/// Generalized binomial row C(w, 0..=l_max) by the falling-factorial
/// product; exact integer order keeps this branch-free.
fn binom_row<T: ComplexScalar>(w: T, l_max: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(l_max + 1);
    row.push(T::one());
    for l in 0..l_max {
        let lf = T::from_f64(l as f64);
        let next = row[l] * (w - lf) / (lf + T::one());
        row.push(next);
    }
    row
}

fn pow2<T: ComplexScalar>(p: usize) -> T {
    T::from_f64(2f64.powi(p as i32))
}

/// Asymptotic coefficients away from the branch point, for the solution
/// carrying the z^n n^(σ−1) remainder behavior.
pub fn coeffs_offbranch<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    z: T,
    m: usize,
) -> Result<AsymptoticExpansion<T>, Error> {
    if m < 1 {
        return Err(Error::Domain("order m must be at least 1".to_string()));
    }
    if z == T::one() {
        return Err(Error::Domain(
            "z = 1 is the branch point; use the branch-point recursion".to_string(),
        ));
    }
    let sigma = params.sigma();
    let one = T::one();
    let r = ratio_taylor_coeffs(params, m).r;
    let rows: Vec<Vec<T>> = (0..m)
        .map(|j| binom_row(sigma - one - T::from_f64(j as f64), m + 1 - j))
        .collect();
    let mut c = Vec::with_capacity(m);
    c.push(one);
    for k in 1..m {
        let mut acc = T::zero();
        for (j, cj) in c.iter().enumerate() {
            let row = &rows[j];
            let mut term = (pow2::<T>(k + 1 - j) - one) * z - one;
            term = term * row[k + 1 - j];
            let mut inner = T::zero();
            for i in j..=k {
                inner = inner + row[i - j] * r[k + 1 - i];
            }
            term = term - z * inner + r[k + 1 - j];
            acc = acc + term * *cj;
        }
        let den = T::from_f64(k as f64) * (one - z);
        c.push(-acc / den);
    }
    Ok(AsymptoticExpansion {
        lambda: sigma - one,
        c,
        at_branch: false,
    })
}

/// Asymptotic coefficients at the branch point z = 1, where the remainder
/// decays like n^σ. Requires Re σ < 0; otherwise the series diverges there.
pub fn coeffs_branch<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    m: usize,
) -> Result<AsymptoticExpansion<T>, Error> {
    if m < 1 {
        return Err(Error::Domain("order m must be at least 1".to_string()));
    }
    let sigma = params.sigma();
    if sigma.re_f64() >= 0.0 {
        return Err(Error::Domain(format!(
            "series diverges at z = 1 for Re sigma = {} >= 0",
            sigma.re_f64()
        )));
    }
    let one = T::one();
    let two = T::from_f64(2.0);
    let r = ratio_taylor_coeffs(params, m).r;
    let rows: Vec<Vec<T>> = (0..m)
        .map(|j| binom_row(sigma - T::from_f64(j as f64), m + 2 - j))
        .collect();
    let mut c = Vec::with_capacity(m);
    c.push(one);
    for k in 1..m {
        let mut acc = T::zero();
        for (j, cj) in c.iter().enumerate() {
            let row = &rows[j];
            let mut term = (pow2::<T>(k + 2 - j) - two) * row[k + 2 - j];
            // The i = j inner term cancels the standalone ratio coefficient,
            // which also keeps the needed ratio order at m.
            let mut inner = T::zero();
            for i in (j + 1)..=(k + 1) {
                inner = inner + row[i - j] * r[k + 2 - i];
            }
            term = term - inner;
            acc = acc + term * *cj;
        }
        let den = T::from_f64(k as f64) * (sigma - T::from_f64(k as f64));
        c.push(acc / den);
    }
    Ok(AsymptoticExpansion {
        lambda: sigma,
        c,
        at_branch: true,
    })
}

/// Coefficients of the companion solution whose growth root is 1 instead of
/// z. Every entry past the leading 1 vanishes identically; this is exposed
/// so that cancellation can be tested, not for production use.
pub fn xi1_coeffs_offbranch<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    z: T,
    m: usize,
) -> Result<Vec<T>, Error> {
    if m < 1 {
        return Err(Error::Domain("order m must be at least 1".to_string()));
    }
    if z == T::one() {
        return Err(Error::Domain(
            "z = 1 is the branch point; the two roots coincide there".to_string(),
        ));
    }
    let one = T::one();
    let r = ratio_taylor_coeffs(params, m).r;
    let a = |nn: usize| {
        if nn == 0 {
            -one - z
        } else {
            -z * r[nn]
        }
    };
    let rows: Vec<Vec<T>> = (0..m)
        .map(|j| binom_row(-T::from_f64(j as f64), m + 1 - j))
        .collect();
    let mut c = Vec::with_capacity(m);
    c.push(one);
    for k in 1..m {
        let mut acc = T::zero();
        for (j, cj) in c.iter().enumerate() {
            let row = &rows[j];
            let mut term = pow2::<T>(k + 1 - j) * row[k + 1 - j];
            let mut inner = T::zero();
            for i in j..=(k + 1) {
                inner = inner + row[i - j] * a(k + 1 - i);
            }
            term = term + inner + z * r[k + 1 - j];
            acc = acc + term * *cj;
        }
        let den = T::from_f64(k as f64) * (one - z);
        c.push(acc / den);
    }
    Ok(c)
}

/// Evaluates ω_n^(m) = z^n n^λ Σ_{k<m} c_k n^(−k), with the inner sum by
/// Horner's scheme in 1/n and the leading factor built in log form so its
/// magnitude can be tracked past the underflow threshold.
pub fn omega<T: ComplexScalar>(
    exp: &AsymptoticExpansion<T>,
    z: T,
    n: usize,
    profile: PrecisionProfile,
) -> RemainderEstimate<T> {
    let nf = T::from_f64(n as f64);
    let ln_n = nf.ln();
    let arg = if exp.at_branch {
        exp.lambda * ln_n
    } else {
        z.ln() * nf + exp.lambda * ln_n
    };
    let lead = arg.exp();
    let x = T::one() / nf;
    let mut h = T::zero();
    for &ck in exp.c.iter().rev() {
        h = h * x + ck;
    }
    let log_mag = if exp.at_branch {
        exp.lambda.re_f64() * (n as f64).ln()
    } else {
        log_abs_pow(z, n, exp.lambda)
    };
    let ln_fnorm = profile.f_norm.ln();
    let rel_err = if log_mag >= ln_fnorm {
        profile.eps_p
    } else {
        (ln_fnorm - log_mag).exp()
    };
    RemainderEstimate {
        value: lead * h,
        rel_err,
        leading_log_mag: log_mag,
    }
}
