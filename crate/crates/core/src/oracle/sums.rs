//! Reference values away from the unit circle: brute-force compensated
//! summation of the defining series, and the binomial closed form for the
//! single-upper-parameter case.

use crate::scalar::cpow;
use crate::termratio::{ratio_value, HypergeometricParams};
use crate::Error;
use num_complex::Complex64;

/// Sums the series term by term with compensated accumulation, stopping
/// once three consecutive terms fall below `rel_tol` relative to the
/// running sum. Restricted to |z| ≤ 0.9 so the tail bound is honest.
pub fn direct_sum(
    params: &HypergeometricParams<Complex64>,
    z: Complex64,
    rel_tol: f64,
    max_terms: usize,
) -> Result<Complex64, Error> {
    if z.norm() > 0.9 {
        return Err(Error::Domain(format!(
            "direct summation is restricted to |z| <= 0.9, got {}",
            z.norm()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    let mut small_run = 0u32;
    for k in 0..max_terms {
        let y = t - comp;
        let next = sum + y;
        comp = (next - sum) - y;
        sum = next;
        if t.norm() <= rel_tol * sum.norm() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        t = z * ratio_value(params, k) * t;
    }
    Err(Error::NoConvergence { terms: max_terms })
}

/// Closed form (1−z)^(−a) for the single-upper-parameter series.
pub fn closed_form_1f0(a: Complex64, z: Complex64) -> Result<Complex64, Error> {
    cpow(Complex64::new(1.0, 0.0) - z, -a)
}
