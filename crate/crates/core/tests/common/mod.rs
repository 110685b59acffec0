#![allow(dead_code)]

use hypaccel::ComplexScalar;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// coefficients of Π (w_i + n), ascending powers of n, leading coefficient 1
fn poly_from_offsets(offsets: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![c(1.0, 0.0)];
    for &w in offsets {
        let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
        for (i, &ci) in coeffs.iter().enumerate() {
            next[i] += ci * w;
            next[i + 1] += ci;
        }
        coeffs = next;
    }
    coeffs
}

/// Taylor coefficients in 1/n of the term ratio, by literal polynomial
/// division of Π(a+n) by (1+n)Π(b+n). A deliberately different route from
/// the symmetric-function recurrences in the library.
pub fn brute_force_ratio_coeffs(
    upper: &[Complex64],
    lower: &[Complex64],
    k_max: usize,
) -> Vec<Complex64> {
    let p = poly_from_offsets(upper);
    let mut lower_aug = vec![c(1.0, 0.0)];
    lower_aug.extend_from_slice(lower);
    let q = poly_from_offsets(&lower_aug);
    assert_eq!(p.len(), q.len());
    let d = p.len() - 1;
    // substitute n = 1/x; both numerator and denominator pick up x^{-d},
    // leaving reversed coefficient sequences in ascending powers of x
    let pr: Vec<Complex64> = (0..=d).map(|j| p[d - j]).collect();
    let qr: Vec<Complex64> = (0..=d).map(|j| q[d - j]).collect();
    let mut r: Vec<Complex64> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = if k <= d { pr[k] } else { c(0.0, 0.0) };
        for (i, ri) in r.iter().enumerate() {
            let j = k - i;
            if j <= d {
                acc -= ri * qr[j];
            }
        }
        r.push(acc / qr[0]);
    }
    r
}

/// Dense partial-pivot solve, for the small fit systems the tests build in
/// extended precision.
pub fn solve_dense<T: ComplexScalar>(mut a: Vec<T>, mut b: Vec<T>, dim: usize) -> Vec<T> {
    for k in 0..dim {
        let mut piv = k;
        let mut piv_mag = a[k * dim + k].abs();
        for i in k + 1..dim {
            let mag = a[i * dim + k].abs();
            if mag > piv_mag {
                piv_mag = mag;
                piv = i;
            }
        }
        assert!(piv_mag > 0.0, "singular fit system");
        if piv != k {
            for j in 0..dim {
                a.swap(k * dim + j, piv * dim + j);
            }
            b.swap(k, piv);
        }
        let pivot = a[k * dim + k];
        for i in k + 1..dim {
            let l = a[i * dim + k] / pivot;
            for j in k..dim {
                let u = a[k * dim + j];
                a[i * dim + j] = a[i * dim + j] - l * u;
            }
            let rhs = b[k];
            b[i] = b[i] - l * rhs;
        }
    }
    let mut x = vec![T::zero(); dim];
    for i in (0..dim).rev() {
        let mut acc = b[i];
        for j in i + 1..dim {
            acc = acc - a[i * dim + j] * x[j];
        }
        x[i] = acc / a[i * dim + i];
    }
    x
}
