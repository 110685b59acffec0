//! Extrapolation by direct linear solve: model the limit and m remainder
//! basis functions from m+1 partial sums, solving the resulting system with
//! complete pivoting. Kept as a conditioning foil for the two-point
//! acceleration: the estimates it produces are fine at low order, but the
//! system's condition number grows explosively with the order.

use crate::asymptotics::exponent;
use crate::engine::partial_sums;
use crate::oracle::gauss_2f1_at_one;
use crate::scalar::ComplexScalar;
use crate::termratio::HypergeometricParams;
use crate::{Error, PointKind, SeriesPoint};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct EMethodResult<T> {
    pub s_estimate: T,
    pub condition_estimate: f64,
    pub m: usize,
    pub n_start: usize,
}

struct CompletePivotLu<T> {
    lu: Vec<T>,
    piv_rows: Vec<usize>,
    piv_cols: Vec<usize>,
    dim: usize,
}

impl<T: ComplexScalar> CompletePivotLu<T> {
    fn factor(mut a: Vec<T>, dim: usize) -> Result<Self, Error> {
        let mut piv_rows = vec![0usize; dim];
        let mut piv_cols = vec![0usize; dim];
        for k in 0..dim {
            let mut best = (k, k);
            let mut best_mag = 0.0f64;
            for i in k..dim {
                for j in k..dim {
                    let mag = a[i * dim + j].abs();
                    if mag > best_mag {
                        best_mag = mag;
                        best = (i, j);
                    }
                }
            }
            if best_mag == 0.0 || !best_mag.is_finite() {
                return Err(Error::SingularSystem);
            }
            piv_rows[k] = best.0;
            piv_cols[k] = best.1;
            if best.0 != k {
                for j in 0..dim {
                    a.swap(k * dim + j, best.0 * dim + j);
                }
            }
            if best.1 != k {
                for i in 0..dim {
                    a.swap(i * dim + k, i * dim + best.1);
                }
            }
            let pivot = a[k * dim + k];
            for i in k + 1..dim {
                let l = a[i * dim + k] / pivot;
                a[i * dim + k] = l;
                for j in k + 1..dim {
                    let u = a[k * dim + j];
                    a[i * dim + j] = a[i * dim + j] - l * u;
                }
            }
        }
        Ok(Self {
            lu: a,
            piv_rows,
            piv_cols,
            dim,
        })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut x = b.to_vec();
        for k in 0..d {
            x.swap(k, self.piv_rows[k]);
        }
        for i in 1..d {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[i * d + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..d).rev() {
            let mut acc = x[i];
            for j in i + 1..d {
                acc = acc - self.lu[i * d + j] * x[j];
            }
            x[i] = acc / self.lu[i * d + i];
        }
        for k in (0..d).rev() {
            x.swap(k, self.piv_cols[k]);
        }
        x
    }

    fn solve_conj_transpose(&self, b: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut x = b.to_vec();
        for k in 0..d {
            x.swap(k, self.piv_cols[k]);
        }
        // conj(U)^T is lower triangular with the conjugated diagonal
        for i in 0..d {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[j * d + i].conj() * x[j];
            }
            x[i] = acc / self.lu[i * d + i].conj();
        }
        // conj(L)^T is unit upper triangular
        for i in (0..d).rev() {
            let mut acc = x[i];
            for j in i + 1..d {
                acc = acc - self.lu[j * d + i].conj() * x[j];
            }
            x[i] = acc;
        }
        for k in (0..d).rev() {
            x.swap(k, self.piv_rows[k]);
        }
        x
    }

    /// One-norm power iteration for ||A^{-1}||, a handful of rounds with
    /// unit-basis restarts at the largest dual component.
    fn inverse_one_norm_estimate(&self) -> f64 {
        let d = self.dim;
        let mut x: Vec<T> = vec![T::from_f64(1.0 / d as f64); d];
        let mut best = 0.0f64;
        let mut last_j = usize::MAX;
        for _ in 0..4 {
            let y = self.solve(&x);
            let norm1: f64 = y.iter().map(|v| v.abs()).sum();
            if !norm1.is_finite() {
                return f64::INFINITY;
            }
            if norm1 > best {
                best = norm1;
            }
            let xi: Vec<T> = y
                .iter()
                .map(|v| {
                    let mag = v.abs();
                    if mag == 0.0 {
                        T::one()
                    } else {
                        *v / T::from_f64(mag)
                    }
                })
                .collect();
            let zv = self.solve_conj_transpose(&xi);
            let mut j_max = 0;
            let mut z_max = -1.0f64;
            for (j, v) in zv.iter().enumerate() {
                let mag = v.abs();
                if mag > z_max {
                    z_max = mag;
                    j_max = j;
                }
            }
            if j_max == last_j {
                break;
            }
            last_j = j_max;
            x = vec![T::zero(); d];
            x[j_max] = T::one();
        }
        best
    }
}

fn one_norm<T: ComplexScalar>(a: &[T], dim: usize) -> f64 {
    (0..dim)
        .map(|j| (0..dim).map(|i| a[i * dim + j].abs()).sum())
        .fold(0.0f64, f64::max)
}

/// Fits `s + Σ a_k z^j j^(λ−k+1)` through the m+1 partial sums starting at
/// index n and returns the fitted limit with a condition estimate for the
/// solved system.
pub fn e_method_estimate<T: ComplexScalar>(
    window: &[T],
    z: T,
    lambda: T,
    n: usize,
) -> Result<EMethodResult<T>, Error> {
    if window.len() < 2 {
        return Err(Error::InvalidConfig(
            "the fit needs at least two partial sums".to_string(),
        ));
    }
    if n < 1 {
        return Err(Error::InvalidConfig(
            "the window must start at index 1 or later".to_string(),
        ));
    }
    let m = window.len() - 1;
    let dim = m + 1;
    let ln_fnorm = T::PROFILE.f_norm.ln();
    let ln_abs_z = z.abs().ln();
    let re_lambda = lambda.re_f64();
    for j in n..=n + m {
        let ln_j = (j as f64).ln();
        for k in 0..m {
            let log_mag = j as f64 * ln_abs_z + (re_lambda - k as f64) * ln_j;
            if log_mag < ln_fnorm {
                return Err(Error::BasisUnderflow);
            }
            if log_mag > f64::MAX.ln() {
                return Err(Error::Domain(
                    "basis function overflows the working range".to_string(),
                ));
            }
        }
    }

    let ln_z = z.ln();
    let mut a = vec![T::zero(); dim * dim];
    for (row, j) in (n..=n + m).enumerate() {
        let jf = T::from_f64(j as f64);
        let ln_j = jf.ln();
        a[row * dim] = T::one();
        for k in 0..m {
            let expnt = ln_z * jf + (lambda - T::from_f64(k as f64)) * ln_j;
            a[row * dim + 1 + k] = expnt.exp();
        }
    }
    let norm_a = one_norm(&a, dim);
    let lu = CompletePivotLu::factor(a, dim)?;
    let solution = lu.solve(window);
    let condition = (norm_a * lu.inverse_one_norm_estimate()).max(1.0);
    Ok(EMethodResult {
        s_estimate: solution[0],
        condition_estimate: condition,
        m,
        n_start: n,
    })
}

/// Relative-error trajectory of the order-m fit along the partial-sum
/// stream, against the closed-form reference. Only the Gauss case at the
/// branch point has such a reference.
pub fn e_method_trace(
    params: &HypergeometricParams<Complex64>,
    point: &SeriesPoint<Complex64>,
    m: usize,
    n_max: usize,
) -> Result<Vec<(usize, f64)>, Error> {
    if params.q() != 1 || point.kind() != PointKind::BranchPoint {
        return Err(Error::Domain(
            "trace needs the closed-form reference, available for one lower parameter at z = 1"
                .to_string(),
        ));
    }
    let reference = gauss_2f1_at_one(params.upper()[0], params.upper()[1], params.lower()[0])?;
    let lambda = exponent(params, point);
    let sums = partial_sums(params, point.z(), n_max + m);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let window = &sums[n - 1..n + m];
        match e_method_estimate(window, point.z(), lambda, n) {
            Ok(res) => {
                let rel = (res.s_estimate - reference).norm() / reference.norm();
                out.push((n, rel));
            }
            Err(Error::SingularSystem) | Err(Error::BasisUnderflow) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{coeffs_branch, omega};
    use crate::engine::accelerate_pair;
    use crate::scalar::PrecisionProfile;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference_params() -> HypergeometricParams<Complex64> {
        HypergeometricParams::new(vec![c(1.0, 4.0), c(1.5, 4.5)], vec![c(3.0, 1.0)]).unwrap()
    }

    fn basis(z: Complex64, lambda: Complex64, j: usize, k: usize) -> Complex64 {
        let jf = j as f64;
        (z.ln() * jf + (lambda - c(k as f64, 0.0)) * c(jf.ln(), 0.0)).exp()
    }

    #[test]
    fn lu_solves_random_systems_both_ways() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..30 {
            let d = rng.gen_range(2..7);
            let a: Vec<Complex64> = (0..d * d)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let x_true: Vec<Complex64> = (0..d)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let mut b = vec![c(0.0, 0.0); d];
            let mut bh = vec![c(0.0, 0.0); d];
            for i in 0..d {
                for j in 0..d {
                    b[i] += a[i * d + j] * x_true[j];
                    bh[i] += a[j * d + i].conj() * x_true[j];
                }
            }
            let lu = CompletePivotLu::factor(a, d).unwrap();
            for (got, want) in lu.solve(&b).iter().zip(&x_true) {
                assert!((got - want).norm() <= 1e-10);
            }
            for (got, want) in lu.solve_conj_transpose(&bh).iter().zip(&x_true) {
                assert!((got - want).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn condition_estimate_sees_a_known_spread() {
        let a = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-8, 0.0)];
        let norm = one_norm(&a, 2);
        let lu = CompletePivotLu::factor(a, 2).unwrap();
        let cond = norm * lu.inverse_one_norm_estimate();
        assert!((5e7..2e8).contains(&cond), "condition {cond:e}");
    }

    #[test]
    fn exact_model_stream_is_recovered() {
        let s = c(2.0, -1.0);
        let z = c(0.7, 0.1);
        let lambda = c(0.3, 0.2);
        let coeff = [c(0.5, 0.2), c(-0.3, 0.1), c(0.2, -0.4)];
        let m = coeff.len();
        let n = 5;
        let window: Vec<Complex64> = (n..=n + m)
            .map(|j| {
                let mut v = s;
                for (k, ck) in coeff.iter().enumerate() {
                    v += ck * basis(z, lambda, j, k);
                }
                v
            })
            .collect();
        let res = e_method_estimate(&window, z, lambda, n).unwrap();
        assert_eq!(res.m, m);
        assert_eq!(res.n_start, n);
        assert!(
            (res.s_estimate - s).norm() <= 1e-10 * s.norm(),
            "{} (condition {:e})",
            res.s_estimate,
            res.condition_estimate
        );
    }

    #[test]
    fn order_one_fit_is_the_two_point_formula() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.gen_range(1..40);
            let z = if rng.gen_bool(0.5) {
                c(1.0, 0.0)
            } else {
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                let rad = rng.gen_range(0.3..1.0f64);
                c(rad * th.cos(), rad * th.sin())
            };
            let lambda = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let mu = c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
            let w_n = basis(z, lambda, n, 0);
            let w_np1 = basis(z, lambda, n + 1, 0);
            let window = [s + mu * w_n, s + mu * w_np1];
            let direct = accelerate_pair(window[0], window[1], w_n, w_np1).unwrap();
            let fitted = e_method_estimate(&window, z, lambda, n)
                .unwrap()
                .s_estimate;
            // both routes evaluate the same formula; roundings differ by a
            // few ulp amplified by the window's cancellation factor
            let kappa = (window[0].norm() * w_np1.norm() + window[1].norm() * w_n.norm())
                / ((w_np1 - w_n).norm() * direct.norm().max(1e-300));
            assert!(
                (fitted - direct).norm() <= 4.0 * f64::EPSILON * kappa.max(1.0) * direct.norm().max(1.0),
                "n={n} z={z} {fitted} vs {direct}"
            );
        }
    }

    #[test]
    fn condition_saturates_for_the_complex_reference_case() {
        let p = reference_params();
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let lambda = exponent(&p, &point);
        let sums = partial_sums(&p, point.z(), 64);
        let res = e_method_estimate(&sums[9..40], point.z(), lambda, 10).unwrap();
        assert_eq!(res.m, 30);
        assert!(
            res.condition_estimate >= 1e16,
            "condition {:e}",
            res.condition_estimate
        );
    }

    #[test]
    fn condition_grows_with_order() {
        let p = reference_params();
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let lambda = exponent(&p, &point);
        let sums = partial_sums(&p, point.z(), 64);
        let mut prev = 0.0;
        for m in [5usize, 10, 15, 20] {
            let res = e_method_estimate(&sums[9..10 + m], point.z(), lambda, 10).unwrap();
            assert!(
                res.condition_estimate >= prev,
                "m={m}: {:e} < {prev:e}",
                res.condition_estimate
            );
            prev = res.condition_estimate;
        }
        assert!(prev > 1e10);
    }

    #[test]
    fn underfull_windows_and_tiny_arguments_are_rejected() {
        assert!(matches!(
            e_method_estimate(&[c(1.0, 0.0)], c(0.5, 0.0), c(0.0, 0.0), 3),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            e_method_estimate(&[c(1.0, 0.0), c(1.0, 0.0)], c(0.5, 0.0), c(0.0, 0.0), 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            e_method_estimate(
                &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
                c(1e-200, 0.0),
                c(0.0, 0.0),
                2
            ),
            Err(Error::BasisUnderflow)
        ));
    }

    #[test]
    fn trace_requires_the_closed_form_setting() {
        let p = reference_params();
        let inside = SeriesPoint::classify(c(0.5, 0.0)).unwrap();
        assert!(e_method_trace(&p, &inside, 5, 50).is_err());
        let p0 = HypergeometricParams::new(vec![c(-0.5, 0.0)], vec![]).unwrap();
        let branch = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        assert!(e_method_trace(&p0, &branch, 5, 50).is_err());
    }

    #[test]
    fn order_one_trace_matches_the_primary_method() {
        let p = reference_params();
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let trace = e_method_trace(&p, &point, 1, 50).unwrap();
        let reference =
            gauss_2f1_at_one(p.upper()[0], p.upper()[1], p.lower()[0]).unwrap();
        let exp = coeffs_branch(&p, 1).unwrap();
        let sums = partial_sums(&p, point.z(), 52);
        for &(n, rel) in &trace {
            let w_n = omega(&exp, point.z(), n, PrecisionProfile::BINARY64);
            let w_np1 = omega(&exp, point.z(), n + 1, PrecisionProfile::BINARY64);
            let acc = accelerate_pair(sums[n - 1], sums[n], w_n.value, w_np1.value).unwrap();
            let want = (acc - reference).norm() / reference.norm();
            assert!(
                (rel - want).abs() <= 4.0 * f64::EPSILON + 1e-3 * want,
                "n={n}: {rel:e} vs {want:e}"
            );
        }
    }

    #[test]
    fn trace_error_turns_back_up_after_its_minimum() {
        let p = reference_params();
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let trace = e_method_trace(&p, &point, 10, 150).unwrap();
        let (min_idx, min_err) = trace
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, &(_, e))| (i, e))
            .unwrap();
        assert!(min_idx + 1 < trace.len(), "minimum sits at the end");
        let late = trace.last().unwrap().1;
        assert!(
            late > 10.0 * min_err,
            "late error {late:e} vs minimum {min_err:e}"
        );
    }
}
