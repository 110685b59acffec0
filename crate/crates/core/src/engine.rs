//! The self-terminating evaluation loop: recursive partial sums, two-point
//! acceleration against the remainder model, and the truncation/rounding
//! error estimates that decide between convergence, a precision ceiling, and
//! the iteration cap.

use crate::asymptotics::{
    coeffs_branch, coeffs_offbranch, omega, AsymptoticExpansion, PointKind, RemainderEstimate,
    SeriesPoint,
};
use crate::scalar::{cpow, ComplexScalar, PrecisionProfile};
use crate::termratio::{ratio_value, HypergeometricParams};
use crate::Error;

/// Which truncation-error denominator to use. `Modified` damps the estimate
/// with the plain geometric factor (1+1/n)^(−m); `Plain` keeps the full
/// exponent λ−m, which is sharper but markedly more prone to premature
/// convergence claims for Re λ ≫ 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TruncVariant {
    #[default]
    Modified,
    Plain,
}

/// Loop configuration. `epsilon` is the requested relative tolerance; `tau`
/// discounts the rounding estimate before it is compared against the
/// truncation estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineConfig {
    pub m: usize,
    pub n_max: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub trunc_variant: TruncVariant,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            m: 45,
            n_max: 2000,
            epsilon: 2e-14,
            tau: 0.1,
            trunc_variant: TruncVariant::Modified,
        }
    }
}

impl EngineConfig {
    /// Range checks on the tuning knobs, also run on entry to [`evaluate`].
    pub fn validate(&self) -> Result<(), Error> {
        if self.m < 1 {
            return Err(Error::InvalidConfig("m must be at least 1".to_string()));
        }
        if self.n_max < 3 {
            return Err(Error::InvalidConfig("N must be at least 3".to_string()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(
                "epsilon must lie in (0, 1)".to_string(),
            ));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidConfig("tau must lie in (0, 1]".to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    InsufficientPrecision,
    MaxIterations,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub max_partial_sum_mag: f64,
    pub underflow_seen: bool,
}

/// Result of one evaluation. `value` is the last accelerated estimate
/// regardless of status, so callers can inspect near-misses.
#[derive(Clone, Copy, Debug)]
pub struct EvalOutcome<T> {
    pub status: Status,
    pub value: T,
    pub rel_err_est: f64,
    pub n_used: usize,
    pub diagnostics: Diagnostics,
}

/// Rolling loop state: the (s_n, s_{n+1}) partial-sum window with the term
/// that connects them, accumulated rounding bounds, the matching remainder
/// estimates, and the last two accelerated values.
#[derive(Clone, Copy, Debug)]
pub struct EngineState<T> {
    pub n: usize,
    pub s_n: T,
    pub s_np1: T,
    pub t: T,
    pub delta_s_n: f64,
    pub delta_s_np1: f64,
    pub omega_n: RemainderEstimate<T>,
    pub omega_np1: RemainderEstimate<T>,
    pub s_acc_prev: T,
    pub s_acc: T,
}

/// Two-point elimination of the unknown remainder scale:
/// (s_n·ω_{n+1} − s_{n+1}·ω_n) / (ω_{n+1} − ω_n).
pub fn accelerate_pair<T: ComplexScalar>(s_n: T, s_np1: T, w_n: T, w_np1: T) -> Result<T, Error> {
    if w_np1 == w_n {
        return Err(Error::DegenerateWeights);
    }
    Ok((s_n * w_np1 - s_np1 * w_n) / (w_np1 - w_n))
}

/// A-posteriori truncation estimate from the change between consecutive
/// accelerated values, sharpened by the known decay rate of the remainder
/// model. `n` is the index of the earlier of the two estimates. A vanishing
/// denominator returns +∞, meaning "no information yet".
pub fn truncation_error<T: ComplexScalar>(
    s_acc: T,
    s_acc_prev: T,
    z: T,
    lambda: T,
    m: usize,
    n: usize,
    variant: TruncVariant,
) -> f64 {
    let one = T::one();
    let base = one + one / T::from_f64(n as f64);
    let expo = match variant {
        TruncVariant::Modified => T::from_f64(-(m as f64)),
        TruncVariant::Plain => lambda - T::from_f64(m as f64),
    };
    let p = match cpow(base, expo) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let den = (z * p - one).abs();
    if den == 0.0 {
        return f64::INFINITY;
    }
    (s_acc - s_acc_prev).abs() / den
}

/// Propagated rounding bound for the accelerated value, combining the
/// accumulated partial-sum errors with the remainder estimates' own
/// relative-error tags. +∞ when the weights coincide.
pub fn fp_error<T: ComplexScalar>(state: &EngineState<T>, s_acc: T) -> f64 {
    let w_n = state.omega_n.value;
    let w_np1 = state.omega_np1.value;
    let den = (w_np1 - w_n).abs();
    if den == 0.0 {
        return f64::INFINITY;
    }
    let mag = s_acc.abs();
    (w_np1.abs() * (state.delta_s_n + mag * state.omega_np1.rel_err)
        + w_n.abs() * (state.delta_s_np1 + mag * state.omega_n.rel_err))
        / den
}

/// Advances the loop one index: next term and partial sum, accumulated
/// rounding bound, remainder estimate, and accelerated value. Fails with a
/// degenerate-weights error when the new remainder estimate collides with
/// the previous one (or stops being finite), which the driver treats as a
/// precision ceiling.
pub fn step<T: ComplexScalar>(
    state: &EngineState<T>,
    params: &HypergeometricParams<T>,
    z: T,
    exp: &AsymptoticExpansion<T>,
    profile: PrecisionProfile,
) -> Result<EngineState<T>, Error> {
    let n = state.n;
    let t_new = z * ratio_value(params, n) * state.t;
    let s_new = state.s_np1 + t_new;
    let ds_new = state.delta_s_np1 + profile.eps_p * s_new.abs();
    let w_new = omega(exp, z, n + 2, profile);
    if w_new.value == state.omega_np1.value || !w_new.value.is_finite() || !s_new.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let s_acc_new = accelerate_pair(state.s_np1, s_new, state.omega_np1.value, w_new.value)?;
    Ok(EngineState {
        n: n + 1,
        s_n: state.s_np1,
        s_np1: s_new,
        t: t_new,
        delta_s_n: state.delta_s_np1,
        delta_s_np1: ds_new,
        omega_n: state.omega_np1,
        omega_np1: w_new,
        s_acc_prev: state.s_acc,
        s_acc: s_acc_new,
    })
}

/// Plain partial sums s_1..s_count of the defining series, by the term
/// recursion. Exposed for tracing and for fitting remainder behavior in
/// tests; the accelerated path never materializes this whole stream.
pub fn partial_sums<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    z: T,
    count: usize,
) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    let mut acc = T::zero();
    let mut t = T::one();
    for k in 0..count {
        acc = acc + t;
        out.push(acc);
        t = z * ratio_value(params, k) * t;
    }
    out
}

fn nan_value<T: ComplexScalar>() -> T {
    T::from_parts(f64::NAN, f64::NAN)
}

/// Sums a series that terminates at a known degree, with compensated
/// accumulation. The returned estimate is exact up to rounding, so the
/// reported relative error is just the op-count noise floor.
fn sum_terminating<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    z: T,
    degree: usize,
    epsilon: f64,
    profile: PrecisionProfile,
) -> EvalOutcome<T> {
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut t = T::one();
    let mut max_mag = 0f64;
    for k in 0..=degree {
        let y = t - comp;
        let next = sum + y;
        comp = (next - sum) - y;
        sum = next;
        let mag = sum.abs();
        if mag > max_mag {
            max_mag = mag;
        }
        if k < degree {
            t = z * ratio_value(params, k) * t;
        }
    }
    let rel = (degree + 1) as f64 * profile.eps_p;
    EvalOutcome {
        status: if rel <= epsilon {
            Status::Converged
        } else {
            Status::InsufficientPrecision
        },
        value: sum,
        rel_err_est: rel,
        n_used: degree + 1,
        diagnostics: Diagnostics {
            max_partial_sum_mag: max_mag,
            underflow_seen: false,
        },
    }
}

/// Full evaluation with an observer called after each acceleration update
/// with (index, accelerated estimate). See [`evaluate`] for the contract.
pub fn evaluate_traced<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    point: &SeriesPoint<T>,
    cfg: &EngineConfig,
    profile: PrecisionProfile,
    mut observe: impl FnMut(usize, T),
) -> Result<EvalOutcome<T>, Error> {
    cfg.validate()?;
    let z = point.z();

    if let Some(degree) = params.terminating_degree() {
        return Ok(sum_terminating(params, z, degree, cfg.epsilon, profile));
    }
    if z == T::zero() {
        return Ok(EvalOutcome {
            status: Status::Converged,
            value: T::one(),
            rel_err_est: profile.eps_p,
            n_used: 1,
            diagnostics: Diagnostics {
                max_partial_sum_mag: 1.0,
                underflow_seen: false,
            },
        });
    }

    let exp = match point.kind() {
        PointKind::BranchPoint => coeffs_branch(params, cfg.m)?,
        PointKind::OnCircle => {
            if params.sigma().re_f64() >= 1.0 {
                return Err(Error::Domain(format!(
                    "series diverges on the unit circle for Re sigma = {} >= 1",
                    params.sigma().re_f64()
                )));
            }
            coeffs_offbranch(params, z, cfg.m)?
        }
        PointKind::InsideDisk => coeffs_offbranch(params, z, cfg.m)?,
    };
    let lambda = exp.lambda;
    let ln_fnorm = profile.f_norm.ln();

    let s1 = T::one();
    let t0 = z * ratio_value(params, 0);
    let s2 = s1 + t0;
    let ds1 = profile.eps_p * s1.abs();
    let ds2 = ds1 + profile.eps_p * s2.abs();
    let w1 = omega(&exp, z, 1, profile);
    let w2 = omega(&exp, z, 2, profile);
    let mut underflow =
        w1.leading_log_mag < ln_fnorm || w2.leading_log_mag < ln_fnorm;
    let mut max_mag = s1.abs().max(s2.abs());

    let first_acc = match accelerate_pair(s1, s2, w1.value, w2.value) {
        Ok(v) if v.is_finite() && w1.value.is_finite() && w2.value.is_finite() => v,
        _ => {
            return Ok(EvalOutcome {
                status: Status::InsufficientPrecision,
                value: nan_value(),
                rel_err_est: f64::INFINITY,
                n_used: 2,
                diagnostics: Diagnostics {
                    max_partial_sum_mag: max_mag,
                    underflow_seen: underflow,
                },
            })
        }
    };
    let mut state = EngineState {
        n: 1,
        s_n: s1,
        s_np1: s2,
        t: t0,
        delta_s_n: ds1,
        delta_s_np1: ds2,
        omega_n: w1,
        omega_np1: w2,
        s_acc_prev: first_acc,
        s_acc: first_acc,
    };
    observe(state.n, state.s_acc);
    let mut dtr = f64::INFINITY;
    let mut dfp = fp_error(&state, state.s_acc);

    let status = loop {
        if dtr <= cfg.epsilon * state.s_acc.abs() {
            break Status::Converged;
        }
        if cfg.tau * dfp >= dtr {
            break Status::InsufficientPrecision;
        }
        if state.n >= cfg.n_max {
            break Status::MaxIterations;
        }
        let n_prev = state.n;
        match step(&state, params, z, &exp, profile) {
            Ok(next) => {
                state = next;
                let mag = state.s_np1.abs();
                if mag > max_mag {
                    max_mag = mag;
                }
                if state.omega_np1.leading_log_mag < ln_fnorm {
                    underflow = true;
                }
                dfp = fp_error(&state, state.s_acc);
                dtr = truncation_error(
                    state.s_acc,
                    state.s_acc_prev,
                    z,
                    lambda,
                    cfg.m,
                    n_prev,
                    cfg.trunc_variant,
                );
                observe(state.n, state.s_acc);
            }
            Err(_) => {
                // Recover the magnitude of the term the failed step formed,
                // then report the precision ceiling.
                let t_new = z * ratio_value(params, state.n) * state.t;
                let s_new = state.s_np1 + t_new;
                let mag = s_new.abs();
                if mag.is_finite() && mag > max_mag {
                    max_mag = mag;
                }
                let w_probe = omega(&exp, z, state.n + 2, profile);
                if w_probe.leading_log_mag < ln_fnorm {
                    underflow = true;
                }
                state.n += 1;
                break Status::InsufficientPrecision;
            }
        }
    };
    let mag = state.s_acc.abs();
    let rel_err_est = if mag > 0.0 { dtr / mag } else { f64::INFINITY };
    Ok(EvalOutcome {
        status,
        value: state.s_acc,
        rel_err_est,
        n_used: state.n + 1,
        diagnostics: Diagnostics {
            max_partial_sum_mag: max_mag,
            underflow_seen: underflow,
        },
    })
}

/// Evaluates the series at the given point. Terminating series are summed
/// directly; otherwise the accelerated loop runs until the truncation
/// estimate meets `epsilon` (Converged), falls under the discounted rounding
/// estimate (InsufficientPrecision), or hits the iteration cap
/// (MaxIterations). Convergence is checked first, so a tie goes to
/// Converged.
pub fn evaluate<T: ComplexScalar>(
    params: &HypergeometricParams<T>,
    point: &SeriesPoint<T>,
    cfg: &EngineConfig,
    profile: PrecisionProfile,
) -> Result<EvalOutcome<T>, Error> {
    evaluate_traced(params, point, cfg, profile, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExtendedComplex;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(upper: &[Complex64], lower: &[Complex64]) -> HypergeometricParams<Complex64> {
        HypergeometricParams::new(upper.to_vec(), lower.to_vec()).unwrap()
    }

    fn est(value: Complex64, rel_err: f64) -> RemainderEstimate<Complex64> {
        RemainderEstimate {
            value,
            rel_err,
            leading_log_mag: 0.0,
        }
    }

    #[test]
    fn accelerate_pair_hand_cases() {
        let seven = c(7.0, 0.0);
        let got = accelerate_pair(seven, seven, c(1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(got, seven);
        let s = c(2.5, -1.0);
        let (w1, w2) = (c(0.3, 0.1), c(0.1, -0.2));
        let got = accelerate_pair(s + w1, s + w2, w1, w2).unwrap();
        assert!((got - s).norm() <= 8.0 * f64::EPSILON * s.norm());
        let got = accelerate_pair(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((got - c(3.0, 0.0)).norm() <= 1e-15);
        assert!(matches!(
            accelerate_pair(c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.5), c(0.5, 0.5)),
            Err(Error::DegenerateWeights)
        ));
    }

    #[test]
    fn truncation_error_hand_cases() {
        let z1 = c(1.0, 0.0);
        let lam = c(0.0, 0.0);
        assert_eq!(
            truncation_error(c(5.0, 1.0), c(5.0, 1.0), z1, lam, 30, 10, TruncVariant::Modified),
            0.0
        );
        let d = truncation_error(
            c(1e-10, 0.0),
            c(0.0, 0.0),
            z1,
            lam,
            30,
            10,
            TruncVariant::Modified,
        );
        let want = 1e-10 / (1.0 - 1.1f64.powi(-30));
        assert!((d - want).abs() <= 1e-13 * want, "{d} vs {want}");
        let d = truncation_error(
            c(1e-8, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
            lam,
            10,
            100_000,
            TruncVariant::Modified,
        );
        assert!((d - 0.5e-8).abs() <= 1e-3 * 0.5e-8);
    }

    #[test]
    fn truncation_error_degenerate_denominator_is_infinite() {
        // Plain variant with lambda = m cancels the exponent, so z = 1 makes
        // the denominator vanish exactly.
        let d = truncation_error(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(12.0, 0.0),
            12,
            7,
            TruncVariant::Plain,
        );
        assert!(d.is_infinite());
    }

    #[test]
    fn fp_error_hand_cases() {
        let th = std::f64::consts::FRAC_PI_3;
        let w_a = c(th.cos(), th.sin());
        let w_b = c((2.0 * th).cos(), (2.0 * th).sin());
        assert!((w_b - w_a).norm() - 1.0 <= 1e-15);
        let mk = |ds: f64, dw: f64| EngineState {
            n: 1,
            s_n: c(1.0, 0.0),
            s_np1: c(1.0, 0.0),
            t: c(0.0, 0.0),
            delta_s_n: ds,
            delta_s_np1: ds,
            omega_n: est(w_a, dw),
            omega_np1: est(w_b, dw),
            s_acc_prev: c(1.0, 0.0),
            s_acc: c(1.0, 0.0),
        };
        assert_eq!(fp_error(&mk(0.0, 0.0), c(1.0, 0.0)), 0.0);
        let got = fp_error(&mk(1e-16, f64::EPSILON), c(1.0, 0.0));
        let want = 2.0 * (1e-16 + f64::EPSILON);
        assert!((got - want).abs() <= 1e-3 * want, "{got} vs {want}");
        // monotone in the remainder-estimate error tag
        let lo = fp_error(&mk(1e-16, 1e-16), c(1.0, 0.0));
        let hi = fp_error(&mk(1e-16, 1e-10), c(1.0, 0.0));
        assert!(hi > lo);
        let mut degenerate = mk(1e-16, f64::EPSILON);
        degenerate.omega_np1 = degenerate.omega_n;
        assert!(fp_error(&degenerate, c(1.0, 0.0)).is_infinite());
    }

    fn geometric_initial_state() -> (
        HypergeometricParams<Complex64>,
        AsymptoticExpansion<Complex64>,
        EngineState<Complex64>,
    ) {
        let p = params(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)]);
        let z = c(0.5, 0.0);
        let exp = crate::asymptotics::coeffs_offbranch(&p, z, 4).unwrap();
        let profile = PrecisionProfile::BINARY64;
        let s1 = c(1.0, 0.0);
        let t0 = z * ratio_value(&p, 0);
        let s2 = s1 + t0;
        let w1 = omega(&exp, z, 1, profile);
        let w2 = omega(&exp, z, 2, profile);
        let first = accelerate_pair(s1, s2, w1.value, w2.value).unwrap();
        let st = EngineState {
            n: 1,
            s_n: s1,
            s_np1: s2,
            t: t0,
            delta_s_n: f64::EPSILON,
            delta_s_np1: f64::EPSILON * 2.5,
            omega_n: w1,
            omega_np1: w2,
            s_acc_prev: first,
            s_acc: first,
        };
        (p, exp, st)
    }

    #[test]
    fn step_advances_the_geometric_series() {
        let (p, exp, st) = geometric_initial_state();
        let z = c(0.5, 0.0);
        let st2 = step(&st, &p, z, &exp, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(st2.n, 2);
        assert!((st2.s_np1 - c(1.75, 0.0)).norm() <= 1e-15);
        assert_eq!(st2.s_n, st.s_np1);
        assert!((st2.s_n + st2.t - st2.s_np1).norm() <= 1e-16);
        let st3 = step(&st2, &p, z, &exp, PrecisionProfile::BINARY64).unwrap();
        assert!((st3.s_np1 - c(1.875, 0.0)).norm() <= 1e-15);
        assert!((st3.t - c(0.125, 0.0)).norm() <= 1e-16);
        // accumulated rounding bound unrolls as eps * (|s2| + |s3|) on top
        // of the initial window's bound
        let want = st.delta_s_np1 + PrecisionProfile::BINARY64.eps_p * (1.75 + 1.875);
        assert!((st3.delta_s_np1 - want).abs() <= 1e-30);
        assert!(st3.delta_s_np1 >= st3.delta_s_n);
        assert!(st2.delta_s_np1 >= st2.delta_s_n);
    }

    #[test]
    fn first_term_of_binomial_series() {
        let p = params(&[c(2.0, 0.0)], &[]);
        assert_eq!(ratio_value(&p, 0) * c(0.5, 0.0), c(1.0, 0.0));
    }

    #[test]
    fn config_validation_rejects_out_of_range() {
        let ok = EngineConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            EngineConfig { m: 0, ..ok },
            EngineConfig { n_max: 2, ..ok },
            EngineConfig { epsilon: 0.0, ..ok },
            EngineConfig { epsilon: 1.0, ..ok },
            EngineConfig { tau: 0.0, ..ok },
            EngineConfig { tau: 1.5, ..ok },
        ] {
            assert!(bad.validate().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn binomial_series_converges_to_closed_form() {
        let p = params(&[c(2.0, 0.0)], &[]);
        let point = SeriesPoint::classify(c(0.5, 0.0)).unwrap();
        let cfg = EngineConfig {
            m: 5,
            epsilon: 1e-13,
            ..EngineConfig::default()
        };
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(out.status, Status::Converged);
        assert!((out.value - c(4.0, 0.0)).norm() <= 1e-12 * 4.0, "{}", out.value);
        assert!(out.rel_err_est <= 1e-13);
    }

    #[test]
    fn branch_point_gauss_case() {
        let p = params(&[c(0.5, 0.0), c(0.5, 0.0)], &[c(2.0, 0.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let cfg = EngineConfig {
            m: 30,
            epsilon: 1e-12,
            ..EngineConfig::default()
        };
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(out.status, Status::Converged);
        let want = 4.0 / std::f64::consts::PI;
        assert!(
            (out.value - c(want, 0.0)).norm() <= 1e-12 * want,
            "{} vs {want}",
            out.value
        );
    }

    #[test]
    fn complex_branch_point_case_in_extended_precision() {
        let p = HypergeometricParams::new(
            vec![
                ExtendedComplex::from_parts(1.0, 4.0),
                ExtendedComplex::from_parts(1.5, 4.5),
            ],
            vec![ExtendedComplex::from_parts(3.0, 1.0)],
        )
        .unwrap();
        let point = SeriesPoint::classify(ExtendedComplex::one()).unwrap();
        let cfg = EngineConfig {
            m: 30,
            epsilon: 1e-12,
            ..EngineConfig::default()
        };
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::EXTENDED).unwrap();
        assert_eq!(out.status, Status::Converged);
        let want = c(-0.003206491294324765, -0.006293652031968077);
        let got = c(out.value.re_f64(), out.value.im_f64());
        assert!(
            (got - want).norm() <= 1e-12 * want.norm(),
            "{got} vs {want}"
        );
        assert!(out.n_used <= 25, "n_used = {}", out.n_used);
    }

    #[test]
    fn same_case_in_binary64_at_modest_tolerance() {
        let p = params(&[c(1.0, 4.0), c(1.5, 4.5)], &[c(3.0, 1.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let cfg = EngineConfig {
            m: 30,
            epsilon: 1e-9,
            ..EngineConfig::default()
        };
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(out.status, Status::Converged);
        let want = c(-0.003206491294324765, -0.006293652031968077);
        assert!((out.value - want).norm() <= 1e-9 * want.norm());
    }

    #[test]
    fn wild_parameters_hit_the_precision_ceiling() {
        let p = params(&[c(1.0, 20.0), c(1.5, 25.0)], &[c(3.0, 15.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let cfg = EngineConfig::default();
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(out.status, Status::InsufficientPrecision);
        let mag = out.diagnostics.max_partial_sum_mag;
        assert!(
            (1e17..10f64.powf(18.5)).contains(&mag),
            "max partial-sum magnitude {mag:e}"
        );
    }

    #[test]
    fn terminating_series_is_summed_directly() {
        let p = params(&[c(-3.0, 0.0), c(2.0, 0.0)], &[c(1.5, 0.0)]);
        let point = SeriesPoint::classify(c(0.7, 0.0)).unwrap();
        let out = evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64,
        )
        .unwrap();
        assert_eq!(out.status, Status::Converged);
        assert_eq!(out.n_used, 4);
        assert!((out.value - c(-0.0752, 0.0)).norm() <= 1e-15);
        assert!((out.rel_err_est - 4.0 * PrecisionProfile::BINARY64.eps_p).abs() <= 1e-30);
        // terminating shortcut applies at the branch point too, even where
        // the accelerated regime would be rejected
        let p = params(&[c(-3.0, 0.0), c(5.0, 0.0)], &[c(1.5, 0.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let out = evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64,
        )
        .unwrap();
        assert_eq!(out.status, Status::Converged);
    }

    #[test]
    fn zero_argument_short_circuits() {
        let p = params(&[c(1.0, 4.0), c(1.5, 4.5)], &[c(3.0, 1.0)]);
        let point = SeriesPoint::classify(c(0.0, 0.0)).unwrap();
        let out = evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64,
        )
        .unwrap();
        assert_eq!(out.status, Status::Converged);
        assert_eq!(out.value, c(1.0, 0.0));
        assert_eq!(out.n_used, 1);
    }

    #[test]
    fn denormal_argument_reports_insufficient_precision() {
        let p = params(&[c(1.0, 0.0), c(1.5, 0.0)], &[c(3.0, 0.0)]);
        let point = SeriesPoint::classify(c(1e-320, 0.0)).unwrap();
        let out = evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64,
        )
        .unwrap();
        assert_eq!(out.status, Status::InsufficientPrecision);
        assert!(out.diagnostics.underflow_seen);
    }

    #[test]
    fn divergent_regimes_are_rejected() {
        // branch point needs Re sigma < 0
        let p = params(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(3.0, 0.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        assert!(evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64
        )
        .is_err());
        // circle (z != 1) needs Re sigma < 1
        let p = params(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(1.5, 0.0)]);
        let point = SeriesPoint::classify(c(-1.0, 0.0)).unwrap();
        assert!(evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64
        )
        .is_err());
        // same sigma inside the disk is fine
        let point = SeriesPoint::classify(c(-0.5, 0.0)).unwrap();
        assert!(evaluate(
            &p,
            &point,
            &EngineConfig::default(),
            PrecisionProfile::BINARY64
        )
        .is_ok());
    }

    #[test]
    fn on_circle_evaluation_converges() {
        // alternating series at z = -1 with gentle parameters
        let p = params(&[c(0.5, 0.0), c(0.5, 0.0)], &[c(1.5, 0.0)]);
        let point = SeriesPoint::classify(c(-1.0, 0.0)).unwrap();
        let cfg = EngineConfig {
            m: 20,
            epsilon: 1e-12,
            ..EngineConfig::default()
        };
        let out = evaluate(&p, &point, &cfg, PrecisionProfile::BINARY64).unwrap();
        assert_eq!(out.status, Status::Converged);
        // cross-check against compensated direct summation of the
        // alternating series with many terms
        let sums = partial_sums(&p, c(-1.0, 0.0), 4000);
        let tail_avg = (sums[3998] + sums[3999]) * c(0.5, 0.0);
        assert!(
            (out.value - tail_avg).norm() <= 1e-6,
            "{} vs {tail_avg}",
            out.value
        );
    }

    #[test]
    fn partial_sum_stream_matches_hand_sums() {
        let p = params(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)]);
        let s = partial_sums(&p, c(0.5, 0.0), 4);
        assert_eq!(s[0], c(1.0, 0.0));
        assert!((s[1] - c(1.5, 0.0)).norm() <= 1e-16);
        assert!((s[2] - c(1.75, 0.0)).norm() <= 1e-16);
        assert!((s[3] - c(1.875, 0.0)).norm() <= 1e-16);
    }

    #[test]
    fn traced_evaluation_reports_each_index() {
        let p = params(&[c(0.5, 0.0), c(0.5, 0.0)], &[c(2.0, 0.0)]);
        let point = SeriesPoint::classify(c(1.0, 0.0)).unwrap();
        let cfg = EngineConfig {
            m: 10,
            epsilon: 1e-10,
            ..EngineConfig::default()
        };
        let mut seen = Vec::new();
        let out = evaluate_traced(&p, &point, &cfg, PrecisionProfile::BINARY64, |n, v| {
            seen.push((n, v))
        })
        .unwrap();
        assert_eq!(seen.first().unwrap().0, 1);
        let last = seen.last().unwrap();
        assert_eq!(last.0 + 1, out.n_used);
        assert_eq!(last.1, out.value);
        let ns: Vec<usize> = seen.iter().map(|(n, _)| *n).collect();
        assert!(ns.windows(2).all(|w| w[1] == w[0] + 1));
    }
}
