//! Randomized evaluation campaigns: parameter sampling, reference
//! selection, termination-quality classification, and aggregate tallies.

use super::loggamma::gauss_2f1_at_one_extended;
use super::sums::{closed_form_1f0, direct_sum};
use crate::engine::{evaluate, EngineConfig, EvalOutcome, Status, TruncVariant};
use crate::scalar::PrecisionProfile;
use crate::termratio::HypergeometricParams;
use crate::SeriesPoint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One campaign's shape: parameter box half-width `param_radius`, number of
/// lower parameters `q`, sample count, argument regime, and the engine
/// settings every sample runs with.
#[derive(Clone, Copy, Debug)]
pub struct CampaignSpec {
    pub param_radius: f64,
    pub q: usize,
    pub count: usize,
    pub at_branch: bool,
    pub m: usize,
    pub epsilon: f64,
    pub n_max: usize,
    pub seed: u64,
}

/// Termination quality of one sample against its reference value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Convergence,
    FalsePositive,
    NoConvergence,
    FalseNegative,
}

/// Upper edges of the true-error / estimated-error ratio bins; the final
/// bin collects everything above the last edge.
pub const RATIO_BIN_EDGES: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 100.0];

/// Aggregate campaign outcome. Category counts cover samples with a usable
/// reference; `excluded` counts the rest. The ratio histogram and the term
/// counters cover samples whose status was Converged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OutcomeTally {
    pub count: usize,
    pub converged: usize,
    pub false_positive: usize,
    pub no_convergence: usize,
    pub false_negative: usize,
    pub excluded: usize,
    pub status_converged: usize,
    pub n_max_hits: usize,
    pub converged_terms_le_1000: usize,
    pub max_n_used_converged: usize,
    pub ratio_histogram: [usize; RATIO_BIN_EDGES.len() + 1],
}

impl OutcomeTally {
    pub fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.converged += other.converged;
        self.false_positive += other.false_positive;
        self.no_convergence += other.no_convergence;
        self.false_negative += other.false_negative;
        self.excluded += other.excluded;
        self.status_converged += other.status_converged;
        self.n_max_hits += other.n_max_hits;
        self.converged_terms_le_1000 += other.converged_terms_le_1000;
        self.max_n_used_converged = self.max_n_used_converged.max(other.max_n_used_converged);
        for (a, b) in self
            .ratio_histogram
            .iter_mut()
            .zip(other.ratio_histogram.iter())
        {
            *a += b;
        }
        self
    }

    /// Samples that received a category, the denominator for percentages.
    pub fn classified(&self) -> usize {
        self.converged + self.false_positive + self.no_convergence + self.false_negative
    }

    pub fn percent(&self, part: usize) -> f64 {
        let den = self.classified();
        if den == 0 {
            0.0
        } else {
            100.0 * part as f64 / den as f64
        }
    }

    /// Converged-status samples whose error ratio is at most `edge`, which
    /// must be one of the histogram edges.
    pub fn within_ratio(&self, edge: f64) -> usize {
        let bins = RATIO_BIN_EDGES.iter().take_while(|&&e| e <= edge).count();
        self.ratio_histogram[..bins].iter().sum()
    }

    pub fn to_json_string(&self) -> String {
        let edges: Vec<String> = RATIO_BIN_EDGES.iter().map(|e| format!("{e}")).collect();
        let bins: Vec<String> = self.ratio_histogram.iter().map(|b| b.to_string()).collect();
        format!(
            concat!(
                "{{\"count\":{},\"classified\":{},\"excluded\":{},",
                "\"converged\":{},\"false_positive\":{},\"no_convergence\":{},",
                "\"false_negative\":{},\"status_converged\":{},\"n_max_hits\":{},",
                "\"converged_terms_le_1000\":{},\"max_n_used_converged\":{},",
                "\"ratio_bin_edges\":[{}],\"ratio_histogram\":[{}],",
                "\"percent\":{{\"converged\":{:.2},\"false_positive\":{:.2},",
                "\"no_convergence\":{:.2},\"false_negative\":{:.2}}}}}"
            ),
            self.count,
            self.classified(),
            self.excluded,
            self.converged,
            self.false_positive,
            self.no_convergence,
            self.false_negative,
            self.status_converged,
            self.n_max_hits,
            self.converged_terms_le_1000,
            self.max_n_used_converged,
            edges.join(","),
            bins.join(","),
            self.percent(self.converged),
            self.percent(self.false_positive),
            self.percent(self.no_convergence),
            self.percent(self.false_negative),
        )
    }
}

fn near_nonpositive_integer(w: Complex64) -> bool {
    let k = w.re.round();
    k <= 0.0 && ((w.re - k).powi(2) + w.im * w.im).sqrt() <= 1e-9
}

/// Draws the sample with the given index. Sampling is keyed on
/// (seed, index) alone, so any execution order or thread layout produces
/// identical cases.
pub fn random_case(
    spec: &CampaignSpec,
    index: u64,
) -> (HypergeometricParams<Complex64>, Complex64) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let r = spec.param_radius;
    let part = |rng: &mut ChaCha8Rng| rng.gen_range(-r..r);

    let upper: Vec<Complex64> = (0..=spec.q)
        .map(|_| Complex64::new(part(&mut rng), part(&mut rng)))
        .collect();
    let mut upper = upper;
    let mut lower = Vec::with_capacity(spec.q);
    let free_lower = if spec.at_branch && spec.q > 0 {
        spec.q - 1
    } else {
        spec.q
    };
    for _ in 0..free_lower {
        let w = loop {
            let w = Complex64::new(part(&mut rng), part(&mut rng));
            if !near_nonpositive_integer(w) {
                break w;
            }
        };
        lower.push(w);
    }
    if spec.at_branch {
        if spec.q == 0 {
            // no lower parameter to steer, so constrain the upper one
            upper[0].re = rng.gen_range(-r..0.0);
        } else {
            let s: f64 = upper.iter().map(|a| a.re).sum::<f64>()
                - lower.iter().map(|b| b.re).sum::<f64>();
            let hi = (s + 0.1 * r).max(r);
            let w = loop {
                let w = Complex64::new(rng.gen_range(s..hi), rng.gen_range(-r..r));
                if !near_nonpositive_integer(w) {
                    break w;
                }
            };
            lower.push(w);
        }
    }
    let z = if spec.at_branch {
        Complex64::new(1.0, 0.0)
    } else {
        let rad = rng.gen_range(0.0f64..1.0).sqrt();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        Complex64::new(rad * th.cos(), rad * th.sin())
    };
    let params = HypergeometricParams::new(upper, lower)
        .expect("sampler avoids lower-parameter poles by construction");
    (params, z)
}

/// Assigns a termination-quality category by comparing the claimed status
/// and error against the reference. Returns None when the reference is too
/// small for relative error to mean anything.
pub fn classify(
    outcome: &EvalOutcome<Complex64>,
    reference: Complex64,
    epsilon: f64,
) -> Option<Category> {
    let ref_mag = reference.norm();
    if !ref_mag.is_finite() || ref_mag <= 1e3 * PrecisionProfile::BINARY64.f_norm {
        return None;
    }
    let true_rel = (outcome.value - reference).norm() / ref_mag;
    Some(match outcome.status {
        Status::Converged => {
            if true_rel <= 10.0 * epsilon {
                Category::Convergence
            } else {
                Category::FalsePositive
            }
        }
        _ => {
            if true_rel <= epsilon {
                Category::FalseNegative
            } else {
                Category::NoConvergence
            }
        }
    })
}

fn reference_for(
    spec: &CampaignSpec,
    params: &HypergeometricParams<Complex64>,
    z: Complex64,
) -> Option<Complex64> {
    if spec.at_branch {
        if spec.q == 1 {
            return gauss_2f1_at_one_extended(params.upper()[0], params.upper()[1], params.lower()[0])
                .ok();
        }
        // no closed form: cross-check against a higher-order run
        let cfg = EngineConfig {
            m: spec.m + 10,
            n_max: spec.n_max,
            epsilon: spec.epsilon,
            tau: 0.1,
            trunc_variant: TruncVariant::Modified,
        };
        let point = SeriesPoint::classify(z).ok()?;
        let out = evaluate(params, &point, &cfg, PrecisionProfile::BINARY64).ok()?;
        return (out.status == Status::Converged).then_some(out.value);
    }
    if spec.q == 0 {
        return closed_form_1f0(params.upper()[0], z).ok();
    }
    if z.norm() <= 0.9 {
        return direct_sum(params, z, 1e-16, 200_000).ok();
    }
    None
}

fn bump_ratio(hist: &mut [usize; RATIO_BIN_EDGES.len() + 1], ratio: f64) {
    let idx = RATIO_BIN_EDGES
        .iter()
        .position(|&e| ratio <= e)
        .unwrap_or(RATIO_BIN_EDGES.len());
    hist[idx] += 1;
}

fn sample_tally(spec: &CampaignSpec, index: u64) -> OutcomeTally {
    let mut tally = OutcomeTally {
        count: 1,
        ..OutcomeTally::default()
    };
    let (params, z) = random_case(spec, index);
    let cfg = EngineConfig {
        m: spec.m,
        n_max: spec.n_max,
        epsilon: spec.epsilon,
        tau: 0.1,
        trunc_variant: TruncVariant::Modified,
    };
    let point = match SeriesPoint::classify(z) {
        Ok(p) => p,
        Err(_) => {
            tally.excluded += 1;
            return tally;
        }
    };
    let outcome = match evaluate(&params, &point, &cfg, PrecisionProfile::BINARY64) {
        Ok(o) => o,
        Err(_) => {
            tally.excluded += 1;
            return tally;
        }
    };
    if outcome.status == Status::MaxIterations {
        tally.n_max_hits += 1;
    }
    if outcome.status == Status::Converged {
        tally.status_converged += 1;
        if outcome.n_used <= 1000 {
            tally.converged_terms_le_1000 += 1;
        }
        tally.max_n_used_converged = outcome.n_used;
    }
    let Some(reference) = reference_for(spec, &params, z) else {
        tally.excluded += 1;
        return tally;
    };
    match classify(&outcome, reference, spec.epsilon) {
        Some(Category::Convergence) => tally.converged += 1,
        Some(Category::FalsePositive) => tally.false_positive += 1,
        Some(Category::NoConvergence) => tally.no_convergence += 1,
        Some(Category::FalseNegative) => tally.false_negative += 1,
        None => {
            tally.excluded += 1;
            return tally;
        }
    }
    if outcome.status == Status::Converged {
        let true_rel = (outcome.value - reference).norm() / reference.norm();
        let ratio = if outcome.rel_err_est > 0.0 && outcome.rel_err_est.is_finite() {
            true_rel / outcome.rel_err_est
        } else {
            f64::INFINITY
        };
        bump_ratio(&mut tally.ratio_histogram, ratio);
    }
    tally
}

/// Runs the whole campaign, fanning samples across the thread pool. The
/// result is identical for any thread count because each sample is seeded
/// from (seed, index) and tallies merge commutatively.
pub fn run_campaign(spec: &CampaignSpec) -> OutcomeTally {
    (0..spec.count as u64)
        .into_par_iter()
        .map(|i| sample_tally(spec, i))
        .reduce(OutcomeTally::default, OutcomeTally::merge)
}
