//! Command line front end for the accelerated hypergeometric evaluator.
//!
//! Six subcommands cover the workflows the library supports: `eval` for a
//! single point, `trace` and `compare` for per-iteration error data, `coeffs`
//! for the expansion coefficients behind the remainder model, `campaign` for
//! seeded random verification sweeps, and `bench` for wall-clock timing.
//! Structured output is JSON (or CSV where the data is columnar) so the
//! results can feed plots and tables directly.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use hypaccel::asymptotics::{self, SeriesPoint};
use hypaccel::emethod;
use hypaccel::engine::{self, EngineConfig, Status, TruncVariant};
use hypaccel::oracle;
use hypaccel::scalar::{ComplexScalar, ExtendedComplex};
use hypaccel::termratio::{ratio_taylor_coeffs, HypergeometricParams};
use hypaccel::{CampaignSpec, PointKind};

#[derive(Parser)]
#[command(
    name = "hypaccel",
    version,
    about = "Evaluate generalized hypergeometric series by remainder-model acceleration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one series and report status, value, and error estimate
    Eval(EvalArgs),
    /// Emit per-iteration relative error columns for a list of orders
    Trace(TraceArgs),
    /// Dump the remainder-model and term-ratio coefficients for one case
    Coeffs(CoeffsArgs),
    /// Run a seeded random verification campaign and tally the outcomes
    Campaign(CampaignArgs),
    /// Compare the accelerated estimates against the linear-system method
    Compare(CompareArgs),
    /// Time repeated evaluations over a seeded random case stream
    Bench(BenchArgs),
}

/// The series under evaluation, as command line text.
#[derive(Args)]
struct CaseArgs {
    /// Upper parameters, comma-separated complex literals (e.g. "1+4i,1.5+4.5i")
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    upper: String,

    /// Lower parameters beyond the implicit factorial, comma separated
    #[arg(long, value_name = "LIST", default_value = "", allow_hyphen_values = true)]
    lower: String,

    /// Argument of the series, a complex literal
    #[arg(long, allow_hyphen_values = true)]
    z: String,
}

/// Engine tuning knobs shared by the evaluation-driven subcommands.
#[derive(Args)]
struct TuningArgs {
    /// Iteration cap
    #[arg(long = "N", value_name = "N", default_value_t = 2000)]
    n_max: usize,

    /// Relative accuracy target
    #[arg(long, default_value_t = 2e-14)]
    eps: f64,

    /// Discount applied to the rounding-error estimate before comparison
    #[arg(long, default_value_t = 0.1)]
    tau: f64,

    /// Truncation-estimate variant
    #[arg(long, value_enum, default_value_t = VariantArg::Modified)]
    variant: VariantArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Copy, Clone, ValueEnum)]
enum VariantArg {
    Modified,
    Plain,
}

impl From<VariantArg> for TruncVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Modified => TruncVariant::Modified,
            VariantArg::Plain => TruncVariant::Plain,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    case: CaseArgs,

    /// Acceleration order
    #[arg(long, default_value_t = 45)]
    m: usize,

    #[command(flatten)]
    tuning: TuningArgs,

    /// Working precision
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    case: CaseArgs,

    /// Comma-separated acceleration orders; order 0 means the raw partial sums
    #[arg(long, value_name = "LIST", default_value = "45")]
    m: String,

    #[command(flatten)]
    tuning: TuningArgs,

    /// Working precision
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,

    /// Reference value as a complex literal, overriding the built-in oracles
    #[arg(long, allow_hyphen_values = true)]
    reference: Option<String>,

    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    case: CaseArgs,

    /// Number of coefficients to emit
    #[arg(long, default_value_t = 45)]
    m: usize,

    /// Working precision
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the dump here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How the random cases of a campaign or bench run are drawn.
#[derive(Args)]
struct DrawArgs {
    /// Radius of the parameter draw box
    #[arg(long = "R", value_name = "RADIUS", default_value_t = 1.0)]
    radius: f64,

    /// Number of free lower parameters
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Draw cases at the branch point z = 1 instead of inside the disk
    #[arg(long)]
    branch: bool,

    /// Acceleration order
    #[arg(long, default_value_t = 45)]
    m: usize,

    /// Iteration cap per evaluation
    #[arg(long = "N", value_name = "N", default_value_t = 2000)]
    n_max: usize,

    /// Relative accuracy target per evaluation
    #[arg(long, default_value_t = 2e-14)]
    eps: f64,

    /// Base seed of the case stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DrawArgs {
    fn spec(&self, count: usize) -> Result<CampaignSpec, String> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(format!("draw radius must be positive, got {}", self.radius));
        }
        let cfg = EngineConfig {
            m: self.m,
            n_max: self.n_max,
            epsilon: self.eps,
            tau: 0.1,
            trunc_variant: TruncVariant::Modified,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(CampaignSpec {
            param_radius: self.radius,
            q: self.q,
            count,
            at_branch: self.branch,
            m: self.m,
            epsilon: self.eps,
            n_max: self.n_max,
            seed: self.seed,
        })
    }

    fn spec_json(&self, count: usize) -> Value {
        json!({
            "R": self.radius,
            "q": self.q,
            "at_branch": self.branch,
            "count": count,
            "m": self.m,
            "eps": self.eps,
            "N": self.n_max,
            "seed": self.seed,
        })
    }
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    draw: DrawArgs,

    /// Number of random cases
    #[arg(long, default_value_t = 1000)]
    count: usize,

    /// Write the tally here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    case: CaseArgs,

    /// Model order used by both methods
    #[arg(long, default_value_t = 15)]
    m: usize,

    /// Largest starting index traced
    #[arg(long = "N", value_name = "N", default_value_t = 200)]
    n_max: usize,

    /// Relative accuracy target for the accelerated method
    #[arg(long, default_value_t = 2e-14)]
    eps: f64,

    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    draw: DrawArgs,

    /// Number of timed evaluations
    #[arg(long, default_value_t = 200)]
    count: usize,

    /// Write the summary here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// HYPACCEL_THREADS caps the worker pool used by campaign and bench runs.
fn configure_threads() -> Result<(), String> {
    let Ok(text) = std::env::var("HYPACCEL_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HYPACCEL_THREADS must be a positive integer, got {text:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure worker pool: {e}"))
}

fn stringify(e: hypaccel::Error) -> String {
    e.to_string()
}

fn parse_list<T: ComplexScalar>(text: &str, what: &str) -> Result<Vec<T>, String> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|item| {
            T::parse(item.trim()).map_err(|e| format!("bad {what} entry {item:?}: {e}"))
        })
        .collect()
}

fn parse_case<T: ComplexScalar>(case: &CaseArgs) -> Result<(HypergeometricParams<T>, T), String> {
    let upper = parse_list::<T>(&case.upper, "--upper")?;
    let lower = parse_list::<T>(&case.lower, "--lower")?;
    let params = HypergeometricParams::new(upper, lower).map_err(stringify)?;
    let z = T::parse(case.z.trim()).map_err(|e| format!("bad --z: {e}"))?;
    Ok((params, z))
}

fn engine_config(m: usize, tuning: &TuningArgs) -> Result<EngineConfig, String> {
    let cfg = EngineConfig {
        m,
        n_max: tuning.n_max,
        epsilon: tuning.eps,
        tau: tuning.tau,
        trunc_variant: tuning.variant.into(),
    };
    cfg.validate().map_err(stringify)?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn pretty(doc: &Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON serialization cannot fail");
    text.push('\n');
    text
}

/// A finite complex value renders as an [re, im] pair; anything else is null.
fn complex_value<T: ComplexScalar>(v: T) -> Value {
    let (re, im) = (v.re_f64(), v.im_f64());
    if re.is_finite() && im.is_finite() {
        json!([re, im])
    } else {
        Value::Null
    }
}

fn status_name(status: Status) -> &'static str {
    match status {
        Status::Converged => "converged",
        Status::InsufficientPrecision => "insufficient_precision",
        Status::MaxIterations => "max_iterations",
    }
}

fn status_exit(status: Status) -> u8 {
    match status {
        Status::Converged => 0,
        Status::InsufficientPrecision => 2,
        Status::MaxIterations => 3,
    }
}

fn cmd_eval(a: EvalArgs) -> Result<u8, String> {
    let (doc, status) = match a.precision {
        PrecisionArg::Double => eval_doc::<Complex64>(&a, false)?,
        PrecisionArg::Extended => eval_doc::<ExtendedComplex>(&a, true)?,
    };
    emit(a.out.as_deref(), &pretty(&doc))?;
    Ok(status_exit(status))
}

fn eval_doc<T: ComplexScalar>(a: &EvalArgs, full: bool) -> Result<(Value, Status), String> {
    let (params, z) = parse_case::<T>(&a.case)?;
    let point = SeriesPoint::classify(z).map_err(stringify)?;
    let cfg = engine_config(a.m, &a.tuning)?;
    let outcome = engine::evaluate(&params, &point, &cfg, T::PROFILE).map_err(stringify)?;
    let mut doc = json!({
        "status": status_name(outcome.status),
        "value": complex_value(outcome.value),
        "rel_err_est": outcome.rel_err_est,
        "n_used": outcome.n_used,
        "diagnostics": {
            "max_partial_sum_mag": outcome.diagnostics.max_partial_sum_mag,
            "underflow_seen": outcome.diagnostics.underflow_seen,
        },
    });
    if full {
        doc["value_full"] = Value::String(outcome.value.format_full());
    }
    Ok((doc, outcome.status))
}

fn parse_orders(text: &str) -> Result<Vec<usize>, String> {
    let orders: Vec<usize> = text
        .split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| format!("bad order {item:?} in --m"))
        })
        .collect::<Result<_, _>>()?;
    if orders.is_empty() {
        return Err("--m needs at least one order".to_string());
    }
    Ok(orders)
}

/// Picks the reference value the error columns are measured against: an
/// explicit --reference wins, then a terminating sum, the closed form at the
/// branch point with one lower parameter, the binomial closed form without
/// lower parameters, and a direct compensated sum well inside the disk.
fn resolve_reference(case: &CaseArgs, explicit: Option<&str>) -> Result<Complex64, String> {
    let value = if let Some(text) = explicit {
        Complex64::parse(text.trim()).map_err(|e| format!("bad --reference: {e}"))?
    } else {
        let (params, z) = parse_case::<Complex64>(case)?;
        if let Some(degree) = params.terminating_degree() {
            *engine::partial_sums(&params, z, degree + 2)
                .last()
                .expect("terminating sum has at least one partial sum")
        } else if params.q() == 1 && z == Complex64::new(1.0, 0.0) {
            oracle::gauss_2f1_at_one(params.upper()[0], params.upper()[1], params.lower()[0])
                .map_err(stringify)?
        } else if params.q() == 0 {
            oracle::closed_form_1f0(params.upper()[0], z).map_err(stringify)?
        } else if z.norm() <= 0.9 {
            oracle::direct_sum(&params, z, 1e-16, 200_000).map_err(stringify)?
        } else {
            return Err(
                "no built-in reference for this case; supply one with --reference".to_string(),
            );
        }
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err("reference value is not finite".to_string());
    }
    if value.norm() == 0.0 {
        return Err("reference value is zero, relative error is undefined".to_string());
    }
    Ok(value)
}

fn cmd_trace(a: TraceArgs) -> Result<u8, String> {
    let csv = match a.precision {
        PrecisionArg::Double => trace_csv::<Complex64>(&a)?,
        PrecisionArg::Extended => trace_csv::<ExtendedComplex>(&a)?,
    };
    emit(a.out.as_deref(), &csv)?;
    Ok(0)
}

fn trace_csv<T: ComplexScalar>(a: &TraceArgs) -> Result<String, String> {
    let (params, z) = parse_case::<T>(&a.case)?;
    let point = SeriesPoint::classify(z).map_err(stringify)?;
    let orders = parse_orders(&a.m)?;
    let reference = resolve_reference(&a.case, a.reference.as_deref())?;
    let ref_t = T::from_parts(reference.re, reference.im);
    let ref_mag = reference.norm();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(orders.len());
    let mut deepest = 0usize;
    for &m in &orders {
        if m == 0 {
            columns.push(Vec::new());
            continue;
        }
        let cfg = engine_config(m, &a.tuning)?;
        let mut column = Vec::new();
        engine::evaluate_traced(&params, &point, &cfg, T::PROFILE, |_, s| {
            column.push((s - ref_t).abs() / ref_mag);
        })
        .map_err(stringify)?;
        deepest = deepest.max(column.len());
        columns.push(column);
    }
    if orders.contains(&0) {
        let rows = if deepest > 0 { deepest } else { a.tuning.n_max };
        let raw: Vec<f64> = engine::partial_sums(&params, z, rows)
            .into_iter()
            .map(|s| (s - ref_t).abs() / ref_mag)
            .collect();
        for (slot, _) in orders.iter().enumerate().filter(|&(_, &m)| m == 0) {
            columns[slot] = raw.clone();
        }
        deepest = deepest.max(rows);
    }

    let mut csv = String::from("n");
    for &m in &orders {
        csv.push_str(&format!(",m{m}"));
    }
    csv.push('\n');
    for row in 0..deepest {
        csv.push_str(&(row + 1).to_string());
        for column in &columns {
            csv.push(',');
            if let Some(err) = column.get(row) {
                csv.push_str(&format!("{err:e}"));
            }
        }
        csv.push('\n');
    }
    Ok(csv)
}

fn cmd_coeffs(a: CoeffsArgs) -> Result<u8, String> {
    let text = match a.precision {
        PrecisionArg::Double => coeffs_output::<Complex64>(&a, false)?,
        PrecisionArg::Extended => coeffs_output::<ExtendedComplex>(&a, true)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn coeffs_output<T: ComplexScalar>(a: &CoeffsArgs, full: bool) -> Result<String, String> {
    let (params, z) = parse_case::<T>(&a.case)?;
    let point = SeriesPoint::classify(z).map_err(stringify)?;
    let expansion = match point.kind() {
        PointKind::BranchPoint => asymptotics::coeffs_branch(&params, a.m),
        _ => asymptotics::coeffs_offbranch(&params, z, a.m),
    }
    .map_err(stringify)?;
    let ratio = ratio_taylor_coeffs(&params, a.m);

    match a.format {
        FormatArg::Json => {
            let pairs = |values: &[T]| -> Value {
                Value::Array(values.iter().map(|&v| complex_value(v)).collect())
            };
            let mut doc = json!({
                "lambda": complex_value(expansion.lambda),
                "at_branch": expansion.at_branch,
                "m": expansion.m(),
                "c": pairs(&expansion.c),
                "r": pairs(&ratio.r),
            });
            if full {
                let strings = |values: &[T]| -> Value {
                    Value::Array(
                        values
                            .iter()
                            .map(|v| Value::String(v.format_full()))
                            .collect(),
                    )
                };
                doc["lambda_full"] = Value::String(expansion.lambda.format_full());
                doc["c_full"] = strings(&expansion.c);
                doc["r_full"] = strings(&ratio.r);
            }
            Ok(pretty(&doc))
        }
        FormatArg::Csv => {
            let mut csv = String::from("k,c_re,c_im,r_re,r_im\n");
            let cell = |v: Option<&T>, pick: fn(&T) -> f64| {
                v.map(|w| format!("{:e}", pick(w))).unwrap_or_default()
            };
            for k in 0..expansion.c.len().max(ratio.r.len()) {
                let c = expansion.c.get(k);
                let r = ratio.r.get(k);
                csv.push_str(&format!(
                    "{k},{},{},{},{}\n",
                    cell(c, |w| w.re_f64()),
                    cell(c, |w| w.im_f64()),
                    cell(r, |w| w.re_f64()),
                    cell(r, |w| w.im_f64())
                ));
            }
            Ok(csv)
        }
    }
}

fn cmd_campaign(a: CampaignArgs) -> Result<u8, String> {
    let spec = a.draw.spec(a.count)?;
    let tally = oracle::run_campaign(&spec);
    let mut doc: Value = serde_json::from_str(&tally.to_json_string())
        .map_err(|e| format!("tally serialization is broken: {e}"))?;
    doc["spec"] = a.draw.spec_json(a.count);
    emit(a.out.as_deref(), &pretty(&doc))?;
    Ok(0)
}

fn cmd_compare(a: CompareArgs) -> Result<u8, String> {
    let (params, z) = parse_case::<Complex64>(&a.case)?;
    let point = SeriesPoint::classify(z).map_err(stringify)?;
    let fitted = emethod::e_method_trace(&params, &point, a.m, a.n_max).map_err(stringify)?;

    let reference = resolve_reference(&a.case, None)?;
    let ref_mag = reference.norm();
    let cfg = EngineConfig {
        m: a.m,
        n_max: a.n_max,
        epsilon: a.eps,
        tau: 0.1,
        trunc_variant: TruncVariant::Modified,
    };
    cfg.validate().map_err(stringify)?;
    let mut rows: BTreeMap<usize, (Option<f64>, Option<f64>)> = BTreeMap::new();
    engine::evaluate_traced(&params, &point, &cfg, Complex64::PROFILE, |n, s| {
        rows.entry(n).or_default().0 = Some((s - reference).norm() / ref_mag);
    })
    .map_err(stringify)?;
    for (n, err) in fitted {
        rows.entry(n).or_default().1 = Some(err);
    }

    let mut csv = String::from("n,rel_err_primary,rel_err_emethod\n");
    for (n, (primary, fitted)) in rows {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        csv.push_str(&format!("{n},{},{}\n", cell(primary), cell(fitted)));
    }
    emit(a.out.as_deref(), &csv)?;
    Ok(0)
}

fn time_stats(samples: &[f64]) -> Value {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    json!({ "median_ms": median, "mean_ms": mean })
}

fn cmd_bench(a: BenchArgs) -> Result<u8, String> {
    let spec = a.draw.spec(a.count)?;
    let cfg = EngineConfig {
        m: spec.m,
        n_max: spec.n_max,
        epsilon: spec.epsilon,
        tau: 0.1,
        trunc_variant: TruncVariant::Modified,
    };

    let mut all = Vec::with_capacity(a.count);
    let mut converged = Vec::new();
    let mut tally = BTreeMap::from([
        ("converged", 0u64),
        ("insufficient_precision", 0),
        ("max_iterations", 0),
        ("error", 0),
    ]);
    for index in 0..a.count {
        let (params, z) = oracle::random_case(&spec, index as u64);
        let start = Instant::now();
        let outcome = SeriesPoint::classify(z)
            .and_then(|point| engine::evaluate(&params, &point, &cfg, Complex64::PROFILE));
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        all.push(elapsed_ms);
        match outcome {
            Ok(outcome) => {
                *tally.get_mut(status_name(outcome.status)).expect("tally key") += 1;
                if outcome.status == Status::Converged {
                    converged.push(elapsed_ms);
                }
            }
            Err(_) => *tally.get_mut("error").expect("tally key") += 1,
        }
    }

    let mut doc = json!({
        "count": a.count,
        "statuses": tally,
        "converged_count": converged.len(),
    });
    if !all.is_empty() {
        doc["all"] = time_stats(&all);
    }
    if !converged.is_empty() {
        doc["converged"] = time_stats(&converged);
    }
    emit(a.out.as_deref(), &pretty(&doc))?;
    Ok(0)
}
