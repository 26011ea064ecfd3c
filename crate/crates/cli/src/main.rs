//! `hardy`: command-line front end for the Hardy-constant lab.
//!
//! Exit codes: 0 success, pass or inconclusive; 1 check failed; 2 usage
//! error; 3 violated precondition or hypothesis.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use hardy_core::axioms::check_axioms;
use hardy_core::checks::{
    explore_continuity, jcin_sweep, mu1_sweep, reproduce_lsc_example, verify_cut,
    verify_decreasing, verify_jcin, CheckReport, CutMode, SweepConfig, Verdict,
};
use hardy_core::hardy::{
    arithmetic_hardy, copson_constant, default_y_grid, finite_lower_bound, geometric_probe,
    kedlaya_estimate, nonweighted_limit, ArithmeticMode, HardyEstimate, OptimizerConfig,
};
use hardy_core::json::{ext, to_pretty};
use hardy_core::rational::{parse_number, parse_rational};
use hardy_core::weights::{coarsen, make_sequence, make_sequence_float};
use hardy_core::{
    Blocks, HardyError, MeanSpec, PointVector, StepFunction, WeightSeq, WeightVector, SCHEMA,
};
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "hardy",
    version,
    about = "Hardy constants of weighted means: estimators, closed forms and theorem checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form constants: Copson's C(p) = (1-p)^(-1/p) for power means
    /// with unit weights, and the arithmetic-mean series sum lambda_n/Lambda_n.
    Constant(ConstantArgs),
    /// Estimate the Hardy constant H_M(lambda) of a weighted mean: the best
    /// constant in sum lambda_n M(x_1..x_n; lambda_1..lambda_n) <= H sum lambda_n x_n.
    Estimate(EstimateArgs),
    /// Check theorems and axioms on concrete or random instances.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Exploratory sweeps with no pass/fail semantics.
    Explore {
        #[command(subcommand)]
        what: ExploreCommand,
    },
}

#[derive(Args, Clone)]
struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("which").required(true))]
struct ConstantArgs {
    /// Copson constant C(p) of the power mean P_p (p may be `inf`, `-inf`, `p/q`).
    #[arg(long, group = "which", allow_hyphen_values = true)]
    copson: Option<String>,
    /// Arithmetic-mean constant sum lambda_n/Lambda_n, certified by a tail bound.
    #[arg(long, group = "which", requires = "weights")]
    arithmetic: bool,
    /// Weight sequence descriptor (ones, dyadic, geometric:Q, perturbed-dyadic:K, power:A, periodic:A,B,...).
    #[arg(long)]
    weights: Option<String>,
    /// Truncation point.
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    /// Report the partial sum as a lower bound instead of certifying.
    #[arg(long)]
    partial: bool,
    /// Accept decimal parameters (float mode).
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Method {
    /// Multistart ascent of the finite-section ratio R_N(x); a lower bound.
    Finite,
    /// R evaluated on geometric probes x_n = q^n.
    GeometricProbe,
    /// Sup over y of the liminf of the tail quotient, for nonincreasing lambda_n/Lambda_n.
    Kedlaya,
    /// n * M(1, 1/2, ..., 1/n) with unit weights.
    NonweightedLimit,
}

#[derive(Args)]
struct EstimateArgs {
    /// Mean descriptor (power:P, arithmetic, geometric, harmonic, min, max, quasiarithmetic:G).
    #[arg(long, allow_hyphen_values = true)]
    mean: String,
    /// Weight sequence descriptor.
    #[arg(long, default_value = "ones")]
    weights: String,
    #[arg(long, value_enum, default_value_t = Method::Finite)]
    method: Method,
    /// Section length.
    #[arg(long = "N", default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random starts for the finite method.
    #[arg(long, default_value_t = 8)]
    starts: usize,
    /// Iteration cap for the finite method.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Box `lo,hi` for means that are not homogeneous.
    #[arg(long = "box")]
    box_bounds: Option<String>,
    /// Probe ratio for geometric-probe.
    #[arg(long, default_value = "1/2")]
    q: String,
    /// Trailing window fraction approximating the liminf (kedlaya).
    #[arg(long, default_value_t = 0.5)]
    window: f64,
    /// Comma-separated y grid (kedlaya); defaults to 2^k, k = -10..10.
    #[arg(long)]
    y_grid: Option<String>,
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// The weighted-mean axioms (nullhomogeneity, reduction, mean value,
    /// elimination) and the declared symmetry, monotonicity, Jensen-concavity
    /// and homogeneity flags, on random instances.
    Axioms(AxiomsArgs),
    /// Prefix-mean domination under the same-sum nonincreasing rearrangement:
    /// M(y_1..y_n) >= M(x_1..x_n) for monotone Jensen-concave means.
    Jcin(JcinArgs),
    /// Monotonicity of the Hardy constant along the partition order:
    /// psi ≺ lambda implies H(psi) <= H(lambda).
    Cut(CutArgs),
    /// u -> mean of f over [0, u) is nonincreasing for nonincreasing step functions.
    Decreasing(DecreasingArgs),
    /// The semicontinuity example: dyadic weights with one term raised to 1
    /// have arithmetic constants tending to E + 1/2 while the weights tend to dyadic.
    LscExample(LscArgs),
    /// Finite sections under random rational weights never beat the
    /// unit-weight constant C(p) of a symmetric monotone power mean.
    Mu1Sweep(Mu1Args),
}

#[derive(Args)]
struct AxiomsArgs {
    #[arg(long, allow_hyphen_values = true)]
    mean: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct JcinArgs {
    #[arg(long, allow_hyphen_values = true)]
    mean: String,
    /// Points for a single instance; random instances otherwise.
    #[arg(long, requires = "w")]
    x: Option<String>,
    /// Weights (`p/q` literals) for the single instance.
    #[arg(long, requires = "x")]
    w: Option<String>,
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    /// Restrict random weights to integers.
    #[arg(long)]
    integer_weights: bool,
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("coarser").required(true))]
struct CutArgs {
    /// `arithmetic` compares exact series; other monotone concave means use
    /// finite-section lower bounds.
    #[arg(long, default_value = "arithmetic", allow_hyphen_values = true)]
    mean: String,
    /// The finer sequence lambda.
    #[arg(long)]
    weights: String,
    /// Block sizes turning lambda into psi (one number: uniform blocks).
    #[arg(long, group = "coarser")]
    blocks: Option<String>,
    /// An explicit coarser sequence psi.
    #[arg(long, group = "coarser")]
    psi: Option<String>,
    /// Terms of psi examined.
    #[arg(long = "N", default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct DecreasingArgs {
    #[arg(long, allow_hyphen_values = true)]
    mean: String,
    /// Breakpoints `0,t_1,...,t_m` as `p/q` literals.
    #[arg(long)]
    breakpoints: String,
    /// Values on the m pieces.
    #[arg(long)]
    values: String,
    /// Evaluation points `u` as `p/q` literals; defaults to the breakpoints.
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct LscArgs {
    #[arg(long, default_value_t = 25)]
    kmax: usize,
    #[arg(long = "N", default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Mu1Args {
    #[arg(long, default_value = "power:1/2", allow_hyphen_values = true)]
    mean: String,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum ExploreCommand {
    /// Finite-section constants along lambda_k -> lambda_k + t, probing whether
    /// H_M is continuous in the weights. Informational only.
    Continuity(ContinuityArgs),
}

#[derive(Args)]
struct ContinuityArgs {
    #[arg(long, allow_hyphen_values = true)]
    mean: String,
    #[arg(long, default_value = "dyadic")]
    weights: String,
    /// Index of the perturbed weight.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Comma-separated perturbations t.
    #[arg(long, default_value = "0,0.01,0.1,1", allow_hyphen_values = true)]
    t: String,
    #[arg(long = "N", default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    out: Output,
}

enum Failure {
    Usage(String),
    Precondition(String),
    Io(String),
}

impl From<HardyError> for Failure {
    fn from(e: HardyError) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Run = Result<Verdict, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        return report(f);
    }
    match dispatch(cli.command) {
        Ok(Verdict::Fail) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Failure::Precondition(msg) => {
            eprintln!("precondition not met: {msg}");
            ExitCode::from(3)
        }
        Failure::Io(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HARDY_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "HARDY_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(e.to_string()))
}

fn dispatch(cmd: Command) -> Run {
    match cmd {
        Command::Constant(a) => constant(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify { check } => match check {
            VerifyCommand::Axioms(a) => axioms(a),
            VerifyCommand::Jcin(a) => jcin(a),
            VerifyCommand::Cut(a) => cut(a),
            VerifyCommand::Decreasing(a) => decreasing(a),
            VerifyCommand::LscExample(a) => lsc(a),
            VerifyCommand::Mu1Sweep(a) => mu1(a),
        },
        Command::Explore { what } => match what {
            ExploreCommand::Continuity(a) => continuity(a),
        },
    }
}

fn emit(out: &Output, body: String) -> Result<(), Failure> {
    match &out.output {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn csv_table(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn num(v: f64) -> String {
    match ext(v) {
        Value::String(s) => s,
        _ => v.to_string(),
    }
}

fn mean(s: &str) -> Result<MeanSpec, Failure> {
    Ok(s.parse::<MeanSpec>()?)
}

fn sequence(s: &str, float: bool) -> Result<WeightSeq, Failure> {
    Ok(if float {
        make_sequence_float(s)?
    } else {
        make_sequence(s)?
    })
}

fn floats(s: &str) -> Result<Vec<f64>, Failure> {
    Ok(s.split(',')
        .map(parse_number)
        .collect::<Result<Vec<_>, _>>()?)
}

fn rationals(s: &str) -> Result<Vec<BigRational>, Failure> {
    Ok(s.split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?)
}

fn constant(a: ConstantArgs) -> Run {
    if let Some(p) = &a.copson {
        let p = parse_number(p)?;
        let c = copson_constant(p);
        let body = match a.out.format {
            Format::Json => {
                to_pretty(&json!({
                    "schema": SCHEMA,
                    "constant": "copson",
                    "p": ext(p),
                    "value": ext(c),
                    "direction": "exact",
                })) + "\n"
            }
            Format::Csv => csv_table(&["p", "value"], [vec![num(p), num(c)]])?,
            Format::Text => format!("{}\n", num(c)),
        };
        emit(&a.out, body)?;
        return Ok(Verdict::Pass);
    }
    let w = sequence(a.weights.as_deref().unwrap_or_default(), a.float)?;
    let mode = if a.partial {
        ArithmeticMode::Partial
    } else {
        ArithmeticMode::Certified
    };
    let est = arithmetic_hardy(&w, a.n, mode)?;
    emit(&a.out, estimate_body(&est, a.out.format)?)?;
    Ok(Verdict::Pass)
}

fn estimate_body(est: &HardyEstimate, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => to_pretty(&est.to_json()) + "\n",
        Format::Csv => {
            let dir = est.to_json()["direction"]
                .as_str()
                .unwrap_or_default()
                .to_string();
            csv_table(
                &["N", "value", "direction", "method"],
                [vec![
                    est.n.to_string(),
                    num(est.value),
                    dir,
                    est.method.clone(),
                ]],
            )?
        }
        Format::Text => {
            let dir = est.to_json()["direction"]
                .as_str()
                .unwrap_or_default()
                .to_string();
            let mut s = format!(
                "{} ({dir}, {}, N = {})\n",
                num(est.value),
                est.method,
                est.n
            );
            if let Some(w) = est.warning() {
                s += &format!("warning: {w}\n");
            }
            s
        }
    })
}

fn optimizer(
    seed: u64,
    starts: usize,
    max_iter: usize,
    box_bounds: Option<&str>,
) -> Result<OptimizerConfig, Failure> {
    let box_bounds = match box_bounds {
        Some(s) => match floats(s)?.as_slice() {
            [lo, hi] if *lo > 0.0 && lo < hi => Some((*lo, *hi)),
            _ => {
                return Err(Failure::Usage(format!(
                    "--box expects `lo,hi` with 0 < lo < hi, got `{s}`"
                )))
            }
        },
        None => None,
    };
    Ok(OptimizerConfig {
        starts,
        max_iter,
        box_bounds,
        ..OptimizerConfig::with_seed(seed)
    })
}

fn estimate(a: EstimateArgs) -> Run {
    let m = mean(&a.mean)?;
    let est = match a.method {
        Method::NonweightedLimit => nonweighted_limit(&m, a.n)?,
        _ => {
            let w = sequence(&a.weights, a.float)?;
            match a.method {
                Method::Finite => {
                    let cfg = optimizer(a.seed, a.starts, a.max_iter, a.box_bounds.as_deref())?;
                    finite_lower_bound(&m, &w, a.n, &cfg)?
                }
                Method::GeometricProbe => geometric_probe(&m, &w, parse_number(&a.q)?, a.n)?,
                Method::Kedlaya => {
                    let grid = match &a.y_grid {
                        Some(s) => floats(s)?,
                        None => default_y_grid(),
                    };
                    kedlaya_estimate(&m, &w, &grid, a.n, a.window)?
                }
                Method::NonweightedLimit => unreachable!(),
            }
        }
    };
    emit(&a.out, estimate_body(&est, a.out.format)?)?;
    Ok(Verdict::Pass)
}

fn check_body(rep: &CheckReport, format: Format) -> Result<String, Failure> {
    let verdict = rep.to_json()["verdict"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    Ok(match format {
        Format::Json => to_pretty(&rep.to_json()) + "\n",
        Format::Csv => csv_table(
            &["check", "verdict", "instances", "worst_margin"],
            [vec![
                rep.check.clone(),
                verdict,
                rep.instances.to_string(),
                num(rep.worst_margin),
            ]],
        )?,
        Format::Text => format!(
            "{}: {verdict} ({} instances, worst margin {})\n",
            rep.check,
            rep.instances,
            num(rep.worst_margin)
        ),
    })
}

fn finish_check(rep: CheckReport, out: &Output) -> Run {
    emit(out, check_body(&rep, out.format)?)?;
    Ok(rep.verdict)
}

fn axioms(a: AxiomsArgs) -> Run {
    let m = mean(&a.mean)?;
    let r = check_axioms(&m, a.trials, a.seed);
    let pass = r.passes();
    let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    let body = match a.out.format {
        Format::Json => {
            let mut v = serde_json::to_value(&r).expect("axiom report serializes");
            v["schema"] = json!(SCHEMA);
            v["check"] = json!("axioms");
            v["pass"] = json!(pass);
            v["verdict"] = json!(if pass { "pass" } else { "fail" });
            v["flags_consistent"] = json!(r.flags_consistent());
            v["seed"] = json!(a.seed);
            to_pretty(&v) + "\n"
        }
        Format::Csv => csv_table(
            &[
                "axiom",
                "claimed",
                "skipped",
                "trials",
                "failures",
                "worst_violation",
            ],
            r.outcomes.iter().map(|o| {
                vec![
                    serde_json::to_value(o.axiom)
                        .unwrap()
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    o.claimed.to_string(),
                    o.skipped.clone().unwrap_or_default(),
                    o.trials.to_string(),
                    o.failures.to_string(),
                    num(o.worst_violation),
                ]
            }),
        )?,
        Format::Text => {
            let mut s = format!(
                "axioms for {}: {}\n",
                r.mean,
                if pass { "pass" } else { "fail" }
            );
            for o in &r.outcomes {
                let name = serde_json::to_value(o.axiom)
                    .unwrap()
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                let state = match (&o.skipped, o.passed()) {
                    (Some(why), _) => format!("skipped ({why})"),
                    (None, true) => "ok".into(),
                    (None, false) => format!("{} of {} violated", o.failures, o.trials),
                };
                let tag = if o.claimed { "" } else { " [not claimed]" };
                s += &format!("  {name}: {state}{tag}\n");
            }
            s
        }
    };
    emit(&a.out, body)?;
    Ok(verdict)
}

fn jcin(a: JcinArgs) -> Run {
    let m = mean(&a.mean)?;
    let rep = match (&a.x, &a.w) {
        (Some(x), Some(w)) => {
            let x = PointVector::new(floats(x)?)?;
            let w = if a.float {
                WeightVector::from_f64(&floats(w)?)?
            } else {
                WeightVector::parse(w)?
            };
            verify_jcin(&m, &x, &w)?
        }
        _ => jcin_sweep(
            &m,
            &SweepConfig {
                instances: a.instances,
                seed: a.seed,
                max_len: a.max_len,
                integer_weights: a.integer_weights,
            },
        )?,
    };
    finish_check(rep, &a.out)
}

fn cut(a: CutArgs) -> Run {
    let lam = make_sequence(&a.weights)?;
    let psi = match (&a.blocks, &a.psi) {
        (Some(b), _) => coarsen(&lam, Blocks::parse(b)?),
        (_, Some(p)) => make_sequence(p)?,
        _ => unreachable!("clap requires one of --blocks and --psi"),
    };
    let m = mean(&a.mean)?;
    let mode = if m.is_arithmetic() {
        CutMode::Arithmetic
    } else {
        CutMode::Mean(m, OptimizerConfig::with_seed(a.seed))
    };
    finish_check(verify_cut(&mode, &psi, &lam, a.n, a.tol)?, &a.out)
}

fn decreasing(a: DecreasingArgs) -> Run {
    let m = mean(&a.mean)?;
    let bps = rationals(&a.breakpoints)?;
    let f = StepFunction::new(bps.clone(), floats(&a.values)?)?;
    let grid = match &a.grid {
        Some(g) => rationals(g)?,
        None => bps.into_iter().skip(1).collect(),
    };
    finish_check(verify_decreasing(&m, &f, &grid)?, &a.out)
}

fn lsc(a: LscArgs) -> Run {
    let t = reproduce_lsc_example(a.kmax, a.n, a.tol)?;
    let body = match a.out.format {
        Format::Json => to_pretty(&serde_json::to_value(&t).expect("table serializes")) + "\n",
        Format::Csv => csv_table(
            &["k", "value"],
            t.csv_rows().map(|(k, v)| vec![k.to_string(), num(v)]),
        )?,
        Format::Text => {
            let mut s = String::new();
            for (k, v) in t.csv_rows() {
                s += &format!("k = {k:>3}  {v:.12}\n");
            }
            s += &format!(
                "baseline {:.12}, limit {:.12}, |value(kmax) - limit| = {:.3e}, trailing min {:.12}: {}\n",
                t.baseline,
                t.limit,
                t.limit_error,
                t.tail_min,
                if t.pass { "pass" } else { "fail" }
            );
            if !t.below_baseline.is_empty() {
                s += &format!("below the baseline at k = {:?}\n", t.below_baseline);
            }
            s
        }
    };
    emit(&a.out, body)?;
    Ok(if t.pass { Verdict::Pass } else { Verdict::Fail })
}

fn mu1(a: Mu1Args) -> Run {
    let m = mean(&a.mean)?;
    let rep = mu1_sweep(
        &m,
        a.instances,
        a.n,
        a.seed,
        a.tol,
        &OptimizerConfig::with_seed(a.seed),
    )?;
    if a.out.format == Format::Csv {
        let values: Vec<f64> = rep.details["values"]
            .as_array()
            .map(|v| v.iter().filter_map(Value::as_f64).collect())
            .unwrap_or_default();
        let bound = rep.details["bound"].clone();
        let bound = bound
            .as_f64()
            .map(num)
            .unwrap_or_else(|| bound.as_str().unwrap_or_default().to_string());
        emit(
            &a.out,
            csv_table(
                &["instance", "value", "bound"],
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![i.to_string(), num(*v), bound.clone()]),
            )?,
        )?;
        return Ok(rep.verdict);
    }
    finish_check(rep, &a.out)
}

fn continuity(a: ContinuityArgs) -> Run {
    let m = mean(&a.mean)?;
    let w = sequence(&a.weights, a.float)?;
    let ts = floats(&a.t)?;
    let rows = explore_continuity(&m, &w, a.k, &ts, a.n, &OptimizerConfig::with_seed(a.seed))?;
    let body = match a.out.format {
        Format::Json => {
            to_pretty(&json!({
                "schema": SCHEMA,
                "experiment": "continuity",
                "mean": m.to_string(),
                "weights": w.descriptor(),
                "k": a.k,
                "N": a.n,
                "seed": a.seed,
                "rows": rows,
            })) + "\n"
        }
        Format::Csv => csv_table(
            &["t", "value"],
            rows.iter().map(|r| vec![num(r.t), num(r.value)]),
        )?,
        Format::Text => rows
            .iter()
            .map(|r| format!("t = {:<10} {:.10}\n", num(r.t), r.value))
            .collect(),
    };
    emit(&a.out, body)?;
    Ok(Verdict::Inconclusive)
}
