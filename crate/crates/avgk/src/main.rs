//! Command-line interface for top-K / average-K set-valued classification.
//!
//! Subcommands: `predict`, `evaluate`, `oracle`, `verify`, `calibrate`,
//! `noise-inject`. Data goes to stdout (or `--out`); diagnostics go to
//! stderr. Exit codes: 0 success, 1 failed verification checks, 2 usage or
//! validation errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use avgk::io;
use avgk_core::calibration::fit_temperature;
use avgk_core::losses::check_plugin_bound;
use avgk_core::matrix::ScoreMatrix;
use avgk_core::metrics::{average_set_size, evaluate_curves};
use avgk_core::oracle::{
    corrupt_eta, heterogeneity_table, inject_label_noise, FiniteZoneDistribution,
};
use avgk_core::predictors::{average_k_sets, top_k_sets, PredictionMode};
use avgk_core::verify::{
    all_passed, budget_identity_checks, characterization_checks, excess_risk_checks,
    monte_carlo_agreement, plugin_bound_checks, properness_checks, random_distribution,
    straddle_bound_checks, CheckOutcome, CheckStatus, PLUGIN_SLACK,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "avgk",
    version,
    about = "Top-K and average-K set-valued classification",
    long_about = "Top-K and average-K set-valued classification.\n\n\
        Class indices are 0-based everywhere: in label files, in set output,\n\
        and in noise-group JSON. Scores CSV has no header: one row per\n\
        sample, comma-separated decimal fields. The AVGK_THREADS environment\n\
        variable caps internal parallelism (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict label sets from a score matrix.
    Predict(PredictArgs),
    /// Evaluate error-vs-K curves for both strategies.
    Evaluate(EvaluateArgs),
    /// Exact closed-form analysis of a finite-zone distribution.
    Oracle(OracleArgs),
    /// Monte-Carlo agreement and invariant checks.
    Verify(VerifyArgs),
    /// Fit a softmax temperature to logits by likelihood minimization.
    Calibrate(CalibrateArgs),
    /// Replace labels by uniform draws within confusion groups.
    NoiseInject(NoiseInjectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Topk,
    Avgk,
}

#[derive(Args)]
struct PredictArgs {
    /// Scores CSV (no header, one row per sample).
    #[arg(long)]
    scores: PathBuf,
    /// Set size: an integer for topk, any positive real for avgk.
    #[arg(long)]
    k: f64,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Validate that rows are probability vectors.
    #[arg(long)]
    probabilistic: bool,
    /// Emit an N x C 0/1 CSV mask instead of index lists.
    #[arg(long)]
    mask: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scores: PathBuf,
    /// Labels file, one 0-based class index per line.
    #[arg(long)]
    labels: PathBuf,
    /// Largest set size to evaluate; defaults to min(C, 20).
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    probabilistic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Built-in example distribution (1-4).
    #[arg(long, conflicts_with = "spec")]
    example: Option<u8>,
    /// Distribution JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Budget to analyze.
    #[arg(long)]
    k: Option<usize>,
    /// Emit the example 2-4 heterogeneity comparison instead.
    #[arg(long)]
    table1: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "spec")]
    example: Option<u8>,
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also check the plug-in regret bounds at this corruption level.
    #[arg(long)]
    corrupt: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Logits CSV (arbitrary finite reals).
    #[arg(long)]
    logits: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseInjectArgs {
    #[arg(long)]
    labels: PathBuf,
    /// Groups JSON: {"groups": [[0, 1], [2]]}.
    #[arg(long)]
    groups: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn run(cli: Cli) -> CliResult {
    check_thread_cap()?;
    match cli.command {
        Command::Predict(args) => predict(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Oracle(args) => oracle(args),
        Command::Verify(args) => verify(args),
        Command::Calibrate(args) => calibrate(args),
        Command::NoiseInject(args) => noise_inject(args),
    }
}

/// Sequential execution satisfies any cap; the variable is validated so
/// typos fail loudly instead of being silently ignored.
fn check_thread_cap() -> Result<(), Box<dyn std::error::Error>> {
    if let Ok(raw) = std::env::var("AVGK_THREADS") {
        raw.parse::<usize>()
            .map_err(|_| format!("invalid AVGK_THREADS value {raw:?}: expected 0 (auto) or a thread count"))?;
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_dist(example: Option<u8>, spec: &Option<PathBuf>) -> Result<FiniteZoneDistribution, Box<dyn std::error::Error>> {
    match (example, spec) {
        (Some(id), None) => Ok(FiniteZoneDistribution::builtin_example(id)?),
        (None, Some(path)) => Ok(io::load_distribution(path)?),
        _ => Err("exactly one of --example or --spec is required".into()),
    }
}

fn predict(args: PredictArgs) -> CliResult {
    let scores = io::load_scores(&args.scores, args.probabilistic)?;
    let sets = match args.mode {
        Mode::Topk => {
            if args.k.fract() != 0.0 || args.k < 1.0 {
                return Err(format!("topk requires a positive integer k, got {}", args.k).into());
            }
            top_k_sets(&scores, args.k as usize)?
        }
        Mode::Avgk => average_k_sets(&scores, args.k)?.sets,
    };
    eprintln!("mean set size: {}", average_set_size(&sets));
    let content = if args.mask {
        io::format_mask(&sets)
    } else {
        io::format_sets(&sets)
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn evaluate(args: EvaluateArgs) -> CliResult {
    let scores = io::load_scores(&args.scores, args.probabilistic)?;
    let labels = io::load_labels(&args.labels, scores.n_classes())?;
    let k_max = args.kmax.unwrap_or_else(|| scores.n_classes().min(20));
    let report = evaluate_curves(&scores, &labels, k_max)?;
    emit(&args.out, &io::to_json_sorted(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs) -> CliResult {
    if args.table1 {
        let table = heterogeneity_table()?;
        emit(&args.out, &io::to_json_sorted(&table)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let dist = load_dist(args.example, &args.spec)?;
    let k = args.k.ok_or("--k is required unless --table1 is given")?;
    let analysis = dist.analyze(k)?;
    emit(&args.out, &io::to_json_sorted(&analysis)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    all_passed: bool,
    checks: Vec<CheckOutcome>,
}

fn verify(args: VerifyArgs) -> CliResult {
    let dist = load_dist(args.example, &args.spec)?;
    let ks: Vec<usize> = (1..=3).filter(|&k| k <= dist.n_classes()).collect();

    let mut checks: Vec<CheckOutcome> = monte_carlo_agreement(&dist, args.samples, args.seed, &ks)?
        .iter()
        .map(|c| c.outcome())
        .collect();

    if let Some(eps) = args.corrupt {
        checks.extend(corruption_checks(&dist, eps, args.seed, &ks)?);
    }

    // Randomized invariant suites, aggregated per suite.
    checks.push(corpus_suite("straddle-bounds-corpus", args.seed, straddle_bound_checks)?);
    checks.push(corpus_suite(
        "characterization-corpus",
        args.seed,
        characterization_checks,
    )?);
    checks.push(corpus_suite(
        "budget-identity-corpus",
        args.seed,
        budget_identity_checks,
    )?);
    checks.extend(properness_checks(2_000, args.seed)?);
    checks.extend(plugin_bound_checks(100, args.seed)?);
    checks.extend(excess_risk_checks(100, args.seed)?);

    let report = VerifyReport {
        all_passed: all_passed(&checks),
        checks,
    };
    emit(&args.out, &io::to_json_sorted(&report)?)?;
    Ok(if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Runs one per-distribution check suite over 200 seeded random
/// distributions and aggregates the result.
fn corpus_suite(
    name: &str,
    seed: u64,
    suite: fn(&FiniteZoneDistribution) -> avgk_core::Result<Vec<CheckOutcome>>,
) -> Result<CheckOutcome, Box<dyn std::error::Error>> {
    const CORPUS: u64 = 200;
    let mut failures = 0usize;
    for i in 0..CORPUS {
        let dist = random_distribution(seed.wrapping_add(i));
        failures += suite(&dist)?
            .iter()
            .filter(|o| o.status == CheckStatus::Fail)
            .count();
    }
    Ok(CheckOutcome {
        name: name.into(),
        status: if failures == 0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{CORPUS} random distributions, {failures} failed checks"),
    })
}

/// Plug-in bound checks for the given distribution at corruption `eps`.
fn corruption_checks(
    dist: &FiniteZoneDistribution,
    eps: f64,
    seed: u64,
    ks: &[usize],
) -> Result<Vec<CheckOutcome>, Box<dyn std::error::Error>> {
    let etas: Vec<Vec<f64>> = dist.zones().iter().map(|z| z.eta().to_vec()).collect();
    let matrix = ScoreMatrix::from_rows(&etas)?.into_probabilistic()?;
    let corrupted = corrupt_eta(&matrix, eps, seed)?;
    let eta_hat: Vec<Vec<f64>> = (0..corrupted.n_samples())
        .map(|i| corrupted.row(i).to_vec())
        .collect();
    let mut out = Vec::new();
    for &k in ks {
        for (tag, mode) in [("top", PredictionMode::TopK), ("avg", PredictionMode::AvgK)] {
            let check = check_plugin_bound(dist, &eta_hat, k, mode)?;
            out.push(CheckOutcome {
                name: format!("plugin-corrupt-{tag}-k{k}"),
                status: if check.regret <= check.bound + PLUGIN_SLACK {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                detail: format!("regret {:.6e} <= bound {:.6e}", check.regret, check.bound),
            });
        }
    }
    Ok(out)
}

fn calibrate(args: CalibrateArgs) -> CliResult {
    let logits = io::load_scores(&args.logits, false)?;
    let labels = io::load_labels(&args.labels, logits.n_classes())?;
    let fit = fit_temperature(&logits, &labels)?;
    emit(&args.out, &io::to_json_sorted(&fit)?)?;
    Ok(ExitCode::SUCCESS)
}

fn noise_inject(args: NoiseInjectArgs) -> CliResult {
    let groups = io::load_noise_groups(&args.groups)?;
    let labels = io::load_labels(&args.labels, groups.n_classes())?;
    let noisy = inject_label_noise(&labels, &groups, args.seed)?;
    emit(&args.out, &io::format_labels(&noisy))?;
    Ok(ExitCode::SUCCESS)
}
