//! `stablepave`: batch driver for paving experiments, instance generation and invariant suites.

mod report;
mod suites;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use stablepave::instances::{complete_graph, random_kernel_matrix, random_process, InstanceKind};
use stablepave::matrix::MatrixFile;
use stablepave::paving::{exhaustive_paving, interlacing_descent, matrix_paving, two_stage_paving};
use stablepave::process::entropy::{epsilon_for_delta, r_for_delta};
use stablepave::process::generators::{independent, ust_edges};
use stablepave::process::{sr_paving, PointProcess};
use stablepave::PolyFile;

use report::{PavingReport, RunReport};
use suites::{SuiteParams, SUITES};

/// Default numerical tolerance when neither `--tol` nor the environment sets one.
const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "stablepave", version, about = "Paving experiments for real stable polynomials and strongly Rayleigh processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pave a PSD contraction (read from --in or generated) by exhaustive search.
    PaveMatrix(PaveMatrixArgs),
    /// Pave a multi-affine polynomial read from --in.
    PavePoly(PavePolyArgs),
    /// Two-stage paving of a process's centered kernel, with per-part entropy gaps.
    SrPave(SrPaveArgs),
    /// Run invariant suites over random instances.
    Verify(VerifyArgs),
    /// Write a random process as JSON.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numerical tolerance.
    #[arg(long, env = "SRPAVE_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PaveMatrixArgs {
    /// Matrix JSON `{"n", "rows"}`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Diagonal bound; defaults to the largest diagonal entry.
    #[arg(long)]
    alpha: Option<f64>,
    /// Size of the generated matrix when --in is absent.
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolyMethod {
    Exhaustive,
    Descent,
    TwoStage,
}

#[derive(Debug, Args)]
struct PavePolyArgs {
    /// Polynomial JSON `{"n", "terms": [{"vars", "coeff"}]}`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = PolyMethod::Exhaustive)]
    method: PolyMethod,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Diagonal bound for the exhaustive and descent methods.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Bound on the diagonal roots for the two-stage method.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SrPaveArgs {
    /// Process JSON `{"n", "pmf": [{"set", "p"}]}`; generated from --kind and --n when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Target entropy gap.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Number of parts per stage; derived from --delta when absent.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value = "determinantal")]
    kind: InstanceKind,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Instances per suite.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Ground-set size, capped per suite; random per instance when absent.
    #[arg(long)]
    n: Option<usize>,
    /// Restrict process-based suites to one generator.
    #[arg(long)]
    kind: Option<InstanceKind>,
    /// Parts per stage for suites that take one.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Per-instance scalars as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value = "determinantal")]
    kind: InstanceKind,
    /// Number of points; for `ust` the number of vertices of the complete graph.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Common marginal for `independent`; random when absent.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Executes one command; `Ok(false)` when a verification failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::PaveMatrix(a) => pave_matrix(a),
        Command::PavePoly(a) => pave_poly(a),
        Command::SrPave(a) => sr_pave(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn validate_common(c: &Common) -> Result<()> {
    ensure!(c.tol > 0.0 && c.tol.is_finite(), "--tol must be positive, got {}", c.tol);
    Ok(())
}

fn pave_matrix(a: PaveMatrixArgs) -> Result<bool> {
    validate_common(&a.common)?;
    ensure!(a.r >= 2, "--r must be at least 2");
    let k = match &a.input {
        Some(path) => read_json::<MatrixFile>(path)?.to_matrix()?,
        None => {
            ensure!(a.n >= 1, "--n must be positive");
            let alpha = a.alpha.unwrap_or(0.25);
            ensure!(alpha > 0.0 && alpha <= 1.0, "--alpha must lie in (0, 1]");
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            random_kernel_matrix(a.n, alpha, &mut rng).0
        }
    };
    let alpha = a.alpha.unwrap_or_else(|| k.diagonal().iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE));
    ensure!(alpha > 0.0 && alpha <= 1.0, "--alpha must lie in (0, 1]");
    let start = Instant::now();
    let rep = matrix_paving(&k, a.r, alpha)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mut out = PavingReport::new(&rep.result, a.r, Some(alpha), None, ms);
    out.norms = Some(out.select(&rep.result, &rep.norms));
    write_json(&out, a.common.out.as_deref())?;
    Ok(out.certified)
}

fn pave_poly(a: PavePolyArgs) -> Result<bool> {
    validate_common(&a.common)?;
    ensure!(a.r >= 2, "--r must be at least 2");
    let g = read_json::<PolyFile>(&a.input)?.to_poly()?;
    let start = Instant::now();
    let (result, alpha, lambda) = match a.method {
        PolyMethod::Exhaustive => (exhaustive_paving(&g, a.r, a.alpha)?, Some(a.alpha), None),
        PolyMethod::Descent => (interlacing_descent(&g, a.r, a.alpha, a.common.tol)?.result, Some(a.alpha), None),
        PolyMethod::TwoStage => (two_stage_paving(&g, a.r, a.lambda)?, None, Some(a.lambda)),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let out = PavingReport::new(&result, a.r, alpha, lambda, ms);
    write_json(&out, a.common.out.as_deref())?;
    Ok(out.certified)
}

fn sr_pave(a: SrPaveArgs) -> Result<bool> {
    validate_common(&a.common)?;
    let eps = epsilon_for_delta(a.delta)?;
    let r = match a.r {
        Some(r) => r,
        None => r_for_delta(a.delta)?,
    };
    ensure!(r >= 2, "--r must be at least 2");
    let x: PointProcess = match &a.input {
        Some(path) => read_json(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            random_process(a.kind, a.n, &mut rng)?
        }
    };
    let start = Instant::now();
    let rep = sr_paving(&x, r)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let mut out = PavingReport::new(&rep.result, r, None, Some(1.0), ms);
    out.entropy_gaps = Some(out.select(&rep.result, &rep.entropy_gaps));
    out.delta = Some(a.delta);
    out.epsilon = Some(eps);
    write_json(&out, a.common.out.as_deref())?;
    Ok(out.certified && rep.max_gap() < a.delta)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    validate_common(&a.common)?;
    ensure!(a.count >= 1, "--count must be positive");
    ensure!(a.alpha > 0.0 && a.alpha <= 1.0, "--alpha must lie in (0, 1]");
    ensure!(a.delta > 0.0, "--delta must be positive");
    if let Some(n) = a.n {
        ensure!(n >= 1, "--n must be positive");
    }
    let selected: Vec<_> = if a.suite == "all" {
        SUITES.iter().collect()
    } else {
        match SUITES.iter().find(|s| s.name == a.suite) {
            Some(s) => vec![s],
            None => bail!(
                "unknown suite {:?}; available: all, {}",
                a.suite,
                SUITES.iter().map(|s| s.name).collect::<Vec<_>>().join(", ")
            ),
        }
    };
    let params = SuiteParams {
        n: a.n,
        kind: a.kind,
        r: a.r,
        alpha: a.alpha,
        delta: a.delta,
        tol: a.common.tol,
        seed: a.common.seed,
    };
    let start = Instant::now();
    let suites = selected.iter().map(|s| suites::run_suite(s, &params, a.count)).collect();
    let report = RunReport::new(&params, a.count, suites, start.elapsed().as_secs_f64() * 1e3);
    for s in &report.suites {
        eprintln!("{:<26} {:>5} passed {:>5} failed", s.suite, s.passed, s.failed);
    }
    if let Some(path) = &a.csv {
        report.write_csv(path)?;
    }
    write_json(&report, a.common.out.as_deref())?;
    Ok(report.failed == 0)
}

fn gen(a: GenArgs) -> Result<bool> {
    validate_common(&a.common)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let x = match (a.kind, a.p) {
        (InstanceKind::Independent, Some(p)) => {
            ensure!((0.0..=1.0).contains(&p), "--p must lie in [0, 1]");
            independent(&vec![p; a.n])?
        }
        (_, Some(_)) => bail!("--p applies to the independent kind only"),
        (InstanceKind::Ust, None) => {
            ensure!(a.n >= 2, "a spanning tree needs at least 2 vertices");
            let edges = complete_graph(a.n);
            ensure!(edges.len() <= stablepave::multiaffine::MAX_VARS, "K_{} has too many edges", a.n);
            ust_edges(a.n, &edges)?
        }
        (kind, None) => random_process(kind, a.n, &mut rng)?,
    };
    write_json(&x, a.common.out.as_deref())?;
    Ok(true)
}
