//! The `msetarx` command line.
//!
//! Exit codes: 0 success, 2 usage, 3 validation or parse, 4 numeric or
//! estimation. Diagnostics go to stderr as one JSON object per line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::dgp::{make_dgp, Dgp};
use crate::error::{Error, Result};
use crate::estimate::{fit, residual_diagnostics, Algorithm, FitConfig, FitResult};
use crate::io::{
    load_model, load_model_config, read_series, save_model, save_report, write_series,
    write_trajectory, FitDocument, SeriesData,
};
use crate::model::{ModelSpec, ThresholdPartition};
use crate::simulate::{simulate_msetarx, SimulationConfig};
use crate::stationarity::{check_regime_stationarity, with_cycles, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Sample size of the reference simulation study.
pub const REPRODUCE_N: usize = 50_000;

#[derive(Debug, Parser)]
#[command(name = "msetarx", version, about = "Threshold VARX simulation, diagnostics and estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a series from a model spec.
    Simulate(SimulateArgs),
    /// Estimate per-regime coefficients from a series.
    Fit(FitArgs),
    /// Report companion spectral radii of a model.
    Stationarity(StationarityArgs),
    /// Simulate, fit and tabulate one of the reference processes.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = crate::simulate::DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Seed of the exogenous noise stream (defaults to --seed).
    #[arg(long)]
    exo_seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Append the linear regime index of each row.
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    model_config: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    algorithm: String,
    #[arg(long, default_value_t = crate::estimate::DEFAULT_RIDGE)]
    ridge: f64,
    #[arg(long, default_value_t = crate::estimate::DEFAULT_ALPHA)]
    alpha: f64,
    /// One value for all regimes, or a comma-separated value per regime.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    upsilon: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
    /// CSV of the max-abs parameter error after every update; needs
    /// reference coefficients in the model config.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StationarityArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Regime cycle for the first-order cycle condition, e.g. "1,1;2,1".
    #[arg(long)]
    cycle: Vec<String>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// dgp1 or dgp2.
    which: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value = "batch")]
    algorithm: String,
    #[arg(long, default_value_t = REPRODUCE_N)]
    n: usize,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        Error::Numeric(_)
        | Error::RankDeficient { .. }
        | Error::Explosive { .. }
        | Error::Estimation(_) => EXIT_NUMERIC,
        Error::Domain(_)
        | Error::Shape(_)
        | Error::Index(_)
        | Error::Validation(_)
        | Error::Config(_)
        | Error::Precondition(_)
        | Error::Parse(_)
        | Error::Io(_) => EXIT_VALIDATION,
    }
}

fn error_line(err: &Error) -> String {
    let mut obj = json!({
        "error": err.kind(),
        "exit_code": exit_code(err),
        "message": err.to_string(),
    });
    if let Error::Validation(v) = err {
        obj["violations"] = json!(v);
    }
    obj.to_string()
}

fn warning_line(msg: &str) -> String {
    json!({ "warning": msg }).to_string()
}

/// Runs the CLI with process stdout/stderr and returns the exit code.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given streams and returns the exit code.
pub fn run_command_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e);
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            let text = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let text = text.strip_prefix("error: ").unwrap_or(&text).to_string();
            let _ = writeln!(err, "{}", error_line(&Error::Usage(text)));
            return EXIT_USAGE;
        }
    };
    let mut warnings = Vec::new();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a, &mut warnings),
        Command::Fit(a) => cmd_fit(a, &mut warnings),
        Command::Stationarity(a) => cmd_stationarity(a),
        Command::Reproduce(a) => cmd_reproduce(a, out, &mut warnings),
    };
    for w in &warnings {
        let _ = writeln!(err, "{}", warning_line(w));
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}", error_line(&e));
            exit_code(&e)
        }
    }
}

fn cmd_simulate(a: SimulateArgs, warnings: &mut Vec<String>) -> Result<()> {
    let spec = load_model(&a.model)?;
    let mut cfg = SimulationConfig::new(a.n, a.seed).with_burn_in(a.burn_in);
    if let Some(s) = a.exo_seed {
        cfg = cfg.with_exo_seed(s);
    }
    let out = simulate_msetarx(&spec, &cfg)?;
    warnings.extend(out.warnings.iter().cloned());
    write_series(&a.out, &SeriesData::from_simulation(&out, &spec, a.trace))
}

fn fit_config(
    partition: ThresholdPartition,
    spec_dims: (usize, usize, usize),
    algorithm: Algorithm,
    ridge: f64,
    alpha: f64,
    upsilon: Vec<f64>,
) -> FitConfig {
    let (delay, p, q) = spec_dims;
    let mut cfg = FitConfig::new(partition, delay, p, q, algorithm);
    cfg.ridge = ridge;
    cfg.alpha = alpha;
    cfg.upsilon = upsilon;
    cfg
}

fn report_failures(result: &FitResult, warnings: &mut Vec<String>) {
    for r in &result.regimes {
        if let Some(f) = &r.failure {
            warnings.push(f.clone());
        }
    }
}

fn cmd_fit(a: FitArgs, warnings: &mut Vec<String>) -> Result<()> {
    let algorithm: Algorithm = a.algorithm.parse()?;
    let config = load_model_config(&a.model_config)?;
    let data = read_series(&a.data)?;
    let dims = config.dims;
    if data.y.cols() != dims.dim {
        return Err(Error::Validation(vec![format!(
            "series has {} y columns, model has D={}",
            data.y.cols(),
            dims.dim
        )]));
    }
    let uses_exo = dims.kappa > 0 && dims.q > 0;
    if uses_exo && data.f.cols() != dims.kappa {
        return Err(Error::Validation(vec![format!(
            "series has {} f columns, model has kappa={}",
            data.f.cols(),
            dims.kappa
        )]));
    }
    let f = if uses_exo {
        data.f
    } else {
        crate::linalg::Matrix::zeros(data.y.rows(), 0)
    };

    let mut cfg = fit_config(
        config.partition,
        (dims.d, dims.p, dims.q),
        algorithm,
        a.ridge,
        a.alpha,
        a.upsilon,
    );
    if a.trajectory.is_some() {
        let truth = config.reference.as_ref().ok_or_else(|| {
            Error::Usage("--trajectory requires regime coefficients in the model config".into())
        })?;
        cfg.truth = Some(truth.stacked_thetas()?);
        cfg.record_trajectory = true;
    }
    let result = fit(&data.y, &f, &cfg)?;
    report_failures(&result, warnings);
    let summary = residual_diagnostics(&result).ok();
    save_report(&a.out, &FitDocument::new(&result, &cfg, summary.as_ref()))?;
    if let (Some(path), Some(points)) = (&a.trajectory, &result.trajectory) {
        write_trajectory(path, points)?;
    }
    Ok(())
}

/// Parses "j1,j2;j1,j2" into regime tuples.
fn parse_cycle(text: &str) -> Result<Vec<Vec<usize>>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|regime| {
            regime
                .split(',')
                .map(|j| {
                    j.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Usage(format!("invalid cycle '{}'", text)))
                })
                .collect()
        })
        .collect()
}

fn cmd_stationarity(a: StationarityArgs) -> Result<()> {
    let spec = load_model(&a.model)?;
    let cycles = a
        .cycle
        .iter()
        .map(|c| parse_cycle(c))
        .collect::<Result<Vec<_>>>()?;
    let report = check_regime_stationarity(&spec, DEFAULT_TOL)?;
    let report = with_cycles(report, &spec, &cycles)?;
    save_report(&a.out, &report)
}

fn interval(breaks: &[f64], j: usize) -> String {
    let lo = if j == 1 {
        "-inf".to_string()
    } else {
        format!("{}", breaks[j - 2])
    };
    let hi = if j > breaks.len() {
        "+inf".to_string()
    } else {
        format!("{}", breaks[j - 1])
    };
    format!("[{}, {})", lo, hi)
}

fn fmt_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{:9.4}", v))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Plain-text table of estimated coefficients and regime times.
pub fn coefficient_table(spec: &ModelSpec, result: &FitResult) -> String {
    let total = result.total_count().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} estimation, D={} kappa={} p={} q={} d={}",
        result.algorithm, result.dim, result.kappa, result.p, result.q, result.delay
    );
    for r in &result.regimes {
        let cells: Vec<String> = r
            .index
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("y{} in {}", i + 1, interval(&spec.partition.breakpoints()[i], j)))
            .collect();
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "Regime {} ({}): {}",
            r.linear + 1,
            r.index.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","),
            cells.join(", ")
        );
        let _ = writeln!(
            s,
            "  regime time {} ({:.4})",
            r.count,
            r.count as f64 / total
        );
        let Some(b) = result.blocks(r.linear) else {
            let _ = writeln!(s, "  not estimated: {}", r.failure.as_deref().unwrap_or("unknown"));
            continue;
        };
        let _ = writeln!(s, "  a0  = {}", fmt_row(&b.a0));
        let named = b
            .a
            .iter()
            .enumerate()
            .map(|(i, m)| (format!("A{}", i + 1), m))
            .chain(b.exo.iter().enumerate().map(|(i, m)| (format!("LX{}", i + 1), m)));
        for (name, m) in named {
            for row in 0..m.rows() {
                let label = if row == 0 { name.as_str() } else { "" };
                let _ = writeln!(s, "  {:<4}= {}", label, fmt_row(m.row(row)));
            }
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "total regime time {}", result.total_count());
    s
}

fn cmd_reproduce(a: ReproduceArgs, out: &mut dyn Write, warnings: &mut Vec<String>) -> Result<()> {
    let which: Dgp = a.which.parse()?;
    let algorithm: Algorithm = a.algorithm.parse()?;
    let spec = make_dgp(which);
    fs::create_dir_all(&a.out_dir)?;
    let path = |name: &str| -> PathBuf { Path::new(&a.out_dir).join(name) };

    save_model(path("model.json"), &spec)?;
    let sim = simulate_msetarx(&spec, &SimulationConfig::new(a.n, a.seed))?;
    warnings.extend(sim.warnings.iter().cloned());
    write_series(path("series.csv"), &SeriesData::from_simulation(&sim, &spec, true))?;

    let cfg = fit_config(
        spec.partition.clone(),
        (spec.delay, spec.p, spec.q),
        algorithm,
        crate::estimate::DEFAULT_RIDGE,
        crate::estimate::DEFAULT_ALPHA,
        vec![crate::estimate::DEFAULT_UPSILON],
    );
    let result = fit(&sim.y, &sim.f, &cfg)?;
    report_failures(&result, warnings);
    let summary = residual_diagnostics(&result).ok();
    save_report(path("fit.json"), &FitDocument::new(&result, &cfg, summary.as_ref()))?;
    save_report(
        path("stationarity.json"),
        &check_regime_stationarity(&spec, DEFAULT_TOL)?,
    )?;

    let mut table = coefficient_table(&spec, &result);
    let truth = spec.stacked_thetas()?;
    let _ = writeln!(table, "max |estimate - truth| {:.4}", result.max_abs_error(&truth));
    fs::write(path("table.txt"), &table)?;
    out.write_all(table.as_bytes())?;
    Ok(())
}
