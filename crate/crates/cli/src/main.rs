//! Command-line front end: traces solution curves of periodically forced
//! singular oscillators from JSON run configurations and re-checks,
//! classifies and plots the results.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification or shape failure. Diagnostics go to stderr.

mod config;
mod csv;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use perioscope_core::continuation::{trace_span, StopReason};
use perioscope_core::models::ValidationReport;
use perioscope_core::verify::{shape_report_points, verify_ivp, ShapeReport};

use config::RunConfig;

/// Tolerance at which `verify` re-checks CSV rows.
const VERIFY_TOL: f64 = 1e-5;

/// Failures grouped by exit code: 1 config, 2 numerics, 3 verification.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "perioscope",
    version,
    about = "Continuation toolkit for T-periodic solutions of singular second-order ODEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace the solution curve mu = phi(xi); writes CSV, SVG and a report.
    Trace(CommonArgs),
    /// Re-verify every CSV row by re-integration on an independent grid.
    Verify(CommonArgs),
    /// Classify the shape of a traced curve from its CSV.
    Analyze(CommonArgs),
    /// Trace a built-in configuration.
    Reproduce {
        /// Built-in configuration name: fig1, fig2 or fig3.
        figure: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for CSV/SVG/report outputs (and CSV input).
    #[arg(long, value_name = "PATH", default_value = ".")]
    out_dir: PathBuf,
    /// Override continuation.grid_N.
    #[arg(long, value_name = "N")]
    grid_n: Option<usize>,
    /// Override continuation.delta_xi.
    #[arg(long, value_name = "X")]
    delta_xi: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version print to stdout and succeed; any other
            // usage problem is a configuration error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trace(args) => trace_run(&required_config(&args)?, &args.out_dir),
        Command::Verify(args) => verify_run(&required_config(&args)?, &args.out_dir),
        Command::Analyze(args) => analyze_run(&required_config(&args)?, &args.out_dir),
        Command::Reproduce { figure, common } => reproduce_run(&figure, &common),
    }
}

fn required_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let path = args
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("this subcommand needs --config PATH".into()))?;
    let mut config = RunConfig::load(path)?;
    apply_overrides(&mut config, args)?;
    Ok(config)
}

fn apply_overrides(config: &mut RunConfig, args: &CommonArgs) -> Result<(), CliError> {
    if let Some(grid) = args.grid_n {
        config.continuation.grid_n = grid;
    }
    if let Some(delta) = args.delta_xi {
        config.continuation.delta_xi = delta;
    }
    if args.grid_n.is_some() || args.delta_xi.is_some() {
        config.validate()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceReport<'a> {
    command: &'static str,
    family: &'a str,
    points: usize,
    xi_first: f64,
    xi_last: f64,
    mu_first: f64,
    mu_last: f64,
    stop_lower: &'a StopReason,
    stop_upper: &'a StopReason,
    validation: &'a ValidationReport,
}

fn trace_run(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let prob = config.problem()?;
    let cfg = config.continuation();
    let validation = prob.validate();
    for check in validation.failures() {
        eprintln!(
            "hypothesis {}: FAIL ({:.6e} vs {:.6e}) — {}",
            check.name, check.lhs, check.rhs, check.detail
        );
    }

    let cont = &config.continuation;
    let span = trace_span(&prob, &cfg, config.anchor(), cont.xi_start, cont.xi_end)
        .map_err(|err| CliError::Numerical(err.to_string()))?;

    ensure_dir(out_dir)?;
    let csv_path = config.csv_path(out_dir);
    let svg_path = config.svg_path(out_dir);
    let report_path = config.report_path(out_dir);

    csv::write(&csv_path, &span.curve)?;
    let title = format!("mu vs xi ({})", prob.family().name());
    svg::write(&svg_path, &span.curve.xi_mu(), &title)?;

    let first = span.curve.points.first().expect("traced curve is never empty");
    let last = span.curve.points.last().expect("traced curve is never empty");
    write_json(
        &report_path,
        &TraceReport {
            command: "trace",
            family: prob.family().name(),
            points: span.curve.len(),
            xi_first: first.xi,
            xi_last: last.xi,
            mu_first: first.mu,
            mu_last: last.mu,
            stop_lower: &span.stop_lower,
            stop_upper: &span.stop_upper,
            validation: &validation,
        },
    )?;

    if config.output.verbosity >= 1 {
        println!(
            "traced {} points over xi in [{:.6}, {:.6}]",
            span.curve.len(),
            first.xi,
            last.xi
        );
        for (side, stop) in [("lower", &span.stop_lower), ("upper", &span.stop_upper)] {
            if *stop != StopReason::ReachedTarget {
                println!("  {side} leg stopped early: {stop:?}");
            }
        }
        println!(
            "wrote {}, {}, {}",
            csv_path.display(),
            svg_path.display(),
            report_path.display()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct RowFailure {
    /// 1-based data row number (header excluded).
    row: usize,
    xi: f64,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    rows: usize,
    steps: usize,
    tol: f64,
    worst_periodicity_gap: f64,
    worst_derivative_gap: f64,
    worst_mean_gap: f64,
    failures: Vec<RowFailure>,
}

fn verify_run(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let prob = config.problem()?;
    let csv_path = config.csv_path(out_dir);
    let rows = csv::read(&csv_path)?;
    if rows.is_empty() {
        return Err(CliError::Verification(format!(
            "{}: no data rows to verify",
            csv_path.display()
        )));
    }

    // An independent, finer grid than the one that produced the rows.
    let steps = 3 * config.continuation.grid_n;
    let mut report = VerifyReport {
        command: "verify",
        rows: rows.len(),
        steps,
        tol: VERIFY_TOL,
        worst_periodicity_gap: 0.0,
        worst_derivative_gap: 0.0,
        worst_mean_gap: 0.0,
        failures: Vec::new(),
    };
    for (index, row) in rows.iter().enumerate() {
        match verify_ivp(&prob, row.xi, row.mu, row.u0, row.du0, steps, VERIFY_TOL) {
            Ok(result) => {
                report.worst_periodicity_gap =
                    report.worst_periodicity_gap.max(result.periodicity_gap);
                report.worst_derivative_gap =
                    report.worst_derivative_gap.max(result.derivative_gap);
                report.worst_mean_gap = report.worst_mean_gap.max(result.mean_gap);
                if !result.passed {
                    report.failures.push(RowFailure {
                        row: index + 1,
                        xi: row.xi,
                        detail: format!(
                            "gaps: periodicity {:.3e}, derivative {:.3e}, mean {:.3e}",
                            result.periodicity_gap, result.derivative_gap, result.mean_gap
                        ),
                    });
                }
            }
            Err(err) => report.failures.push(RowFailure {
                row: index + 1,
                xi: row.xi,
                detail: err.to_string(),
            }),
        }
    }

    ensure_dir(out_dir)?;
    write_json(&config.report_path(out_dir), &report)?;
    if report.failures.is_empty() {
        if config.output.verbosity >= 1 {
            println!(
                "verified {} rows at tol {:.0e} on {} steps: all passed",
                report.rows, VERIFY_TOL, steps
            );
        }
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} rows failed re-verification (see {})",
            report.failures.len(),
            report.rows,
            config.report_path(out_dir).display()
        )))
    }
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    command: &'static str,
    rows: usize,
    shape: &'a ShapeReport,
}

fn analyze_run(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let csv_path = config.csv_path(out_dir);
    let rows = csv::read(&csv_path)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|row| (row.xi, row.mu)).collect();
    let shape =
        shape_report_points(&points).map_err(|err| CliError::Verification(err.to_string()))?;

    ensure_dir(out_dir)?;
    write_json(
        &config.report_path(out_dir),
        &AnalyzeReport {
            command: "analyze",
            rows: rows.len(),
            shape: &shape,
        },
    )?;
    if config.output.verbosity >= 1 {
        println!("classification: {}", class_name(&shape));
    }
    Ok(())
}

fn class_name(shape: &ShapeReport) -> String {
    match serde_json::to_value(&shape.classification) {
        Ok(serde_json::Value::String(name)) => name,
        _ => format!("{:?}", shape.classification),
    }
}

fn reproduce_run(figure: &str, args: &CommonArgs) -> Result<(), CliError> {
    if args.config.is_some() {
        return Err(CliError::Config(
            "reproduce uses a built-in configuration; drop --config".into(),
        ));
    }
    let mut config = config::builtin(figure).ok_or_else(|| {
        CliError::Config(format!(
            "unknown figure '{figure}' (expected fig1, fig2 or fig3)"
        ))
    })?;
    apply_overrides(&mut config, args)?;

    // Materialize the effective configuration so the run can be repeated
    // or fed back into `verify` / `analyze`.
    ensure_dir(&args.out_dir)?;
    let config_path = args.out_dir.join(format!("{figure}-config.json"));
    write_json(&config_path, &config)?;
    if config.output.verbosity >= 1 {
        println!("materialized config: {}", config_path.display());
    }
    trace_run(&config, &args.out_dir)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|err| CliError::Config(format!("cannot create {}: {err}", dir.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Config(format!("cannot serialize report: {err}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|err| CliError::Config(format!("cannot write {}: {err}", path.display())))
}
