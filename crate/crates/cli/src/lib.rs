//! Command-line front end for the `sasaki-herm-core` engine.
//!
//! Every command builds structures from the configuration, evaluates a list
//! of checks and writes a JSON or CSV report. The exit status is 0 when every
//! check passes, [`EXIT_CHECK_FAILED`] otherwise, [`EXIT_USAGE`] for invalid
//! arguments and [`EXIT_IO`] when the report cannot be written.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Command, ConfigError, FactorSpec, Format, GridSpec, RunConfig, ScanCheck};
use report::Report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sasaki-herm",
    version,
    about = "Verify the two-parameter complex structures on a product of Sasakian factors"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Structure and curvature identities of the first factor (`--p`, `--factor`).
    VerifyFactor(RunArgs),
    /// Hermitian, integrability and not-Kähler checks of the product.
    VerifyProduct(RunArgs),
    /// Einstein verdict for the product, condition by condition.
    Einstein(RunArgs),
    /// One check over a grid of `a` and `b` values.
    Scan(RunArgs),
    /// Closed forms against the finite-difference chart oracle.
    OracleCompare(RunArgs),
    /// The Einstein example on S^{2p+1} x S^{2q+1}.
    Example(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    Einstein,
    Integrability,
    NotKahler,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// First factor has dimension 2p + 1.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Second factor has dimension 2q + 1.
    #[arg(long, default_value_t = 1)]
    q: usize,
    /// Value of a, or start:stop:step for scan.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    a: String,
    /// Value of b (nonzero), or start:stop:step for scan.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    b: String,
    /// round, space-form:<c> or deformed:<alpha>.
    #[arg(long, default_value = "round")]
    factor: String,
    #[arg(long = "factor-prime", default_value = "round")]
    factor_prime: String,
    #[arg(long = "tol-algebraic", default_value_t = 1e-12)]
    tol_algebraic: f64,
    #[arg(long = "tol-fd", default_value_t = 1e-4)]
    tol_fd: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for chart sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of chart sample points for finite-difference checks.
    #[arg(long, default_value_t = 3)]
    samples: usize,
    /// Check evaluated on each scan cell.
    #[arg(long, value_enum, default_value = "einstein")]
    check: CheckArg,
    /// Record the wall time in the report (otherwise 0, keeping reports
    /// byte-identical across runs).
    #[arg(long)]
    timing: bool,
}

fn into_config(sub: Sub) -> Result<RunConfig, ConfigError> {
    let (command, args) = match sub {
        Sub::VerifyFactor(a) => (Command::VerifyFactor, a),
        Sub::VerifyProduct(a) => (Command::VerifyProduct, a),
        Sub::Einstein(a) => (Command::Einstein, a),
        Sub::Scan(a) => (Command::Scan, a),
        Sub::OracleCompare(a) => (Command::OracleCompare, a),
        Sub::Example(a) => (Command::Example, a),
    };
    let cfg = RunConfig {
        command,
        p: args.p,
        q: args.q,
        a: args.a.parse::<GridSpec>()?,
        b: args.b.parse::<GridSpec>()?,
        factor: args.factor.parse::<FactorSpec>()?,
        factor_prime: args.factor_prime.parse::<FactorSpec>()?,
        tol_algebraic: args.tol_algebraic,
        tol_fd: args.tol_fd,
        seed: args.seed,
        samples: args.samples,
        check: match args.check {
            CheckArg::Einstein => ScanCheck::Einstein,
            CheckArg::Integrability => ScanCheck::Integrability,
            CheckArg::NotKahler => ScanCheck::NotKahler,
        },
        format: match args.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
        out: args.out,
        timing: args.timing,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parses the arguments into a validated configuration.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, anyhow::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(into_config(cli.command)?)
}

/// Runs a configuration and assembles its report.
pub fn execute(cfg: RunConfig) -> Report {
    let start = Instant::now();
    let (checks, quantities) = run::run(&cfg);
    let elapsed = start.elapsed();
    eprintln!("wall time: {} ms", elapsed.as_millis());
    let wall_time_ms = if cfg.timing { elapsed.as_millis() as u64 } else { 0 };
    Report::new(cfg, checks, quantities, wall_time_ms)
}

fn write_report(report: &Report) -> anyhow::Result<()> {
    let text = match report.config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &report.config.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing report to {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .context("writing report to stdout")
        }
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match into_config(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = execute(cfg);
    if let Err(e) = write_report(&report) {
        eprintln!("error: {e:#}");
        return EXIT_IO;
    }
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
