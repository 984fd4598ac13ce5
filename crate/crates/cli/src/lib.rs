//! Command-line front end: configuration loading, single-shot evaluation,
//! parameter sweeps, power bounds and oracle verification.

pub mod config;
pub mod report;
pub mod sweep;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use trackperf::h2opt::{ErrorKind, H2Error};
use trackperf::oracle::QuadOptions;

pub use config::{set_path, Config};
pub use sweep::{AxisSpec, Scale, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_GAP: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STRUCTURAL: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Largest relative Ritz gap `verify` accepts.
pub const VERIFY_GAP_LIMIT: f64 = 0.02;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(H2Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(e) => match e.kind() {
                ErrorKind::Invalid => EXIT_CONFIG,
                ErrorKind::Structural => EXIT_STRUCTURAL,
                ErrorKind::Numeric => EXIT_NUMERIC,
            },
        }
    }
}

/// What a command writes and how the process exits.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub code: i32,
}

#[derive(Debug, Parser)]
#[command(name = "trackperf", version, about = "Optimal tracking performance over noisy channels")]
pub struct Cli {
    /// Relative quadrature tolerance (overrides [solver] quad_tol).
    #[arg(long, global = true, value_name = "REL")]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal performance breakdown, controller and factorization diagnostics as JSON.
    Perf { config: PathBuf },
    /// CSV of selected breakdown fields over a 1- or 2-axis grid.
    Sweep {
        config: PathBuf,
        /// `<path>:<from>:<to>:<steps>[:log]`; give once or twice.
        #[arg(long = "axis", required = true, value_name = "SPEC")]
        axes: Vec<String>,
        /// Comma-separated breakdown fields (default: all).
        #[arg(long, value_delimiter = ',')]
        fields: Option<Vec<String>>,
    },
    /// Minimum channel input-power bounds and feasibility as JSON.
    Bounds { config: PathBuf },
    /// Closed form against Ritz minimization and per-term quadrature, as JSON.
    Verify {
        config: PathBuf,
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Basis pole of the Ritz lags (default: characteristic frequency of the problem).
        #[arg(long)]
        basis_pole: Option<f64>,
    },
}

/// Quadrature options from the command line, the config, or the default, in that order.
pub fn quad_options(cli_tol: Option<f64>, cfg: &Config) -> Result<QuadOptions, CliError> {
    let Some(tol) = cli_tol.or(cfg.solver.quad_tol) else {
        return Ok(QuadOptions::default());
    };
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(CliError::Config(format!("quadrature tolerance must lie in (0, 1), got {tol}")));
    }
    Ok(QuadOptions::with_rel_tol(tol))
}

fn failure(e: CliError) -> Output {
    Output {
        stdout: String::new(),
        stderr: vec![format!("error: {e}")],
        code: e.exit_code(),
    }
}

pub fn run(cli: &Cli) -> Output {
    let result = match &cli.command {
        Command::Perf { config } => report::cmd_perf(config, cli.tol),
        Command::Bounds { config } => report::cmd_bounds(config, cli.tol),
        Command::Verify { config, order, basis_pole } => {
            report::cmd_verify(config, cli.tol, *order, *basis_pole)
        }
        Command::Sweep { config, axes, fields } => SweepSpec::parse(axes, fields.as_deref())
            .and_then(|spec| sweep::cmd_sweep(config, cli.tol, &spec)),
    };
    result.unwrap_or_else(failure)
}
