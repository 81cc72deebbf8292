//! `taubessel`: solve the built-in problems with the shifted Bessel Tau
//! method, sweep their parameters, dump operational matrices and function
//! projections, and check the published tables.

mod dump;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use taubessel_core::{ProblemId, TauError};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "taubessel", version, about = "Shifted Bessel polynomial Tau solver")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Basis order N (default: the problem's published order, 10 otherwise).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Left end of the interval, as a decimal or p/q.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Right end of the interval, as a decimal or p/q.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Significant decimal digits of the results.
    #[arg(long, global = true, default_value_t = taubessel_core::basis::DEFAULT_PRECISION_DIGITS)]
    pub precision: u32,
    /// Newton tolerance on the residual merit (default 10^(15 - precision)).
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Newton iteration limit.
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// Starting point: `zero`, `bc` (boundary interpolant) or `file:<path>`
    /// with one coefficient per line.
    #[arg(long, global = true, default_value = "bc")]
    pub init: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (directory for `sweep`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Parallel solves in a sweep (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Problem selection shared by `solve` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemId,
    /// Parameter override `NAME=VALUE`, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Sample points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Number of equispaced sample points including both ends.
    #[arg(long, conflicts_with = "points")]
    pub samples: Option<usize>,
    /// Add first-derivative columns.
    #[arg(long)]
    pub deriv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Y,
    S,
    M,
    Minv,
    P,
    D,
    L,
    I,
    K,
    H,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a built-in problem and tabulate the solution and residual.
    Solve(ProblemArgs),
    /// Solve over a range of one parameter, one file per value plus an index.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `NAME=START:STOP:COUNT` or `NAME=V1,V2,...`.
        #[arg(long)]
        sweep: String,
    },
    /// Print an exact operational matrix as `p/q` entries.
    Matrices {
        #[arg(long, value_enum, default_value_t = Which::M)]
        which: Which,
        /// Print the product matrix of the coefficients in this file (one
        /// rational or decimal per line) instead.
        #[arg(long)]
        product_from: Option<PathBuf>,
    },
    /// Project a function onto the basis.
    Approx {
        /// `sin`, `exp_x2` or `polynomial:c0,c1,...` (monomial coefficients).
        #[arg(long)]
        function: String,
        /// Coefficient file (overrides --out).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check the published tables and the operator properties.
    Verify {
        /// Run only criteria whose id contains this text.
        #[arg(long)]
        filter: Option<String>,
        /// Reference tables as JSON, replacing the built-in ones.
        #[arg(long)]
        references: Option<PathBuf>,
    },
}

fn parse_problem(s: &str) -> Result<ProblemId, String> {
    s.parse().map_err(|e: TauError| e.to_string())
}

/// An invalid configuration, reported with exit code 3.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Shorthand for a [`ConfigError`] wrapped in `anyhow`.
pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

const EXIT_FAILED: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match e.downcast_ref::<TauError>() {
        Some(TauError::NotConverged { .. }) => EXIT_NOT_CONVERGED,
        Some(TauError::InvalidSpec(_) | TauError::TooManyBCs { .. } | TauError::DimensionMismatch(_)) => EXIT_CONFIG,
        _ => EXIT_FAILED,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Solve(p) => run::solve_command(g, p).map(|()| true),
        Command::Sweep { problem, sweep } => run::sweep_command(g, problem, sweep).map(|()| true),
        Command::Matrices { which, product_from } => dump::matrices_command(g, *which, product_from.as_deref()).map(|()| true),
        Command::Approx { function, emit } => dump::approx_command(g, function, emit.as_deref()).map(|()| true),
        Command::Verify { filter, references } => run::verify_command(g, filter.as_deref(), references.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
