//! Command-line surface for the `bd-spectra` binary.
//!
//! Four subcommands share one argument set: `analyze` tabulates eigenvalues,
//! certified derivatives, and bounds on a parameter grid; `scan` locates
//! maximal subintervals where monotonicity criteria hold; `verify` re-checks
//! every certified invariant and fails loudly; `trace` dumps the per-index
//! membership witnesses behind criterion verdicts.
//!
//! Exit codes: 0 success, 1 certified-property failure, 2 malformed input
//! (files, expressions, criterion tags), 3 validity violation (positivity,
//! probability range, evaluation domain).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::monotonicity::{Criterion, ModelKind};
use crate::problem::{load_problem, ProblemSpec};
use crate::report;

/// Top-level argument parser.
#[derive(Debug, Parser)]
#[command(
    name = "bd-spectra",
    version,
    about = "Spectra, eigenvalue derivatives, and monotonicity intervals for \
             time-dependent birth-death and random-walk tridiagonal matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// The four subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate eigenvalues, certified derivatives, and bounds on a grid.
    Analyze(RunArgs),
    /// Find maximal parameter intervals where monotonicity criteria hold.
    Scan(RunArgs),
    /// Re-check every certified invariant on the problem; exit 1 on failure.
    Verify(RunArgs),
    /// Dump per-index membership witnesses per criterion and grid point.
    Trace(RunArgs),
}

/// Arguments shared by all subcommands.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Problem description file (TOML).
    #[arg(long)]
    pub problem: PathBuf,

    /// Number of interior grid points.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,

    /// Comma-separated criterion tags (defaults to all applicable ones);
    /// both the arrow spelling (B_MAX↑) and the ASCII alias (B_MAX_UP) work.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<String>,

    /// Write output to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Output rendering choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Machine-readable CSV with a header row.
    Csv,
    /// Indented human-readable report.
    Report,
}

/// Map an error to the documented process exit code.
#[must_use]
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Input(_) => 2,
        Error::Domain { .. }
        | Error::Positivity { .. }
        | Error::Range { .. }
        | Error::OddOrder { .. } => 3,
        Error::DegenerateOffDiagonal { .. }
        | Error::ResidualTooLarge { .. }
        | Error::AllZero
        | Error::FormMismatch { .. }
        | Error::Convergence { .. } => 1,
    }
}

/// Resolve requested criterion tags against the problem kind; an empty
/// request means every applicable criterion in canonical order.
pub fn resolve_criteria(problem: &ProblemSpec, requested: &[String]) -> Result<Vec<Criterion>> {
    let kind = match problem {
        ProblemSpec::BirthDeath(_) => ModelKind::BirthDeath,
        ProblemSpec::RandomWalk(_) => ModelKind::RandomWalk,
    };
    if requested.is_empty() {
        return Ok(Criterion::for_kind(kind));
    }
    let mut criteria = Vec::with_capacity(requested.len());
    for name in requested {
        let criterion = Criterion::parse(name)?;
        if criterion.model_kind() != kind {
            return Err(Error::Input(format!(
                "criterion {} is not defined for {} problems",
                criterion.tag(),
                problem.kind()
            )));
        }
        criteria.push(criterion);
    }
    Ok(criteria)
}

fn emit(args: &RunArgs, text: &str) -> Result<()> {
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Execute a parsed command, returning the process exit code.
pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Analyze(args) => {
            let problem = load_problem(&args.problem)?;
            let table = report::analyze(&problem, args.grid)?;
            let text = match args.format {
                Format::Csv => report::render_analyze_csv(&table),
                Format::Report => report::render_analyze_report(&table),
            };
            emit(args, &text)?;
            Ok(0)
        }
        Command::Scan(args) => {
            let problem = load_problem(&args.problem)?;
            let criteria = resolve_criteria(&problem, &args.criteria)?;
            let intervals = report::scan_all(&problem, &criteria, args.grid)?;
            let text = match args.format {
                Format::Csv => report::render_scan_csv(&intervals),
                Format::Report => report::render_scan_report(&intervals),
            };
            emit(args, &text)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let problem = load_problem(&args.problem)?;
            let outcome = report::verify(&problem, args.grid)?;
            let text = match args.format {
                Format::Csv => report::render_verify_csv(&outcome),
                Format::Report => report::render_verify_report(&outcome),
            };
            emit(args, &text)?;
            Ok(if outcome.all_pass() { 0 } else { 1 })
        }
        Command::Trace(args) => {
            let problem = load_problem(&args.problem)?;
            let criteria = resolve_criteria(&problem, &args.criteria)?;
            let verdicts = report::trace(&problem, &criteria, args.grid)?;
            let text = match args.format {
                Format::Csv => report::render_trace_csv(&verdicts),
                Format::Report => report::render_trace_report(&verdicts),
            };
            emit(args, &text)?;
            Ok(0)
        }
    }
}

/// Parse the process arguments, run, and translate errors to exit codes.
#[must_use]
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            exit_code(&error)
        }
    }
}
