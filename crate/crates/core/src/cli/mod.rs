//! The `pdm` command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error, 3 complex
//! ordering rejected, 4 verification failure, 5 I/O error.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{parse_range, SweepValue, DEFAULT_GRID_POINTS};
pub use config::{parse_config, parse_grid, parse_ordering, OrderingChoice, RunArgs, RunConfig};
pub use output::{json_document, num, parse_csv, Format, Separator, Table};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPLEX: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "pdm", version, about = "Position-dependent-mass Hamiltonians: orderings, exact spectra, SUSY partners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classification table of the preset orderings.
    Orderings(RunArgs),
    /// Analytic spectrum by both routes, optionally with the numeric solve.
    Spectrum(RunArgs),
    /// Superpotential, partner potentials and ground state on a grid.
    Susy(RunArgs),
    /// Run the invariant suite.
    Verify(RunArgs),
    /// Analytic levels over a parameter range.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to vary; `a`, `alpha`, `gamma` re-derive beta = -1 - alpha - gamma.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// `start:end:count`, both ends included.
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "V0")]
    V0,
    #[value(name = "c")]
    C,
    #[value(name = "m0")]
    M0,
    #[value(name = "a")]
    A,
    #[value(name = "alpha")]
    Alpha,
    #[value(name = "gamma")]
    Gamma,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::V0 => "V0",
            SweepParam::C => "c",
            SweepParam::M0 => "m0",
            SweepParam::A => "a",
            SweepParam::Alpha => "alpha",
            SweepParam::Gamma => "gamma",
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ComplexOrdering { .. } => EXIT_COMPLEX,
        Error::Io { .. } => EXIT_IO,
        Error::ToleranceNotReached { .. } | Error::SingularShift { .. } => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Orderings(a) => RunConfig::from_args(a).and_then(|c| commands::orderings(&c, stdout)),
        Command::Spectrum(a) => RunConfig::from_args(a).and_then(|c| commands::spectrum(&c, stdout)),
        Command::Susy(a) => RunConfig::from_args(a).and_then(|c| commands::susy(&c, stdout)),
        Command::Verify(a) => RunConfig::from_args(a).and_then(|c| commands::verify(&c, stdout)),
        Command::Sweep(s) => RunConfig::from_args(&s.run).and_then(|c| commands::sweep(&c, s.param, &s.range, stdout)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "pdm: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary: real process arguments and standard streams.
pub fn main() -> i32 {
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
