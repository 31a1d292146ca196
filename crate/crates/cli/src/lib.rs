//! Batch front end for loglab-core: certification suites, semigroup
//! evolution, Mellin spectra and extremal searches, each writing JSON and CSV
//! reports.
//!
//! Exit codes: 0 success, 1 mathematical violation, 2 usage or config error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod report;

pub use config::{Command, Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] loglab_core::Error),
}

/// What a command concluded about the mathematics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "loglab", version, about = "Numerical laboratory for dilation-generator inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Certify registry entries on random trial functions.
    Verify(CommonArgs),
    /// Evolve a profile under P_t and dump it for each time.
    Evolve(EvolveArgs),
    /// Dump the Mellin spectrum of a field and its diagonalization deviations.
    Spectrum(CommonArgs),
    /// Search trial families for extreme ratios.
    Search(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated registry ids.
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<String>>,
    /// direct, fast-convolution or mellin-multiplier.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated evolution times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    times: Option<Vec<f64>>,
}

fn prepare(args: CommonArgs, times: Option<Vec<f64>>, command: Command) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(args.config.as_deref())?;
    cfg.apply(Overrides {
        seed: args.seed,
        out: args.out,
        ids: args.ids,
        method: args.method,
        times,
    })?;
    cfg.validate(command)?;
    Ok(cfg)
}

fn dispatch(sub: Sub) -> Result<Outcome, CliError> {
    let (command, args, times) = match sub {
        Sub::Verify(a) => (Command::Verify, a, None),
        Sub::Evolve(a) => (Command::Evolve, a.common, a.times),
        Sub::Spectrum(a) => (Command::Spectrum, a, None),
        Sub::Search(a) => (Command::Search, a, None),
    };
    let cfg = prepare(args, times, command)?;
    match command {
        Command::Verify => commands::verify(&cfg),
        Command::Evolve => commands::evolve(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Search => commands::search(&cfg),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
