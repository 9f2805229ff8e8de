//! `ngrams`: ingest text corpora, compute n-gram statistics and compare
//! methods by their shuffle counters.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

mod compare;
mod ingest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ngram_core::{Engine, EngineConfig, Method, Sigma};

#[derive(Parser, Debug)]
#[command(name = "ngrams", version, about = "Frequent n-gram statistics on a local MapReduce engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a directory of UTF-8 text files (one document each) into a corpus directory.
    Ingest(ingest::IngestArgs),
    /// Compute n-gram statistics with one method.
    Run(run::RunArgs),
    /// Run every method over a grid of tau and sigma values and print a CSV of shuffle counters.
    Compare(compare::CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn enabled(self) -> bool {
        self == Switch::On
    }
}

/// Engine options shared by `run` and `compare`.
#[derive(Args, Debug)]
struct EngineArgs {
    /// Worker threads for map tasks and reduce partitions [default: available cores].
    #[arg(long, env = "NGRAM_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    /// Number of reduce partitions.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    reducers: u32,

    /// Map-side combiner.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    combiner: Switch,

    /// Length of the n-grams indexed before Apriori-Index switches to joins (apriori-index only).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    k: Option<u32>,
}

impl EngineArgs {
    fn engine(&self) -> anyhow::Result<Engine> {
        let mut config = EngineConfig::default();
        if let Some(workers) = self.workers {
            config.workers = workers as usize;
        }
        Ok(Engine::new(config)?)
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: ngram_core::Error| e.to_string())
}

fn parse_sigma(s: &str) -> Result<Sigma, String> {
    s.parse().map_err(|e: ngram_core::Error| e.to_string())
}

/// Reports a usage error in clap's format and returns exit code 1.
fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    let mut cmd = <Cli as clap::CommandFactory>::command();
    cmd.error(ErrorKind::ArgumentConflict, message).print().ok();
    ExitCode::from(1)
}

/// Outcome of a subcommand.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<ngram_core::Error> for Failure {
    fn from(e: ngram_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn write_output(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    use std::io::Write;
    match path {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            e.print().ok();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => ingest::cmd_ingest(&args),
        Command::Run(args) => run::cmd_run(&args),
        Command::Compare(args) => compare::cmd_compare(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => usage_error(message),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
