//! Seeded, reproducible command-line runs over `shapedrm-core`.
//!
//! Every run produces a [`ResultRecord`]: the configuration echo, the
//! payload, and the RNG provenance. Exit codes are 0 on success, 2 for an
//! invalid configuration and 3 for a numerical failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

use std::io::Write;
use std::time::Instant;

use shapedrm_core::{CombinatoricsError, LawError, SpectraError};
use thiserror::Error;

pub use config::{Cli, Command, Format, RunConfig};
pub use report::{Provenance, ResultRecord, Results};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<LawError> for CliError {
    fn from(e: LawError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<CombinatoricsError> for CliError {
    fn from(e: CombinatoricsError) -> Self {
        match e {
            CombinatoricsError::ResourceLimit { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Validates `config` and executes its subcommand. Nothing is written.
pub fn run(config: &RunConfig) -> Result<ResultRecord, CliError> {
    config.validate()?;
    let start = Instant::now();
    let threads = config.threads;
    let (results, substreams) = match &config.command {
        Command::Shape(a) => (Results::Shape(commands::shape(a)?), vec![]),
        Command::Moments(a) => (Results::Moments(commands::moments(a)?), vec![]),
        Command::Trees(a) => (Results::Trees(commands::trees(a)?), vec![]),
        Command::Law(a) => (Results::Law(commands::law(a)?), vec![]),
        Command::Simulate(a) => {
            let (r, s) = commands::simulate(a, threads)?;
            (Results::Simulate(r), s)
        }
        Command::SampleLaw(a) => {
            let (r, s) = commands::sample_law(a, threads)?;
            (Results::SampleLaw(r), s)
        }
        Command::Triangular(a) => {
            let (r, s) = commands::triangular(a, threads)?;
            (Results::Triangular(r), s)
        }
    };
    let seed = config.command.seed();
    Ok(ResultRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        results,
        provenance: Provenance {
            seed,
            substreams,
            rng: seed.map(|_| "chacha8".to_string()),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Renders `record` in the configured format.
pub fn render(record: &ResultRecord) -> Result<String, CliError> {
    match record.config.format {
        Format::Json => serde_json::to_string_pretty(record)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Output(e.to_string())),
        Format::Csv => output::csv(&record.results).ok_or_else(|| {
            CliError::Config(format!(
                "{} has no CSV output",
                record.config.command.name()
            ))
        }),
        Format::Text => Ok(output::text(record)),
    }
}

/// Writes the rendered record to `--out`, or to `stdout` when there is none.
/// With `--out`, a text summary goes to `stdout` as well.
pub fn emit(record: &ResultRecord, stdout: &mut dyn Write) -> Result<(), CliError> {
    let body = render(record)?;
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    match &record.config.out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            stdout
                .write_all(output::text(record).as_bytes())
                .map_err(io)
        }
        None => stdout.write_all(body.as_bytes()).map_err(io),
    }
}
