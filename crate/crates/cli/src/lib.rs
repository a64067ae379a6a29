//! Library form of the `vqasvm` command line: argument parsing, config-file
//! merging, and subcommand dispatch. Each subcommand returns its stdout
//! report as JSON.

pub mod args;
mod commands;
mod config;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

pub use args::{Cli, Command};
pub use commands::{PREDICTIONS_SCHEMA, SCALING_SCHEMA, SCHEMA_VERSION, TIMING_SCHEMA, TRACE_SCHEMA};

fn first_line(e: clap::Error) -> anyhow::Error {
    anyhow!(e.render().to_string().lines().next().unwrap_or("").to_string())
}

/// Parses `argv` (program name first), applying `--config` defaults. Help and
/// version requests print and exit the process.
pub fn parse(argv: &[String]) -> Result<Cli> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return Err(first_line(e)),
    };
    match &cli.config {
        None => Ok(cli),
        Some(path) => Cli::try_parse_from(config::merge_config(argv, path)?).map_err(first_line),
    }
}

/// Runs a parsed command, on a dedicated pool when `--threads` is given.
pub fn execute(cli: &Cli) -> Result<Value> {
    let dispatch = || match &cli.command {
        Command::GenerateToy(a) => commands::generate_toy(a),
        Command::PrepareCsv(a) => commands::prepare_csv(a),
        Command::Train(a) => commands::train(a),
        Command::Classify(a) => commands::classify(a),
        Command::ReferenceSolve(a) => commands::reference_solve(a),
        Command::ScalingBench(a) => commands::scaling_bench(a),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("configuring thread pool")?
            .install(dispatch),
        None => dispatch(),
    }
}

pub fn run(argv: &[String]) -> Result<Value> {
    execute(&parse(argv)?)
}
