//! `randfnn`: generate synthetic data, train and evaluate randomized
//! single-hidden-layer networks, and run benchmark, grid-search and
//! sensitivity experiments. Every command is deterministic given `--seed`.

mod commands;
mod data;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;

use settings::Settings;

#[derive(Parser)]
#[command(name = "randfnn", version, about = "Randomized learning of feedforward networks")]
struct Cli {
    /// TOML file with default settings (overridden by RANDFNN_* variables and flags)
    #[arg(long, global = true, env = "RANDFNN_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic train/test pair and its manifest
    GenData(#[command(flatten)] Box<Settings>),
    /// Fit one network and save it with a report
    Train(#[command(flatten)] Box<Settings>),
    /// RMSE of a saved model on a CSV file
    Eval(#[command(flatten)] Box<Settings>),
    /// Cross-validated search over a method's hyperparameters and m
    GridSearch(#[command(flatten)] Box<Settings>),
    /// Repeated trials of several methods on one train/test pair
    Benchmark(#[command(flatten)] Box<Settings>),
    /// Per-node sigmoids of a single-input model on a dense grid
    Decompose(#[command(flatten)] Box<Settings>),
    /// Noise-level sweep over k' or m for D-DM on synthetic data
    Sweep(#[command(flatten)] Box<Settings>),
}

fn run(cli: Cli) -> Result<()> {
    let (name, flags, handler): (&str, Box<Settings>, fn(&Settings) -> Result<()>) = match cli.command {
        Command::GenData(s) => ("gen-data", s, commands::gen_data),
        Command::Train(s) => ("train", s, commands::train),
        Command::Eval(s) => ("eval", s, commands::eval),
        Command::GridSearch(s) => ("grid-search", s, commands::grid_search),
        Command::Benchmark(s) => ("benchmark", s, commands::benchmark_cmd),
        Command::Decompose(s) => ("decompose", s, commands::decompose_cmd),
        Command::Sweep(s) => ("sweep", s, commands::sweep),
    };
    let settings = match &cli.config {
        Some(path) => flags.over(Settings::from_file(path)?)?,
        None => *flags,
    };
    init_threads()?;
    handler(&settings).map_err(|e| e.context(format!("{name} failed")))
}

/// `RANDFNN_THREADS` caps the worker pool; results do not depend on it.
fn init_threads() -> Result<()> {
    if let Ok(text) = std::env::var("RANDFNN_THREADS") {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| settings::argument(format!("RANDFNN_THREADS must be a positive integer, got '{text}'")))?;
        if n == 0 {
            return Err(settings::argument("RANDFNN_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn error_json(kind: &str, message: String) -> String {
    json!({ "schema_version": randfnn::SCHEMA_VERSION, "error": { "kind": kind, "message": message } }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", e.render().to_string()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.chain().find_map(|c| c.downcast_ref::<randfnn::Error>()).map_or("internal", |c| c.kind());
            eprintln!("{}", error_json(kind, format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
