//! `secdof`: deterministic reports for the alignment scheme.
//!
//! Every subcommand resolves its parameters from command-line flags layered
//! over an optional JSON config document, runs one experiment, writes the
//! report files into the output directory and prints the JSON report to
//! stdout. Identical config and seed produce byte-identical outputs.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{load_file_config, resolve_out_dir};
use crate::output::CliError;

#[derive(Parser)]
#[command(name = "secdof", version, about = "Alignment scheme reports", max_term_width = 100)]
struct Cli {
    /// JSON config document; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Report directory; falls back to SECDOF_OUT_DIR, then the working
    /// directory.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension-set cardinalities and separability verdicts (dims.json).
    Dims(commands::dims::Args),
    /// Exact leakage chain for one message and observer (leakage.json).
    Leakage(commands::leakage::Args),
    /// Achievable rates against the converse over parameter grids
    /// (rates.csv, rates.json).
    Rates(commands::rates::Args),
    /// Monte Carlo nearest-point decoding error rates (simulate.csv,
    /// simulate.json).
    Simulate(commands::simulate::Args),
    /// Single-stream PAM reliability sweep (sweep.csv, sweep.json).
    Sweep(commands::sweep::Args),
}

fn run(cli: Cli) -> Result<String, CliError> {
    let file = load_file_config(cli.config.as_deref())?;
    let out_dir = resolve_out_dir(cli.out_dir);
    match cli.command {
        Command::Dims(args) => commands::dims::run(&args, &file, &out_dir),
        Command::Leakage(args) => commands::leakage::run(&args, &file, &out_dir),
        Command::Rates(args) => commands::rates::run(&args, &file, &out_dir),
        Command::Simulate(args) => commands::simulate::run(&args, &file, &out_dir),
        Command::Sweep(args) => commands::sweep::run(&args, &file, &out_dir),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => print!("{report}"),
        Err(err) => {
            let doc = serde_json::json!({
                "error": { "kind": err.kind(), "message": err.to_string() }
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("static shape"));
            std::process::exit(2);
        }
    }
}
