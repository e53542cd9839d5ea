//! `leakage`: the exact leakage chain for one message at one observer,
//! optionally cross-checked through the brute-force oracle engine.

use std::path::Path;

use clap::Parser;
use secdof_core::{leakage_exact, leakage_oracle, LeakageReport, Scheme, VERSION};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::output::{write_json, CliError};

const DEFAULT_ORACLE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Parser)]
pub struct Args {
    /// Number of users.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Exponent range of the dimension sets.
    #[arg(long)]
    pub m: Option<u32>,
    /// PAM range; symbols are drawn from [-Q, Q].
    #[arg(long = "Q")]
    pub q: Option<u32>,
    /// Observer index; 0 is the external eavesdropper.
    #[arg(long)]
    pub observer: Option<usize>,
    /// Message index whose leakage is evaluated.
    #[arg(long)]
    pub message: Option<usize>,
    /// Entropy engine, `exact` or `oracle`.
    #[arg(long)]
    pub engine: Option<String>,
    /// Include the external eavesdropper in the system.
    #[arg(long)]
    pub eavesdropper: Option<bool>,
}

#[derive(Serialize)]
struct Resolved {
    k: usize,
    m: u32,
    q: u32,
    message: usize,
    observer: usize,
    eavesdropper: bool,
    engine: String,
    oracle_budget: Option<u128>,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    command: &'static str,
    config: Resolved,
    report: LeakageReport,
}

pub fn run(args: &Args, file: &FileConfig, out_dir: &Path) -> Result<String, CliError> {
    let k = require(args.k.or(file.k), "K")?;
    let m = require(args.m.or(file.m), "m")?;
    let q = require(args.q.or(file.q), "Q")?;
    let message = require(args.message.or(file.message), "message")?;
    let observer = require(args.observer.or(file.observer), "observer")?;
    let eavesdropper = args.eavesdropper.or(file.eavesdropper).unwrap_or(true);
    let engine = args
        .engine
        .clone()
        .or_else(|| file.engine.clone())
        .unwrap_or_else(|| "exact".into());

    let scheme = Scheme::new(k, m, eavesdropper)?;
    let (report, oracle_budget) = match engine.as_str() {
        "exact" => (leakage_exact(&scheme, message, observer, q)?, None),
        "oracle" => {
            let budget = file.oracle_budget.unwrap_or(DEFAULT_ORACLE_BUDGET);
            (
                leakage_oracle(&scheme, message, observer, q, budget)?,
                Some(budget),
            )
        }
        other => {
            return Err(CliError::Invalid(format!(
                "engine must be `exact` or `oracle`, got `{other}`"
            )))
        }
    };

    let report = Report {
        version: VERSION,
        command: "leakage",
        config: Resolved {
            k,
            m,
            q,
            message,
            observer,
            eavesdropper,
            engine,
            oracle_budget,
        },
        report,
    };
    write_json(out_dir, "leakage.json", &report)
}
