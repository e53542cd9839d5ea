//! `sweep`: single-stream PAM reliability against power, with the fitted
//! rate slope that desk-scale runs are compared against.

use std::path::Path;

use clap::Parser;
use secdof_core::{p2p_pam_sweep, p2p_rate_slope, P2pConfig, P2pPoint, VERSION};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::output::{sig12, write_csv, write_json, CliError};

const DEFAULT_NOISE_STD: f64 = 1.0;

#[derive(Debug, Parser)]
pub struct Args {
    /// Resolution margin in (0, 1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Transmit powers, comma separated.
    #[arg(long = "P-grid", value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    /// Monte Carlo trials per power point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Seed all randomness derives from. Required.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Noise standard deviation.
    #[arg(long)]
    pub noise_std: Option<f64>,
}

#[derive(Serialize)]
struct Resolved {
    delta: f64,
    p_grid: Vec<f64>,
    trials: u64,
    seed: u64,
    noise_std: f64,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    command: &'static str,
    config: Resolved,
    points: Vec<P2pPoint>,
    /// Fitted slope of reliable rate against (1/2) log2 P.
    rate_slope: f64,
}

pub fn run(args: &Args, file: &FileConfig, out_dir: &Path) -> Result<String, CliError> {
    let delta = require(args.delta.or(file.delta), "delta")?;
    let p_grid = require(args.p_grid.clone().or_else(|| file.p_grid.clone()), "P-grid")?;
    let trials = require(args.trials.or(file.trials), "trials")?;
    let seed = require(args.seed.or(file.seed), "seed")?;
    let noise_std = args
        .noise_std
        .or(file.noise_std)
        .unwrap_or(DEFAULT_NOISE_STD);

    let cfg = P2pConfig {
        delta,
        power_grid: p_grid.clone(),
        trials,
        seed,
        noise_std,
    };
    let points = p2p_pam_sweep(&cfg)?;
    let rate_slope = p2p_rate_slope(&points)?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                sig12(p.power),
                p.q.to_string(),
                sig12(p.spacing),
                p.trials.to_string(),
                p.symbol_errors.to_string(),
                sig12(p.pe_estimate),
                sig12(p.rate_bits),
            ]
        })
        .collect();
    write_csv(
        out_dir,
        "sweep.csv",
        &["P", "Q", "a", "trials", "symbol_errors", "pe_estimate", "rate_bits"],
        &rows,
    )?;

    let report = Report {
        version: VERSION,
        command: "sweep",
        config: Resolved {
            delta,
            p_grid,
            trials,
            seed,
            noise_std,
        },
        points,
        rate_slope,
    };
    write_json(out_dir, "sweep.json", &report)
}
