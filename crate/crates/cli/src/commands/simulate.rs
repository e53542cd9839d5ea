//! `simulate`: Monte Carlo nearest-point decoding over sampled gains.
//!
//! Gains are drawn from stream 0 of the seed; trial t uses stream t+1, so
//! reports depend only on the resolved config and seed.

use std::collections::BTreeMap;
use std::path::Path;

use clap::Parser;
use secdof_core::{simulate_error_rates, ChannelGains, QMode, SimConfig, SimPoint, VERSION};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::output::{gains_map, sig12, write_csv, write_json, CliError};

const DEFAULT_DECODE_BUDGET: u128 = 10_000_000;
const DEFAULT_DMIN_BUDGET: u128 = 2_000_000;
const DEFAULT_DMIN_PAIRS: u64 = 20_000;
const DEFAULT_NOISE_STD: f64 = 1.0;

#[derive(Debug, Parser)]
pub struct Args {
    /// Number of users.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Exponent range of the dimension sets.
    #[arg(long)]
    pub m: Option<u32>,
    /// Fixed PAM range. Exactly one of Q and delta must be set.
    #[arg(long = "Q")]
    pub q: Option<u32>,
    /// Resolution margin for the power-derived PAM range. Exactly one of Q
    /// and delta must be set.
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
    /// Noise standard deviation at every observer.
    #[arg(long)]
    pub noise_std: Option<f64>,
    /// Include the external eavesdropper in the system.
    #[arg(long)]
    pub eavesdropper: Option<bool>,
}

#[derive(Serialize)]
struct Resolved {
    k: usize,
    m: u32,
    eavesdropper: bool,
    q: Option<u32>,
    delta: Option<f64>,
    p_grid: Vec<f64>,
    trials: u64,
    seed: u64,
    noise_std: f64,
    decode_budget: u128,
    dmin_budget: u128,
    dmin_pairs: u64,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    command: &'static str,
    config: Resolved,
    gains: BTreeMap<String, f64>,
    points: Vec<SimPoint>,
}

pub fn run(args: &Args, file: &FileConfig, out_dir: &Path) -> Result<String, CliError> {
    let k = require(args.k.or(file.k), "K")?;
    let m = require(args.m.or(file.m), "m")?;
    let eavesdropper = args.eavesdropper.or(file.eavesdropper).unwrap_or(true);
    let q = args.q.or(file.q);
    let delta = args.delta.or(file.delta);
    let q_mode = match (q, delta) {
        (Some(q), None) => QMode::Explicit(q),
        (None, Some(delta)) => QMode::Derived { delta },
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid(
                "set exactly one of Q and delta, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Invalid(
                "set exactly one of Q and delta; neither is set".into(),
            ))
        }
    };
    let p_grid = require(args.p_grid.clone().or_else(|| file.p_grid.clone()), "P-grid")?;
    let trials = require(args.trials.or(file.trials), "trials")?;
    let seed = require(args.seed.or(file.seed), "seed")?;
    let noise_std = args
        .noise_std
        .or(file.noise_std)
        .unwrap_or(DEFAULT_NOISE_STD);
    let decode_budget = file.decode_budget.unwrap_or(DEFAULT_DECODE_BUDGET);
    let dmin_budget = file.dmin_budget.unwrap_or(DEFAULT_DMIN_BUDGET);
    let dmin_pairs = file.dmin_pairs.unwrap_or(DEFAULT_DMIN_PAIRS);

    let cfg = SimConfig {
        k,
        m,
        eavesdropper,
        q_mode,
        power_grid: p_grid.clone(),
        trials,
        seed,
        noise_std,
        decode_budget,
        dmin_budget,
        dmin_pairs,
    };
    let gains = ChannelGains::sample(k, eavesdropper, seed)?;
    let points = simulate_error_rates(&cfg, &gains)?;

    let rows: Vec<Vec<String>> = points.iter().map(csv_row).collect();
    write_csv(
        out_dir,
        "simulate.csv",
        &["P", "trials", "symbol_errors", "pe_estimate", "d_min_mode", "d_min"],
        &rows,
    )?;

    let report = Report {
        version: VERSION,
        command: "simulate",
        config: Resolved {
            k,
            m,
            eavesdropper,
            q,
            delta,
            p_grid,
            trials,
            seed,
            noise_std,
            decode_budget,
            dmin_budget,
            dmin_pairs,
        },
        gains: gains_map(&gains),
        points,
    };
    write_json(out_dir, "simulate.json", &report)
}

fn csv_row(p: &SimPoint) -> Vec<String> {
    vec![
        sig12(p.power),
        p.trials.to_string(),
        p.symbol_errors.to_string(),
        sig12(p.pe_estimate),
        if p.d_min_exact { "exact" } else { "sampled" }.to_string(),
        sig12(p.d_min),
    ]
}
