//! `rates`: the achievable-rate formula and converse accounting over a grid
//! of alignment depths and powers.

use std::path::Path;

use clap::Parser;
use secdof_core::{achievable_rate_formula, RateReport, VERSION};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::output::{sig12, write_csv, write_json, CliError};

#[derive(Debug, Parser)]
pub struct Args {
    /// Number of users.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Alignment depths, comma separated.
    #[arg(long = "m-grid", value_delimiter = ',')]
    pub m_grid: Option<Vec<u64>>,
    /// Resolution margin in (0, 1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Transmit powers, comma separated.
    #[arg(long = "P-grid", value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Resolved {
    k: usize,
    m_grid: Vec<u64>,
    delta: f64,
    p_grid: Vec<f64>,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    command: &'static str,
    config: Resolved,
    points: Vec<RateReport>,
}

pub fn run(args: &Args, file: &FileConfig, out_dir: &Path) -> Result<String, CliError> {
    let k = require(args.k.or(file.k), "K")?;
    let m_grid = require(args.m_grid.clone().or_else(|| file.m_grid.clone()), "m-grid")?;
    let delta = require(args.delta.or(file.delta), "delta")?;
    let p_grid = require(args.p_grid.clone().or_else(|| file.p_grid.clone()), "P-grid")?;
    if m_grid.is_empty() || p_grid.is_empty() {
        return Err(CliError::Invalid("m-grid and P-grid must be nonempty".into()));
    }

    let mut points = Vec::with_capacity(m_grid.len() * p_grid.len());
    for &m in &m_grid {
        for &power in &p_grid {
            points.push(achievable_rate_formula(k, m, delta, power)?);
        }
    }

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                p.k.to_string(),
                p.m.to_string(),
                sig12(p.delta),
                sig12(p.power),
                sig12(p.per_user_rate_bits),
                sig12(p.sum_rate_bits),
                sig12(p.dof_coefficient),
                sig12(p.converse_dof),
            ]
        })
        .collect();
    write_csv(
        out_dir,
        "rates.csv",
        &[
            "K",
            "m",
            "delta",
            "P",
            "per_user_rate",
            "sum_rate",
            "dof_coeff",
            "converse_dof",
        ],
        &rows,
    )?;

    let report = Report {
        version: VERSION,
        command: "rates",
        config: Resolved {
            k,
            m_grid,
            delta,
            p_grid,
        },
        points,
    };
    write_json(out_dir, "rates.json", &report)
}
