//! `dims`: cardinalities by enumeration and closed form, plus set-level
//! separability verdicts for every receiver.

use std::path::Path;

use clap::Parser;
use secdof_core::{
    build_t, cardinality_formulas, check_separability, intersection_count,
    receiver_dimension_budget, CardinalityFormulas, SeparabilityReport, VERSION,
};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::output::{write_json, CliError};

#[derive(Debug, Parser)]
pub struct Args {
    /// Number of users.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Exponent range of the dimension sets.
    #[arg(long)]
    pub m: Option<u32>,
    /// Include the external eavesdropper's taps in the generator set.
    #[arg(long)]
    pub eavesdropper: Option<bool>,
}

#[derive(Serialize)]
struct Resolved {
    k: usize,
    m: u32,
    eavesdropper: bool,
}

#[derive(Serialize)]
struct Enumerated {
    /// |T_1| by direct enumeration.
    t_cardinality: u64,
    /// Alignment overlap of transmitter 1's block on T_2 with transmitter
    /// 2's jamming, at the eavesdropper when present, otherwise at
    /// receiver 3. Absent when no third observer exists.
    pair_overlap: Option<u64>,
    /// Occupied-dimension ceiling at receiver 1 by set merge.
    receiver_budget: u64,
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    command: &'static str,
    config: Resolved,
    closed_form: CardinalityFormulas,
    enumerated: Enumerated,
    separability: Vec<SeparabilityReport>,
    all_separable: bool,
}

pub fn run(args: &Args, file: &FileConfig, out_dir: &Path) -> Result<String, CliError> {
    let k = require(args.k.or(file.k), "K")?;
    let m = require(args.m.or(file.m), "m")?;
    let eavesdropper = args.eavesdropper.or(file.eavesdropper).unwrap_or(true);

    let closed_form = cardinality_formulas(k, m, eavesdropper)?;
    let t_cardinality = build_t(k, m, 1, eavesdropper)?.len() as u64;
    let overlap_observer = if eavesdropper {
        Some(0)
    } else if k >= 3 {
        Some(3)
    } else {
        None
    };
    let pair_overlap = overlap_observer
        .map(|j| intersection_count(k, m, 1, 2, j))
        .transpose()?;
    let receiver_budget = receiver_dimension_budget(k, m, 1, eavesdropper)?;

    let separability: Vec<SeparabilityReport> = (1..=k)
        .map(|receiver| check_separability(k, m, receiver, eavesdropper))
        .collect::<Result<_, _>>()?;
    let all_separable = separability.iter().all(SeparabilityReport::all_ok);

    let report = Report {
        version: VERSION,
        command: "dims",
        config: Resolved { k, m, eavesdropper },
        closed_form,
        enumerated: Enumerated {
            t_cardinality,
            pair_overlap,
            receiver_budget,
        },
        separability,
        all_separable,
    };
    write_json(out_dir, "dims.json", &report)
}
