//! PAM constellations, per-transmitter stream layouts, and power scaling.
//!
//! Each transmitter drives every stream with an integer symbol from
//! {-Q, ..., Q} and places it on its block's dimensions. The common scale
//! factor is chosen so the transmit signal respects the power constraint
//! with certainty: gamma normalizes by the worst-case coefficient mass, so
//! |x| <= gamma * sqrt(P) * sum|t| <= sqrt(P) always holds.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelGains;
use crate::dimensions::{block_set_user, transmitter_blocks, BlockKind, DimensionSet};
use crate::{Error, Result};

/// Symmetric integer PAM alphabet {-q, ..., q} with spacing `spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PamConstellation {
    pub spacing: f64,
    pub q: u32,
}

impl PamConstellation {
    pub fn new(spacing: f64, q: u32) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "constellation spacing must be positive and finite, got {spacing}"
            )));
        }
        Ok(Self { spacing, q })
    }

    pub fn alphabet_size(&self) -> u64 {
        2 * self.q as u64 + 1
    }

    pub fn max_amplitude(&self) -> f64 {
        self.spacing * self.q as f64
    }

    /// Second moment of a uniform symbol: spacing^2 * q (q + 1) / 3.
    pub fn average_power(&self) -> f64 {
        let q = self.q as f64;
        self.spacing * self.spacing * q * (q + 1.0) / 3.0
    }

    pub fn contains(&self, symbol: i32) -> bool {
        symbol.unsigned_abs() <= self.q
    }
}

/// One block of streams: the kind and the dimension set it rides.
#[derive(Clone, Debug)]
pub struct LayoutBlock {
    pub kind: BlockKind,
    pub dims: Arc<DimensionSet>,
}

/// Flat stream layout for one transmitter: message blocks in ascending slot
/// order, then the jamming block. Stream index = block offset + member index.
#[derive(Clone, Debug)]
pub struct StreamLayout {
    tx: usize,
    blocks: Vec<LayoutBlock>,
}

impl StreamLayout {
    /// Builds the layout from the shared per-user dimension sets T_1..T_K.
    pub fn from_sets(tx: usize, k: usize, t_sets: &[Arc<DimensionSet>]) -> Result<Self> {
        if t_sets.len() != k {
            return Err(Error::InvalidArgument(format!(
                "expected {k} dimension sets, got {}",
                t_sets.len()
            )));
        }
        crate::channel::validate_user(k, tx)?;
        let blocks = transmitter_blocks(k, tx)
            .into_iter()
            .map(|kind| LayoutBlock {
                kind,
                dims: Arc::clone(&t_sets[block_set_user(tx, kind) - 1]),
            })
            .collect();
        Ok(Self { tx, blocks })
    }

    pub fn tx(&self) -> usize {
        self.tx
    }

    pub fn blocks(&self) -> &[LayoutBlock] {
        &self.blocks
    }

    pub fn stream_count(&self) -> usize {
        self.blocks.iter().map(|b| b.dims.len()).sum()
    }

    /// Flat index range covered by one block.
    pub fn block_span(&self, kind: BlockKind) -> Option<std::ops::Range<usize>> {
        let mut start = 0;
        for b in &self.blocks {
            let end = start + b.dims.len();
            if b.kind == kind {
                return Some(start..end);
            }
            start = end;
        }
        None
    }

    pub fn dims_for(&self, kind: BlockKind) -> Option<&DimensionSet> {
        self.blocks
            .iter()
            .find(|b| b.kind == kind)
            .map(|b| b.dims.as_ref())
    }

    /// Sum of |t| over every dimension this transmitter drives, the
    /// coefficient mass entering the power normalizer.
    pub fn coefficient_abs_sum(&self, gains: &ChannelGains) -> Result<f64> {
        let mut sum = 0.0;
        for b in &self.blocks {
            for v in b.dims.evaluate(gains)? {
                sum += v.abs();
            }
        }
        Ok(sum)
    }
}

/// Integer symbols for one transmitter, flat in layout order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolVector {
    pub tx: usize,
    pub symbols: Vec<i32>,
}

impl SymbolVector {
    /// The slice feeding one block.
    pub fn block(&self, layout: &StreamLayout, kind: BlockKind) -> Option<&[i32]> {
        layout.block_span(kind).map(|r| &self.symbols[r])
    }
}

/// Uniform i.i.d. symbols over {-q, ..., q} for every stream in the layout.
/// Jamming and message symbols share one alphabet by construction.
pub fn random_symbols<R: Rng>(layout: &StreamLayout, q: u32, rng: &mut R) -> SymbolVector {
    let q = q as i32;
    let symbols = (0..layout.stream_count())
        .map(|_| rng.gen_range(-q..=q))
        .collect();
    SymbolVector {
        tx: layout.tx,
        symbols,
    }
}

/// Transmit signal x = spacing * sum_streams symbol * dimension value.
pub fn encode(
    layout: &StreamLayout,
    symbols: &SymbolVector,
    spacing: f64,
    gains: &ChannelGains,
) -> Result<f64> {
    if symbols.tx != layout.tx {
        return Err(Error::InvalidArgument(format!(
            "symbols for transmitter {} fed to layout of transmitter {}",
            symbols.tx, layout.tx
        )));
    }
    if symbols.symbols.len() != layout.stream_count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} symbols, got {}",
            layout.stream_count(),
            symbols.symbols.len()
        )));
    }
    let mut x = 0.0;
    let mut i = 0;
    for b in &layout.blocks {
        for v in b.dims.evaluate(gains)? {
            x += symbols.symbols[i] as f64 * v;
            i += 1;
        }
    }
    Ok(spacing * x)
}

/// The scale actually used on air: PAM range, spacing, and the worst-case
/// normalizer it was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerParams {
    pub q: u32,
    pub spacing: f64,
    pub gamma: f64,
}

impl PowerParams {
    pub fn constellation(&self) -> PamConstellation {
        PamConstellation {
            spacing: self.spacing,
            q: self.q,
        }
    }
}

fn validate_power_delta(power: f64, delta: f64) -> Result<()> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power must be positive and finite, got {power}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie strictly inside (0, 1), got {delta}"
        )));
    }
    Ok(())
}

fn pam_range(power: f64, exponent: f64) -> Result<u32> {
    let q = power.powf(exponent).floor();
    if q >= u32::MAX as f64 {
        return Err(Error::InvalidArgument(format!(
            "PAM range {q:.3e} exceeds the supported symbol width"
        )));
    }
    Ok((q as u32).max(1))
}

/// Power-constrained parameters for a known worst-case coefficient mass:
/// Q = floor(P^((1-delta) / (2 (L + delta)))), clamped to at least 1, and
/// spacing a = gamma sqrt(P) / Q with gamma = 1 / coeff_abs_sum.
pub fn select_parameters_from_sum(
    power: f64,
    delta: f64,
    dimension_count: u128,
    coeff_abs_sum: f64,
) -> Result<PowerParams> {
    validate_power_delta(power, delta)?;
    if dimension_count == 0 {
        return Err(Error::InvalidArgument(
            "dimension count must be at least 1".into(),
        ));
    }
    if !(coeff_abs_sum.is_finite() && coeff_abs_sum > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coefficient mass must be positive and finite, got {coeff_abs_sum}"
        )));
    }
    let l = dimension_count as f64;
    let q = pam_range(power, (1.0 - delta) / (2.0 * (l + delta)))?;
    let gamma = 1.0 / coeff_abs_sum;
    let spacing = gamma * power.sqrt() / q as f64;
    Ok(PowerParams { q, spacing, gamma })
}

/// Same, taking the worst coefficient mass over the given layouts.
pub fn select_parameters(
    power: f64,
    delta: f64,
    dimension_count: u128,
    gains: &ChannelGains,
    layouts: &[StreamLayout],
) -> Result<PowerParams> {
    if layouts.is_empty() {
        return Err(Error::InvalidArgument("no layouts given".into()));
    }
    let mut worst = 0.0f64;
    for layout in layouts {
        worst = worst.max(layout.coefficient_abs_sum(gains)?);
    }
    select_parameters_from_sum(power, delta, dimension_count, worst)
}

/// Single-stream point-to-point parameters: Q = floor(P^((1-delta)/2)) and
/// a = P^(delta/2), so a^2 Q^2 tracks P while the constellation keeps
/// (1-delta) of the available resolution.
pub fn p2p_parameters(power: f64, delta: f64) -> Result<PowerParams> {
    validate_power_delta(power, delta)?;
    let q = pam_range(power, (1.0 - delta) / 2.0)?;
    let spacing = power.powf(delta / 2.0);
    Ok(PowerParams {
        q,
        spacing,
        gamma: 1.0,
    })
}
