//! Receiver-side processing: exact noiseless recovery over the monomial
//! basis, brute-force nearest-point decoding, and minimum-distance analysis.
//!
//! Two decode regimes on purpose. Exact recovery works symbolically on
//! integer coefficients and scales to any shape; nearest-point decoding
//! enumerates the full received constellation and is only feasible for tiny
//! configurations, which is exactly where the error-rate trends are measured.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{tx_to_observer, ChannelGains, GainSymbol};
use crate::dimensions::{BlockKind, Monomial};
use crate::scheme::Scheme;
use crate::signaling::SymbolVector;
use crate::{Error, Result};

/// Integer coefficient per occupied dimension at one observer: the sum of
/// all PAM symbols landing there. Absent key means coefficient zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientVector {
    observer: usize,
    coeffs: BTreeMap<Monomial, i64>,
}

impl CoefficientVector {
    pub fn observer(&self) -> usize {
        self.observer
    }

    pub fn coefficient(&self, mono: &Monomial) -> i64 {
        self.coeffs.get(mono).copied().unwrap_or(0)
    }

    /// Number of dimensions with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.coeffs.iter().map(|(m, c)| (m, *c))
    }

    /// The real received value this bookkeeping stands for:
    /// spacing * sum coeff * monomial value, in ascending dimension order.
    pub fn value(&self, gains: &ChannelGains, spacing: f64) -> Result<f64> {
        let mut v = 0.0;
        for (mono, c) in &self.coeffs {
            v += *c as f64 * mono.evaluate(gains)?;
        }
        Ok(spacing * v)
    }
}

/// Exact noiseless bookkeeping of the superposition at one observer: every
/// stream adds its symbol to the coefficient of its shifted dimension.
pub fn noiseless_point(
    scheme: &Scheme,
    all_symbols: &[SymbolVector],
    observer: usize,
) -> Result<CoefficientVector> {
    scheme.validate_observer(observer)?;
    validate_symbol_block(scheme, all_symbols)?;
    let mut coeffs: BTreeMap<Monomial, i64> = BTreeMap::new();
    for (layout, symbols) in scheme.layouts().iter().zip(all_symbols) {
        let link = tx_to_observer(layout.tx(), observer);
        let mut i = 0;
        for block in layout.blocks() {
            for member in block.dims.members() {
                let s = symbols.symbols[i];
                i += 1;
                if s == 0 {
                    continue;
                }
                *coeffs.entry(member.times_symbol(link)).or_insert(0) += s as i64;
            }
        }
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(CoefficientVector { observer, coeffs })
}

fn validate_symbol_block(scheme: &Scheme, all_symbols: &[SymbolVector]) -> Result<()> {
    if all_symbols.len() != scheme.k() {
        return Err(Error::InvalidArgument(format!(
            "expected symbols for {} transmitters, got {}",
            scheme.k(),
            all_symbols.len()
        )));
    }
    for (tx, sv) in (1..=scheme.k()).zip(all_symbols) {
        if sv.tx != tx {
            return Err(Error::InvalidArgument(format!(
                "symbol vectors must be ordered by transmitter; slot {tx} holds transmitter {}",
                sv.tx
            )));
        }
        if sv.symbols.len() != scheme.streams_per_tx() {
            return Err(Error::InvalidArgument(format!(
                "transmitter {tx} carries {} streams, got {} symbols",
                scheme.streams_per_tx(),
                sv.symbols.len()
            )));
        }
    }
    Ok(())
}

/// Decoded desired blocks of one receiver, ascending block slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeResult {
    pub receiver: usize,
    pub recovered: Vec<(usize, Vec<i32>)>,
    pub success: bool,
    pub errors: usize,
}

impl DecodeResult {
    /// Ground truth for comparisons: the desired blocks as actually sent,
    /// read straight out of the transmitter's symbol vector.
    pub fn desired_truth(
        scheme: &Scheme,
        all_symbols: &[SymbolVector],
        receiver: usize,
    ) -> Result<DecodeResult> {
        crate::channel::validate_user(scheme.k(), receiver)?;
        validate_symbol_block(scheme, all_symbols)?;
        let layout = scheme.layout(receiver)?;
        let own = &all_symbols[receiver - 1];
        let mut recovered = Vec::new();
        for block in layout.blocks() {
            if let BlockKind::Message { slot } = block.kind {
                let span = layout.block_span(block.kind).expect("block listed");
                recovered.push((slot, own.symbols[span].to_vec()));
            }
        }
        Ok(DecodeResult {
            receiver,
            recovered,
            success: true,
            errors: 0,
        })
    }

    pub fn total_symbols(&self) -> usize {
        self.recovered.iter().map(|(_, s)| s.len()).sum()
    }

    /// Symbol-by-symbol mismatch count against a result of the same shape.
    pub fn mismatches_vs(&self, other: &DecodeResult) -> usize {
        debug_assert_eq!(self.receiver, other.receiver);
        debug_assert_eq!(self.recovered.len(), other.recovered.len());
        let mut n = 0;
        for ((slot_a, a), (slot_b, b)) in self.recovered.iter().zip(&other.recovered) {
            debug_assert_eq!(slot_a, slot_b);
            debug_assert_eq!(a.len(), b.len());
            n += a.iter().zip(b).filter(|(x, y)| x != y).count();
        }
        n
    }
}

/// Reads every desired symbol of the receiver directly off its private
/// dimension: the shift of T_slot by the receiver's direct gain carries
/// exactly one stream. Always succeeds on well-formed input; a coefficient
/// outside -Q..Q on a private dimension means the point is corrupt.
pub fn exact_recover(scheme: &Scheme, point: &CoefficientVector, q: u32) -> Result<DecodeResult> {
    let receiver = point.observer;
    if receiver == 0 {
        return Err(Error::InvalidArgument(
            "the eavesdropper has no desired blocks to recover".into(),
        ));
    }
    crate::channel::validate_user(scheme.k(), receiver)?;
    let direct = GainSymbol::Direct(receiver as u8);
    let mut recovered = Vec::new();
    for slot in (1..=scheme.k()).filter(|s| *s != receiver) {
        let t = scheme.t_set(slot)?;
        let mut block = Vec::with_capacity(t.len());
        for member in t.members() {
            let c = point.coefficient(&member.times_symbol(direct));
            if c.unsigned_abs() > q as u64 {
                return Err(Error::CorruptedInput(format!(
                    "private dimension of block v[{slot}] at receiver {receiver} carries coefficient {c}, outside -{q}..{q}"
                )));
            }
            block.push(c as i32);
        }
        recovered.push((slot, block));
    }
    Ok(DecodeResult {
        receiver,
        recovered,
        success: true,
        errors: 0,
    })
}

/// How to search the received constellation for the minimum distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinDistanceMode {
    /// Full enumeration; errors when (2Q+1)^streams exceeds the budget.
    Exact,
    /// Random distinct pairs; an upper bound on the true minimum.
    Sampled { pairs: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinDistanceReport {
    pub d_min: f64,
    pub exact: bool,
    /// Candidate points enumerated (exact) or distinct pairs drawn (sampled).
    pub samples: u64,
}

/// Minimum positive gap of the received value set over abstract dimensions,
/// each given as (dimension value, stream count). Streams on one dimension
/// collapse into a single integer coefficient, so the reachable coefficient
/// range is -nQ..nQ and aligned streams shrink the constellation.
pub fn min_distance_over_dims(
    dims: &[(f64, usize)],
    spacing: f64,
    q: u32,
    mode: MinDistanceMode,
    budget: u128,
) -> Result<MinDistanceReport> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions given".into()));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive and finite, got {spacing}"
        )));
    }
    for &(t, n) in dims {
        if !t.is_finite() || t == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "dimension values must be finite and nonzero, got {t}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument(
                "every dimension must carry at least one stream".into(),
            ));
        }
    }
    if q == 0 {
        return Err(Error::InvalidArgument(
            "a single-point constellation has no pair distances".into(),
        ));
    }
    match mode {
        MinDistanceMode::Exact => exact_min_distance(dims, spacing, q, budget),
        MinDistanceMode::Sampled { pairs, seed } => {
            sampled_min_distance(dims, spacing, q, pairs, seed)
        }
    }
}

fn exact_min_distance(
    dims: &[(f64, usize)],
    spacing: f64,
    q: u32,
    budget: u128,
) -> Result<MinDistanceReport> {
    let streams: u32 = dims
        .iter()
        .map(|&(_, n)| u32::try_from(n).unwrap_or(u32::MAX))
        .sum();
    let needed = (2 * q as u128 + 1)
        .checked_pow(streams)
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    // Coefficient ranges, never larger than the symbol-tuple count bounded
    // above: 2nQ+1 <= (2Q+1)^n.
    let ranges: Vec<i64> = dims.iter().map(|&(_, n)| n as i64 * q as i64).collect();
    let weights: Vec<f64> = dims.iter().map(|&(t, _)| spacing * t).collect();
    let mut coeffs: Vec<i64> = ranges.iter().map(|r| -r).collect();
    let mut values = Vec::new();
    loop {
        // Fixed summation order keeps equal coefficient vectors bitwise
        // equal, so aligned-stream collapses dedupe exactly.
        let v: f64 = weights
            .iter()
            .zip(&coeffs)
            .map(|(w, c)| w * *c as f64)
            .sum();
        values.push(v);
        let mut i = coeffs.len();
        loop {
            if i == 0 {
                let count = values.len() as u64;
                values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
                let mut d_min = f64::INFINITY;
                for w in values.windows(2) {
                    let gap = w[1] - w[0];
                    if gap > 0.0 {
                        d_min = d_min.min(gap);
                    }
                }
                if !d_min.is_finite() {
                    return Err(Error::InvalidArgument(
                        "constellation collapses to a single point".into(),
                    ));
                }
                return Ok(MinDistanceReport {
                    d_min,
                    exact: true,
                    samples: count,
                });
            }
            i -= 1;
            if coeffs[i] < ranges[i] {
                coeffs[i] += 1;
                break;
            }
            coeffs[i] = -ranges[i];
        }
    }
}

fn sampled_min_distance(
    dims: &[(f64, usize)],
    spacing: f64,
    q: u32,
    pairs: u64,
    seed: u64,
) -> Result<MinDistanceReport> {
    if pairs == 0 {
        return Err(Error::InvalidArgument(
            "sampled mode needs at least one pair".into(),
        ));
    }
    let weights: Vec<f64> = dims.iter().map(|&(t, _)| spacing * t).collect();
    let counts: Vec<usize> = dims.iter().map(|&(_, n)| n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = q as i64;
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        weights
            .iter()
            .zip(&counts)
            .map(|(w, n)| {
                let c: i64 = (0..*n).map(|_| rng.gen_range(-q..=q)).sum();
                w * c as f64
            })
            .sum()
    };
    let mut d_min = f64::INFINITY;
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    let attempt_cap = pairs.saturating_mul(100).max(1000);
    while accepted < pairs {
        if attempts >= attempt_cap {
            return Err(Error::InvalidArgument(
                "could not draw enough distinct-value pairs; constellation may be degenerate"
                    .into(),
            ));
        }
        attempts += 1;
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        if a == b {
            continue;
        }
        accepted += 1;
        d_min = d_min.min((a - b).abs());
    }
    Ok(MinDistanceReport {
        d_min,
        exact: false,
        samples: accepted,
    })
}

/// Minimum distance of the full received constellation at one observer.
pub fn min_distance(
    scheme: &Scheme,
    gains: &ChannelGains,
    observer: usize,
    spacing: f64,
    q: u32,
    mode: MinDistanceMode,
    budget: u128,
) -> Result<MinDistanceReport> {
    let occ = scheme.occupancy(observer)?;
    let mut dims = Vec::with_capacity(occ.dimension_count());
    for (mono, streams) in occ.entries() {
        dims.push((mono.evaluate(gains)?, streams.len()));
    }
    min_distance_over_dims(&dims, spacing, q, mode, budget)
}

/// Prepared brute-force nearest-point decoder for one receiver. Enumerates
/// every symbol tuple of the whole system in ascending lexicographic order;
/// ties keep the first, hence lexicographically smallest, tuple.
#[derive(Clone, Debug)]
pub struct DecoderContext {
    receiver: usize,
    q: u32,
    /// spacing * dimension value per stream, flat in (tx, layout) order.
    weights: Vec<f64>,
    /// Desired blocks as (slot, flat index range).
    desired: Vec<(usize, std::ops::Range<usize>)>,
    candidates: u128,
}

impl DecoderContext {
    pub fn new(
        scheme: &Scheme,
        gains: &ChannelGains,
        receiver: usize,
        spacing: f64,
        q: u32,
        budget: u128,
    ) -> Result<Self> {
        crate::channel::validate_user(scheme.k(), receiver)?;
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "spacing must be positive and finite, got {spacing}"
            )));
        }
        let streams = scheme.total_streams();
        let candidates = (2 * q as u128 + 1)
            .checked_pow(u32::try_from(streams).unwrap_or(u32::MAX))
            .unwrap_or(u128::MAX);
        if candidates > budget {
            return Err(Error::BudgetExceeded {
                needed: candidates,
                budget,
            });
        }
        let mut weights = Vec::with_capacity(streams);
        let mut offsets = Vec::with_capacity(scheme.k());
        for layout in scheme.layouts() {
            offsets.push(weights.len());
            let link = tx_to_observer(layout.tx(), receiver);
            for block in layout.blocks() {
                for member in block.dims.members() {
                    weights.push(spacing * member.times_symbol(link).evaluate(gains)?);
                }
            }
        }
        let own = scheme.layout(receiver)?;
        let base = offsets[receiver - 1];
        let mut desired = Vec::new();
        for block in own.blocks() {
            if let BlockKind::Message { slot } = block.kind {
                let span = own.block_span(block.kind).expect("block listed");
                desired.push((slot, base + span.start..base + span.end));
            }
        }
        Ok(Self {
            receiver,
            q,
            weights,
            desired,
            candidates,
        })
    }

    pub fn receiver(&self) -> usize {
        self.receiver
    }

    pub fn candidate_count(&self) -> u128 {
        self.candidates
    }

    /// Hard minimum-distance decoding of one received value.
    pub fn decode(&self, y: f64) -> DecodeResult {
        let q = self.q as i32;
        let mut tuple = vec![-q; self.weights.len()];
        let mut best_tuple = tuple.clone();
        let mut best_dist = f64::INFINITY;
        loop {
            let v: f64 = self
                .weights
                .iter()
                .zip(&tuple)
                .map(|(w, s)| w * *s as f64)
                .sum();
            let dist = (y - v).abs();
            if dist < best_dist {
                best_dist = dist;
                best_tuple.copy_from_slice(&tuple);
            }
            let mut i = tuple.len();
            loop {
                if i == 0 {
                    let recovered = self
                        .desired
                        .iter()
                        .map(|(slot, span)| (*slot, best_tuple[span.clone()].to_vec()))
                        .collect();
                    return DecodeResult {
                        receiver: self.receiver,
                        recovered,
                        success: true,
                        errors: 0,
                    };
                }
                i -= 1;
                if tuple[i] < q {
                    tuple[i] += 1;
                    break;
                }
                tuple[i] = -q;
            }
        }
    }
}

/// One-shot nearest-point decode.
pub fn nearest_point_decode(
    scheme: &Scheme,
    gains: &ChannelGains,
    y: f64,
    receiver: usize,
    spacing: f64,
    q: u32,
    budget: u128,
) -> Result<DecodeResult> {
    Ok(DecoderContext::new(scheme, gains, receiver, spacing, q, budget)?.decode(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, canonical_symbols, LinkConfig};
    use crate::signaling::{encode, random_symbols, SymbolVector};

    fn zero_symbols(scheme: &Scheme) -> Vec<SymbolVector> {
        (1..=scheme.k())
            .map(|tx| SymbolVector {
                tx,
                symbols: vec![0; scheme.streams_per_tx()],
            })
            .collect()
    }

    fn draw_symbols(scheme: &Scheme, q: u32, rng: &mut ChaCha8Rng) -> Vec<SymbolVector> {
        scheme
            .layouts()
            .iter()
            .map(|l| random_symbols(l, q, rng))
            .collect()
    }

    #[test]
    fn all_zero_symbols_give_an_empty_coefficient_map() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let cv = noiseless_point(&scheme, &zero_symbols(&scheme), 1).unwrap();
        assert!(cv.is_empty());
        let gains = ChannelGains::sample(2, true, 3).unwrap();
        assert_eq!(cv.value(&gains, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn single_active_stream_lands_on_its_shifted_dimension() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let mut symbols = zero_symbols(&scheme);
        // Transmitter 1, first stream: message block v[2] riding T_2.
        symbols[0].symbols[0] = 2;
        let cv = noiseless_point(&scheme, &symbols, 1).unwrap();
        assert_eq!(cv.len(), 1);
        let dim = scheme.t_set(2).unwrap().members()[0]
            .times_symbol(GainSymbol::Direct(1));
        assert_eq!(cv.coefficient(&dim), 2);
    }

    #[test]
    fn coefficient_value_matches_the_float_channel() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 7).unwrap();
        let cfg = LinkConfig::new(100.0, 0.0, 0).unwrap();
        let spacing = 0.37;
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..1000 {
            let symbols = draw_symbols(&scheme, 2, &mut rng);
            let inputs: Vec<f64> = scheme
                .layouts()
                .iter()
                .zip(&symbols)
                .map(|(l, s)| encode(l, s, spacing, &gains).unwrap())
                .collect();
            let mut noise = ChaCha8Rng::seed_from_u64(0);
            let outputs = apply_channel(&gains, &inputs, &cfg, &mut noise).unwrap();
            for observer in scheme.observers() {
                let expect = if observer == 0 {
                    outputs[scheme.k()]
                } else {
                    outputs[observer - 1]
                };
                let got = noiseless_point(&scheme, &symbols, observer)
                    .unwrap()
                    .value(&gains, spacing)
                    .unwrap();
                let scale = expect.abs().max(1.0);
                assert!((got - expect).abs() <= 1e-9 * scale, "observer {observer}");
            }
        }
    }

    #[test]
    fn exact_recover_round_trips_all_desired_blocks() {
        let scheme = Scheme::new(3, 2, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let symbols = draw_symbols(&scheme, 3, &mut rng);
            for receiver in 1..=3 {
                let cv = noiseless_point(&scheme, &symbols, receiver).unwrap();
                let dec = exact_recover(&scheme, &cv, 3).unwrap();
                let truth = DecodeResult::desired_truth(&scheme, &symbols, receiver).unwrap();
                assert!(dec.success);
                assert_eq!(dec.mismatches_vs(&truth), 0);
                assert_eq!(dec.total_symbols(), 2 * 1024);
            }
        }
    }

    #[test]
    fn all_zero_round_trip_recovers_all_zero() {
        let scheme = Scheme::new(2, 2, true).unwrap();
        let cv = noiseless_point(&scheme, &zero_symbols(&scheme), 2).unwrap();
        let dec = exact_recover(&scheme, &cv, 4).unwrap();
        assert!(dec.recovered.iter().all(|(_, s)| s.iter().all(|v| *v == 0)));
        assert_eq!(dec.recovered.len(), 1);
        assert_eq!(dec.recovered[0].0, 1);
    }

    #[test]
    fn jamming_never_lands_on_private_dimensions() {
        let scheme = Scheme::new(3, 2, true).unwrap();
        for receiver in 1..=3usize {
            let occ = scheme.occupancy(receiver).unwrap();
            let direct = GainSymbol::Direct(receiver as u8);
            for slot in (1..=3).filter(|s| *s != receiver) {
                for member in scheme.t_set(slot).unwrap().members() {
                    let streams = occ.streams_on(&member.times_symbol(direct));
                    assert!(streams
                        .iter()
                        .all(|s| !matches!(s.block, BlockKind::Jamming)));
                }
            }
        }
    }

    #[test]
    fn exact_recover_flags_out_of_range_private_coefficients() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let dim = scheme.t_set(2).unwrap().members()[0]
            .times_symbol(GainSymbol::Direct(1));
        let mut coeffs = BTreeMap::new();
        coeffs.insert(dim, 5i64);
        let cv = CoefficientVector {
            observer: 1,
            coeffs,
        };
        let err = exact_recover(&scheme, &cv, 3).unwrap_err();
        assert!(matches!(err, Error::CorruptedInput(_)));
        assert!(exact_recover(&scheme, &cv, 5).is_ok());
    }

    #[test]
    fn recovery_rejects_the_eavesdropper() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let cv = noiseless_point(&scheme, &zero_symbols(&scheme), 0).unwrap();
        assert!(exact_recover(&scheme, &cv, 1).is_err());
    }

    #[test]
    fn unit_dimension_min_distance_is_the_spacing() {
        let r = min_distance_over_dims(
            &[(1.0, 1)],
            0.25,
            3,
            MinDistanceMode::Exact,
            1_000_000,
        )
        .unwrap();
        assert_eq!(r.d_min, 0.25);
        assert!(r.exact);
        assert_eq!(r.samples, 7);
    }

    #[test]
    fn perfectly_aligned_streams_collapse_to_one_lattice() {
        // Two unit-coefficient streams on one dimension: range doubles but
        // the gap stays one spacing.
        let r = min_distance_over_dims(
            &[(1.0, 2)],
            0.25,
            2,
            MinDistanceMode::Exact,
            1_000_000,
        )
        .unwrap();
        assert_eq!(r.d_min, 0.25);
        assert_eq!(r.samples, 9);
    }

    #[test]
    fn two_incommensurate_dimensions_have_the_expected_gap() {
        let root2 = 2.0f64.sqrt();
        let r = min_distance_over_dims(
            &[(1.0, 1), (root2, 1)],
            1.0,
            1,
            MinDistanceMode::Exact,
            1_000_000,
        )
        .unwrap();
        assert!((r.d_min - (root2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sampling_upper_bounds_and_often_attains_the_exact_minimum() {
        let root2 = 2.0f64.sqrt();
        let dims = [(1.0, 1), (root2, 1)];
        let exact = min_distance_over_dims(&dims, 1.0, 1, MinDistanceMode::Exact, 1_000_000)
            .unwrap()
            .d_min;
        let sampled = min_distance_over_dims(
            &dims,
            1.0,
            1,
            MinDistanceMode::Sampled {
                pairs: 10_000,
                seed: 5,
            },
            1_000_000,
        )
        .unwrap();
        assert!(!sampled.exact);
        assert!(sampled.d_min >= exact - 1e-15);
        assert!((sampled.d_min - exact).abs() < 1e-12, "tiny space gets hit");
    }

    #[test]
    fn exact_mode_respects_the_budget() {
        let err =
            min_distance_over_dims(&[(1.0, 4)], 1.0, 2, MinDistanceMode::Exact, 100).unwrap_err();
        match err {
            Error::BudgetExceeded { needed, budget } => {
                assert_eq!(needed, 625);
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_min_distance_inputs_are_rejected() {
        assert!(min_distance_over_dims(&[], 1.0, 1, MinDistanceMode::Exact, 100).is_err());
        assert!(
            min_distance_over_dims(&[(1.0, 1)], 0.0, 1, MinDistanceMode::Exact, 100).is_err()
        );
        assert!(
            min_distance_over_dims(&[(0.0, 1)], 1.0, 1, MinDistanceMode::Exact, 100).is_err()
        );
        assert!(
            min_distance_over_dims(&[(1.0, 0)], 1.0, 1, MinDistanceMode::Exact, 100).is_err()
        );
        assert!(
            min_distance_over_dims(&[(1.0, 1)], 1.0, 0, MinDistanceMode::Exact, 100).is_err()
        );
    }

    #[test]
    fn scheme_min_distance_runs_at_the_smallest_shape() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 12).unwrap();
        let r = min_distance(
            &scheme,
            &gains,
            1,
            0.5,
            1,
            MinDistanceMode::Exact,
            1_000_000,
        )
        .unwrap();
        assert!(r.exact);
        assert!(r.d_min > 0.0);
    }

    #[test]
    fn noiseless_decode_recovers_the_generating_symbols() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 23).unwrap();
        let spacing = 0.8;
        let ctx = DecoderContext::new(&scheme, &gains, 1, spacing, 1, 1_000_000).unwrap();
        assert_eq!(ctx.candidate_count(), 81);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let symbols = draw_symbols(&scheme, 1, &mut rng);
            let y = noiseless_point(&scheme, &symbols, 1)
                .unwrap()
                .value(&gains, spacing)
                .unwrap();
            let dec = ctx.decode(y);
            let truth = DecodeResult::desired_truth(&scheme, &symbols, 1).unwrap();
            assert_eq!(dec.mismatches_vs(&truth), 0);
        }
    }

    #[test]
    fn decode_is_stable_under_sub_half_d_min_perturbations() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 29).unwrap();
        let spacing = 0.8;
        let d_min = min_distance(
            &scheme,
            &gains,
            1,
            spacing,
            1,
            MinDistanceMode::Exact,
            1_000_000,
        )
        .unwrap()
        .d_min;
        let ctx = DecoderContext::new(&scheme, &gains, 1, spacing, 1, 1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let symbols = draw_symbols(&scheme, 1, &mut rng);
            let y = noiseless_point(&scheme, &symbols, 1)
                .unwrap()
                .value(&gains, spacing)
                .unwrap();
            let base = ctx.decode(y);
            for eps in [-0.49, -0.2, 0.2, 0.49] {
                let shifted = ctx.decode(y + eps * d_min);
                assert_eq!(shifted, base, "eps {eps}");
            }
        }
    }

    #[test]
    fn ties_break_toward_the_lexicographically_smallest_tuple() {
        // Equal direct and cross gain at receiver 1 makes transmitter 2's
        // streams land on the same weights as transmitter 1's; the value
        // w is then explained by several tuples and the lexicographically
        // smallest one puts the symbol on the last stream.
        let mut values = std::collections::BTreeMap::new();
        for sym in canonical_symbols(2, true).unwrap() {
            values.insert(sym, 1.3);
        }
        values.insert(GainSymbol::Direct(1), 0.9);
        values.insert(GainSymbol::Cross(1, 2), 0.9);
        let gains = ChannelGains::from_values(2, true, values).unwrap();
        let scheme = Scheme::new(2, 1, true).unwrap();
        let ctx = DecoderContext::new(&scheme, &gains, 1, 1.0, 1, 1_000_000).unwrap();
        let w = scheme.t_set(2).unwrap().members()[0]
            .times_symbol(GainSymbol::Direct(1))
            .evaluate(&gains)
            .unwrap();
        let dec = ctx.decode(w);
        // The desired block v[2] reads 0: the tie went to a later stream.
        assert_eq!(dec.recovered, vec![(2, vec![0])]);
        assert_eq!(ctx.decode(w), dec);
    }

    #[test]
    fn decoder_budget_is_enforced() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 1).unwrap();
        let err = DecoderContext::new(&scheme, &gains, 1, 1.0, 1, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { needed: 81, .. }));
        assert!(nearest_point_decode(&scheme, &gains, 0.0, 1, 1.0, 1, 10).is_err());
    }

    #[test]
    fn symbol_block_validation_catches_shape_errors() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let mut symbols = zero_symbols(&scheme);
        symbols.swap(0, 1);
        assert!(noiseless_point(&scheme, &symbols, 1).is_err());
        let mut symbols = zero_symbols(&scheme);
        symbols[0].symbols.pop();
        assert!(noiseless_point(&scheme, &symbols, 1).is_err());
        let symbols = zero_symbols(&scheme);
        assert!(noiseless_point(&scheme, &symbols[..1], 1).is_err());
    }
}
