//! Exact leakage accounting over integer coefficient distributions.
//!
//! Everything here is symbolic: entropies are computed from the integer
//! coefficients landing on each dimension, never from floating-point
//! received values, so the collision structure is exactly the monomial-basis
//! structure. The load-bearing fact is that conditional entropy splits
//! into a sum over dimensions because every stream occupies exactly one
//! dimension at a given observer; the brute-force oracle validates exactly
//! that claim on enumerable shapes.
//!
//! The noise-free superposition is what gets bounded: leakage here is the
//! data-processed upper bound on the noisy mutual information, which is the
//! quantity the closed-form bound chain controls.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::channel::{validate_k, validate_user};
use crate::dimensions::{cardinality_formulas, BlockKind, Monomial, OccupancyMap, StreamId};
use crate::scheme::Scheme;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Conditioning
// ---------------------------------------------------------------------------

/// The set of message blocks whose symbols are given. Jamming blocks are
/// not representable here: conditioning applies to message variables only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditioningSet {
    k: usize,
    known_blocks: BTreeSet<(usize, usize)>,
}

impl ConditioningSet {
    /// Nothing is known.
    pub fn empty(k: usize) -> Result<Self> {
        validate_k(k)?;
        Ok(Self {
            k,
            known_blocks: BTreeSet::new(),
        })
    }

    /// All message blocks of every user are known; only jamming stays free.
    pub fn all_messages(k: usize) -> Result<Self> {
        let mut cond = Self::empty(k)?;
        for tx in 1..=k {
            for slot in (1..=k).filter(|s| *s != tx) {
                cond.known_blocks.insert((tx, slot));
            }
        }
        Ok(cond)
    }

    /// All message blocks except user `user`'s: the conditioning of the
    /// leakage chain for that user's message.
    pub fn all_messages_except(k: usize, user: usize) -> Result<Self> {
        validate_user(k, user)?;
        let mut cond = Self::all_messages(k)?;
        cond.known_blocks.retain(|(tx, _)| *tx != user);
        Ok(cond)
    }

    /// Marks one message sub-block as known.
    pub fn insert_message(&mut self, tx: usize, slot: usize) -> Result<()> {
        validate_user(self.k, tx)?;
        validate_user(self.k, slot)?;
        if tx == slot {
            return Err(Error::InvalidArgument(format!(
                "no message block v[{slot}] exists at transmitter {tx}"
            )));
        }
        self.known_blocks.insert((tx, slot));
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, tx: usize, slot: usize) -> bool {
        self.known_blocks.contains(&(tx, slot))
    }

    pub fn known_blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.known_blocks.iter().copied()
    }

    /// Whether a placed stream's symbol is fixed by this conditioning.
    pub(crate) fn knows_stream(&self, stream: &StreamId) -> bool {
        match stream.block {
            BlockKind::Message { slot } => self.contains(stream.tx, slot),
            BlockKind::Jamming => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Integer distributions
// ---------------------------------------------------------------------------

/// A finitely supported distribution on consecutive integers, stored as
/// unnormalized counts from `min` upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntDist {
    min: i64,
    counts: Vec<u128>,
}

impl IntDist {
    pub fn point_mass(value: i64) -> Self {
        Self {
            min: value,
            counts: vec![1],
        }
    }

    /// Uniform on {-q, ..., q}.
    pub fn uniform_pam(q: u32) -> Self {
        Self {
            min: -(q as i64),
            counts: vec![1; 2 * q as usize + 1],
        }
    }

    /// Distribution of the sum of two independent variables.
    pub fn convolve(&self, other: &IntDist) -> IntDist {
        let mut counts = vec![0u128; self.counts.len() + other.counts.len() - 1];
        for (i, a) in self.counts.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.counts.iter().enumerate() {
                counts[i + j] += a * b;
            }
        }
        IntDist {
            min: self.min + other.min,
            counts,
        }
    }

    /// Sum of `n` independent uniform{-q..q} symbols.
    pub fn uniform_sum(n: usize, q: u32) -> Result<IntDist> {
        if n > 64 {
            return Err(Error::InvalidArgument(format!(
                "refusing to convolve {n} streams on one dimension"
            )));
        }
        let mut acc = IntDist::point_mass(0);
        for _ in 0..n {
            acc = acc.convolve(&IntDist::uniform_pam(q));
        }
        Ok(acc)
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    pub fn count(&self, value: i64) -> u128 {
        let idx = value - self.min;
        if idx < 0 {
            return 0;
        }
        self.counts.get(idx as usize).copied().unwrap_or(0)
    }

    /// Shannon entropy in bits: log2(T) - (1/T) sum c*log2(c).
    pub fn entropy_bits(&self) -> f64 {
        let total = self.total() as f64;
        let mut weighted = 0.0;
        for &c in &self.counts {
            if c > 1 {
                let c = c as f64;
                weighted += c * c.log2();
            }
        }
        total.log2() - weighted / total
    }
}

// ---------------------------------------------------------------------------
// Per-dimension engine
// ---------------------------------------------------------------------------

fn validate_cond_against(occ: &OccupancyMap, cond: &ConditioningSet) -> Result<()> {
    for (_, streams) in occ.entries() {
        for s in streams {
            if s.tx > cond.k() {
                return Err(Error::InvalidArgument(format!(
                    "occupancy references transmitter {}, conditioning set covers {} users",
                    s.tx,
                    cond.k()
                )));
            }
        }
    }
    Ok(())
}

/// For each occupied dimension, the distribution of the coefficient
/// contributed by streams the conditioning does not fix: a convolution of
/// one uniform{-Q..Q} per unconditioned stream. Fixed streams shift the
/// observation without adding entropy.
pub fn per_dimension_distributions(
    occ: &OccupancyMap,
    cond: &ConditioningSet,
    q: u32,
) -> Result<BTreeMap<Monomial, IntDist>> {
    validate_cond_against(occ, cond)?;
    let mut dists = BTreeMap::new();
    for (mono, streams) in occ.entries() {
        let free = streams.iter().filter(|s| !cond.knows_stream(s)).count();
        dists.insert(mono.clone(), IntDist::uniform_sum(free, q)?);
    }
    Ok(dists)
}

/// Conditional entropy of the noise-free superposition at the occupancy's
/// observer, in bits. Splits as a sum of per-dimension entropies because
/// each stream lands on exactly one dimension, so the per-dimension
/// coefficients are mutually independent.
///
/// Computed over the histogram of unconditioned-stream counts, so every
/// dimension with the same count shares one entropy evaluation: with all
/// messages conditioned this reduces to the single product KM * log2(2Q+1).
pub fn exact_conditional_entropy(
    occ: &OccupancyMap,
    cond: &ConditioningSet,
    q: u32,
) -> Result<f64> {
    validate_cond_against(occ, cond)?;
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for (_, streams) in occ.entries() {
        let free = streams.iter().filter(|s| !cond.knows_stream(s)).count();
        if free > 0 {
            *histogram.entry(free).or_insert(0) += 1;
        }
    }
    let mut bits = 0.0;
    for (free, dims) in &histogram {
        bits += *dims as f64 * IntDist::uniform_sum(*free, q)?.entropy_bits();
    }
    Ok(bits)
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Independent check of the per-dimension engine: enumerates every joint
/// symbol assignment of the whole system, partitions by the conditioned
/// symbols, and computes the conditional entropy of the exact coefficient
/// vector by direct summation.
pub fn oracle_conditional_entropy(
    scheme: &Scheme,
    observer: usize,
    cond: &ConditioningSet,
    q: u32,
    budget: u128,
) -> Result<f64> {
    scheme.validate_observer(observer)?;
    if cond.k() != scheme.k() {
        return Err(Error::InvalidArgument(format!(
            "conditioning set covers {} users, scheme has {}",
            cond.k(),
            scheme.k()
        )));
    }
    let streams = scheme.total_streams();
    let outcomes = (2 * q as u128 + 1)
        .checked_pow(u32::try_from(streams).unwrap_or(u32::MAX))
        .unwrap_or(u128::MAX);
    if outcomes > budget {
        return Err(Error::BudgetExceeded {
            needed: outcomes,
            budget,
        });
    }
    // Flat placement: per stream its dimension index and whether it is known.
    let mut dim_index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut placement: Vec<(usize, bool)> = Vec::with_capacity(streams);
    for layout in scheme.layouts() {
        let link = crate::channel::tx_to_observer(layout.tx(), observer);
        for block in layout.blocks() {
            let known = match block.kind {
                BlockKind::Message { slot } => cond.contains(layout.tx(), slot),
                BlockKind::Jamming => false,
            };
            for member in block.dims.members() {
                let dim = member.times_symbol(link);
                let next = dim_index.len();
                let idx = *dim_index.entry(dim).or_insert(next);
                placement.push((idx, known));
            }
        }
    }
    let dims = dim_index.len();
    let q_i = q as i32;
    let mut tuple = vec![-q_i; streams];
    let mut partition: BTreeMap<Vec<i32>, BTreeMap<Vec<i64>, u64>> = BTreeMap::new();
    loop {
        let mut key = Vec::new();
        let mut coeffs = vec![0i64; dims];
        for (s, &(idx, known)) in tuple.iter().zip(&placement) {
            coeffs[idx] += *s as i64;
            if known {
                key.push(*s);
            }
        }
        *partition.entry(key).or_default().entry(coeffs).or_insert(0) += 1;
        let mut i = streams;
        loop {
            if i == 0 {
                let total: u64 = partition
                    .values()
                    .map(|g| g.values().sum::<u64>())
                    .sum();
                let mut bits = 0.0;
                for group in partition.values() {
                    let t: u64 = group.values().sum();
                    let t_f = t as f64;
                    let mut weighted = 0.0;
                    for &c in group.values() {
                        if c > 1 {
                            let c = c as f64;
                            weighted += c * c.log2();
                        }
                    }
                    bits += t_f / total as f64 * (t_f.log2() - weighted / t_f);
                }
                return Ok(bits);
            }
            i -= 1;
            if tuple[i] < q_i {
                tuple[i] += 1;
                break;
            }
            tuple[i] = -q_i;
        }
    }
}

// ---------------------------------------------------------------------------
// Leakage reports and closed-form bounds
// ---------------------------------------------------------------------------

/// Which entropy engine produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyEngine {
    Exact,
    Oracle,
}

/// The leakage chain evaluated for one (message, observer) pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LeakageReport {
    pub message: usize,
    pub observer: usize,
    pub h_cond_minus_i_bits: f64,
    pub h_cond_all_bits: f64,
    /// h_cond_minus_i_bits - h_cond_all_bits, the conditional information
    /// the observer gains about the message.
    pub leakage_bits: f64,
    /// Closed-form ceiling on leakage_bits.
    pub bound_bits: f64,
    pub engine: EntropyEngine,
    /// leakage_bits / ((1/2) log2 P) when a power context is attached.
    pub dof_fraction: Option<f64>,
}

impl LeakageReport {
    /// Expresses the leakage as a d.o.f. fraction against (1/2) log2 P.
    pub fn with_power_context(mut self, power: f64) -> Result<Self> {
        if !(power.is_finite() && power > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "power context must exceed 1, got {power}"
            )));
        }
        self.dof_fraction = Some(self.leakage_bits / (0.5 * power.log2()));
        Ok(self)
    }
}

/// Closed-form leakage ceiling in bits:
/// M log2(2Q+1) + (K-1) M_delta log2(4Q+1) + 2 (K-1)(M - M_delta) log2(2Q+1)
/// - K M log2(2Q+1). The middle term upper-bounds each aligned pair by the
/// log of its support, the rest count solo uniform dimensions.
pub fn leakage_bound_bits(k: usize, m: u32, q: u32, eavesdropper: bool) -> Result<f64> {
    let f = cardinality_formulas(k, m, eavesdropper)?;
    let m_card = f.m_cardinality as f64;
    let m_delta = f.m_delta as f64;
    let k_f = k as f64;
    let l1 = (2.0 * q as f64 + 1.0).log2();
    let l2 = (4.0 * q as f64 + 1.0).log2();
    Ok(m_card * l1 + (k_f - 1.0) * m_delta * l2 + 2.0 * (k_f - 1.0) * (m_card - m_delta) * l1
        - k_f * m_card * l1)
}

/// The same ceiling as a coefficient of (1/2) log2 P:
/// K(2m-1)/m^2 / ((K-1) + K(1+1/m)^(K^2+1) + delta/m^(K^2+1)).
pub fn leakage_bound_dof(k: usize, m: u64, delta: f64) -> Result<f64> {
    validate_k(k)?;
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(delta.is_finite() && (0.0..1.0).contains(&delta)) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    let k_f = k as f64;
    let m_f = m as f64;
    let g = (k * k + 1) as f64;
    let numerator = k_f * (2.0 * m_f - 1.0) / (m_f * m_f);
    // delta / m^G through logs so huge exponents underflow to zero instead
    // of overflowing the power.
    let tail = if delta == 0.0 {
        0.0
    } else {
        (delta.ln() - g * m_f.ln()).exp()
    };
    let denominator = (k_f - 1.0) + k_f * (1.0 + 1.0 / m_f).powf(g) + tail;
    Ok(numerator / denominator)
}

/// Fano lower bound on recoverable information:
/// max(0, H_V - 1 - pe * alphabet_log2).
pub fn fano_mi_lower_bound(h_v_bits: f64, pe: f64, alphabet_log2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pe) {
        return Err(Error::InvalidArgument(format!(
            "error probability must lie in [0, 1], got {pe}"
        )));
    }
    if !(h_v_bits.is_finite() && h_v_bits >= 0.0) || !(alphabet_log2.is_finite() && alphabet_log2 >= 0.0)
    {
        return Err(Error::InvalidArgument(
            "entropy inputs must be finite and nonnegative".into(),
        ));
    }
    Ok((h_v_bits - 1.0 - pe * alphabet_log2).max(0.0))
}

fn validate_pair(scheme: &Scheme, message: usize, observer: usize) -> Result<()> {
    validate_user(scheme.k(), message)?;
    scheme.validate_observer(observer)?;
    if message == observer {
        return Err(Error::InvalidArgument(format!(
            "leakage of message {message} is measured at other observers, not its own receiver"
        )));
    }
    Ok(())
}

/// Full leakage chain via the per-dimension engine.
pub fn leakage_exact(
    scheme: &Scheme,
    message: usize,
    observer: usize,
    q: u32,
) -> Result<LeakageReport> {
    validate_pair(scheme, message, observer)?;
    let occ = scheme.occupancy(observer)?;
    leakage_exact_with_occupancy(scheme, &occ, message, q)
}

/// Same, reusing a prebuilt occupancy map for the observer.
pub fn leakage_exact_with_occupancy(
    scheme: &Scheme,
    occ: &OccupancyMap,
    message: usize,
    q: u32,
) -> Result<LeakageReport> {
    validate_pair(scheme, message, occ.observer())?;
    let k = scheme.k();
    let minus = ConditioningSet::all_messages_except(k, message)?;
    let all = ConditioningSet::all_messages(k)?;
    let h_minus = exact_conditional_entropy(occ, &minus, q)?;
    let h_all = exact_conditional_entropy(occ, &all, q)?;
    Ok(LeakageReport {
        message,
        observer: occ.observer(),
        h_cond_minus_i_bits: h_minus,
        h_cond_all_bits: h_all,
        leakage_bits: h_minus - h_all,
        bound_bits: leakage_bound_bits(k, scheme.m(), q, scheme.eavesdropper())?,
        engine: EntropyEngine::Exact,
        dof_fraction: None,
    })
}

/// Full leakage chain via the brute-force oracle.
pub fn leakage_oracle(
    scheme: &Scheme,
    message: usize,
    observer: usize,
    q: u32,
    budget: u128,
) -> Result<LeakageReport> {
    validate_pair(scheme, message, observer)?;
    let k = scheme.k();
    let minus = ConditioningSet::all_messages_except(k, message)?;
    let all = ConditioningSet::all_messages(k)?;
    let h_minus = oracle_conditional_entropy(scheme, observer, &minus, q, budget)?;
    let h_all = oracle_conditional_entropy(scheme, observer, &all, q, budget)?;
    Ok(LeakageReport {
        message,
        observer,
        h_cond_minus_i_bits: h_minus,
        h_cond_all_bits: h_all,
        leakage_bits: h_minus - h_all,
        bound_bits: leakage_bound_bits(k, scheme.m(), q, scheme.eavesdropper())?,
        engine: EntropyEngine::Oracle,
        dof_fraction: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_entropy_is_the_log_of_the_alphabet() {
        assert_eq!(IntDist::uniform_pam(1).entropy_bits(), 3.0f64.log2());
        assert_eq!(IntDist::uniform_pam(2).entropy_bits(), 5.0f64.log2());
        assert_eq!(IntDist::point_mass(7).entropy_bits(), 0.0);
    }

    #[test]
    fn two_stream_convolution_is_triangular() {
        let d = IntDist::uniform_sum(2, 1).unwrap();
        assert_eq!(d.min(), -2);
        assert_eq!(d.support_len(), 5);
        assert_eq!(
            (-2..=2).map(|v| d.count(v)).collect::<Vec<_>>(),
            vec![1, 2, 3, 2, 1]
        );
        assert!((d.entropy_bits() - 2.197_159_723_424_149).abs() < 1e-12);
    }

    #[test]
    fn uniform_sum_edge_cases() {
        let zero = IntDist::uniform_sum(0, 3).unwrap();
        assert_eq!(zero.support_len(), 1);
        assert_eq!(zero.entropy_bits(), 0.0);
        let q0 = IntDist::uniform_sum(3, 0).unwrap();
        assert_eq!(q0.entropy_bits(), 0.0);
        assert!(IntDist::uniform_sum(65, 1).is_err());
    }

    #[test]
    fn conditioning_set_construction_rules() {
        let all = ConditioningSet::all_messages(3).unwrap();
        assert_eq!(all.known_blocks().count(), 6);
        let minus = ConditioningSet::all_messages_except(3, 2).unwrap();
        assert_eq!(minus.known_blocks().count(), 4);
        assert!(minus.contains(1, 2) && minus.contains(3, 1));
        assert!(!minus.contains(2, 1) && !minus.contains(2, 3));
        let mut c = ConditioningSet::empty(2).unwrap();
        assert!(c.insert_message(1, 1).is_err());
        c.insert_message(1, 2).unwrap();
        assert!(c.contains(1, 2));
    }

    #[test]
    fn per_dimension_structure_at_the_smallest_shape() {
        // K=2, m=1, observer 2, conditioning on everything but user 1's
        // message: three free dimensions and the known one is deterministic.
        let scheme = Scheme::new(2, 1, true).unwrap();
        let occ = scheme.occupancy(2).unwrap();
        let cond = ConditioningSet::all_messages_except(2, 1).unwrap();
        let dists = per_dimension_distributions(&occ, &cond, 1).unwrap();
        assert_eq!(dists.len(), 4);
        let entropies: Vec<f64> = dists.values().map(IntDist::entropy_bits).collect();
        let free: usize = entropies.iter().filter(|h| **h > 0.0).count();
        assert_eq!(free, 3);
        let h = exact_conditional_entropy(&occ, &cond, 1).unwrap();
        assert_eq!(h, 3.0 * 3.0f64.log2());
    }

    #[test]
    fn all_message_conditioning_leaves_exactly_the_jamming_entropy() {
        for (k, m) in [(2usize, 1u32), (2, 2), (3, 1), (3, 2)] {
            let scheme = Scheme::new(k, m, true).unwrap();
            let km = (k * scheme.dimension_cardinality()) as f64;
            let cond = ConditioningSet::all_messages(k).unwrap();
            for observer in scheme.observers() {
                let occ = scheme.occupancy(observer).unwrap();
                for q in [1u32, 2] {
                    let h = exact_conditional_entropy(&occ, &cond, q).unwrap();
                    assert_eq!(h, km * (2.0 * q as f64 + 1.0).log2(), "K={k} m={m} j={observer} Q={q}");
                }
            }
        }
    }

    #[test]
    fn engine_matches_oracle_on_enumerable_shapes() {
        let budget = 10_000_000;
        let mut checked = 0;
        for (k, m, qs) in [(2usize, 1u32, &[1u32, 2][..]), (3, 1, &[1][..])] {
            let scheme = Scheme::new(k, m, true).unwrap();
            let mut conds = vec![
                ConditioningSet::empty(k).unwrap(),
                ConditioningSet::all_messages(k).unwrap(),
            ];
            for user in 1..=k {
                conds.push(ConditioningSet::all_messages_except(k, user).unwrap());
            }
            for observer in scheme.observers() {
                let occ = scheme.occupancy(observer).unwrap();
                for cond in &conds {
                    for &q in qs {
                        let fast = exact_conditional_entropy(&occ, cond, q).unwrap();
                        let slow =
                            oracle_conditional_entropy(&scheme, observer, cond, q, budget)
                                .unwrap();
                        assert!(
                            (fast - slow).abs() < 1e-9,
                            "K={k} m={m} j={observer} Q={q}: {fast} vs {slow}"
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked >= 38);
    }

    #[test]
    fn oracle_budget_is_enforced() {
        let scheme = Scheme::new(3, 1, true).unwrap();
        let cond = ConditioningSet::empty(3).unwrap();
        let err = oracle_conditional_entropy(&scheme, 0, &cond, 1, 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { needed: 19683, .. }));
    }

    #[test]
    fn fully_leaky_smallest_shape_loses_one_symbol() {
        // m=1 has no alignment, so the single message symbol leaks whole.
        let scheme = Scheme::new(2, 1, true).unwrap();
        let rep = leakage_exact(&scheme, 1, 2, 1).unwrap();
        assert!((rep.leakage_bits - 3.0f64.log2()).abs() < 1e-12);
        assert_eq!(rep.h_cond_all_bits, 2.0 * 3.0f64.log2());
        assert!(rep.leakage_bits <= rep.bound_bits + 1e-9);
        let with_ctx = rep.with_power_context(100.0).unwrap();
        let dof = with_ctx.dof_fraction.unwrap();
        assert!((dof - rep.leakage_bits / (0.5 * 100.0f64.log2())).abs() < 1e-15);
    }

    #[test]
    fn leakage_respects_the_closed_form_bound_across_shapes() {
        for k in [2usize, 3] {
            for m in 1u32..=2 {
                let scheme = Scheme::new(k, m, true).unwrap();
                for observer in scheme.observers() {
                    let occ = scheme.occupancy(observer).unwrap();
                    for message in (1..=k).filter(|i| *i != observer) {
                        for q in [0u32, 1, 2] {
                            let rep =
                                leakage_exact_with_occupancy(&scheme, &occ, message, q)
                                    .unwrap();
                            assert!(rep.leakage_bits >= -1e-12);
                            assert!(
                                rep.leakage_bits <= rep.bound_bits + 1e-9,
                                "K={k} m={m} i={message} j={observer} Q={q}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn leakage_is_symmetric_across_pairs() {
        let scheme = Scheme::new(3, 2, true).unwrap();
        let mut values = Vec::new();
        for observer in scheme.observers() {
            let occ = scheme.occupancy(observer).unwrap();
            for message in (1..=3).filter(|i| *i != observer) {
                values.push(
                    leakage_exact_with_occupancy(&scheme, &occ, message, 2)
                        .unwrap()
                        .leakage_bits,
                );
            }
        }
        for v in &values {
            assert_eq!(*v, values[0]);
        }
    }

    #[test]
    fn degenerate_constellation_leaks_nothing() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        let rep = leakage_exact(&scheme, 1, 0, 0).unwrap();
        assert_eq!(rep.leakage_bits, 0.0);
        assert_eq!(rep.bound_bits, 0.0);
    }

    #[test]
    fn leakage_pair_validation() {
        let scheme = Scheme::new(2, 1, true).unwrap();
        assert!(leakage_exact(&scheme, 1, 1, 1).is_err());
        assert!(leakage_exact(&scheme, 3, 2, 1).is_err());
        let no_eave = Scheme::new(2, 1, false).unwrap();
        assert!(leakage_exact(&no_eave, 1, 0, 1).is_err());
    }

    #[test]
    fn bound_dof_reproduces_the_printed_values() {
        let v = leakage_bound_dof(2, 1, 0.0).unwrap();
        assert!((v - 2.0 / 65.0).abs() < 1e-15);
        for k in 2..=10usize {
            assert!(leakage_bound_dof(k, 1_000_000, 0.0).unwrap() < 1e-4, "K={k}");
            // Decays like 1/m once m is well past K^2; below that the
            // (1+1/m)^(K^2+1) denominator term dominates and the curve is
            // not monotone.
            let a = leakage_bound_dof(k, 10_000, 0.0).unwrap();
            let b = leakage_bound_dof(k, 100_000, 0.0).unwrap();
            let c = leakage_bound_dof(k, 1_000_000, 0.0).unwrap();
            assert!(a > b && b > c, "K={k}");
        }
        assert!(leakage_bound_dof(2, 10, 0.0).unwrap() > leakage_bound_dof(2, 1, 0.0).unwrap());
        // Huge exponents must underflow cleanly, not blow up.
        let tiny = leakage_bound_dof(10, 1_000_000, 0.5).unwrap();
        assert!(tiny.is_finite() && tiny > 0.0 && tiny < 1e-4);
        assert!(leakage_bound_dof(2, 0, 0.1).is_err());
        assert!(leakage_bound_dof(2, 1, 1.0).is_err());
    }

    #[test]
    fn fano_bound_edges() {
        assert_eq!(fano_mi_lower_bound(5.0, 0.0, 3.0).unwrap(), 4.0);
        assert_eq!(fano_mi_lower_bound(3.0, 1.0, 3.0).unwrap(), 0.0);
        let h = 3.0f64.log2();
        assert!((fano_mi_lower_bound(h, 0.0, h).unwrap() - (h - 1.0)).abs() < 1e-15);
        assert!(fano_mi_lower_bound(1.0, 1.5, 1.0).is_err());
        assert!(fano_mi_lower_bound(-1.0, 0.5, 1.0).is_err());
    }

    proptest! {
        // Convolution preserves total mass and entropy never exceeds the
        // log of the support.
        #[test]
        fn convolution_mass_and_entropy_bounds(n in 0usize..=4, q in 0u32..=3) {
            let d = IntDist::uniform_sum(n, q).unwrap();
            let expect: u128 = (2 * q as u128 + 1).pow(n as u32);
            prop_assert_eq!(d.total(), expect);
            let h = d.entropy_bits();
            prop_assert!(h >= -1e-12);
            prop_assert!(h <= (d.support_len() as f64).log2() + 1e-12);
        }

        // The engine's entropy is monotone in the conditioning set: knowing
        // more blocks never raises conditional entropy.
        #[test]
        fn conditioning_more_never_raises_entropy(q in 1u32..=2) {
            let scheme = Scheme::new(2, 1, true).unwrap();
            let occ = scheme.occupancy(0).unwrap();
            let empty = ConditioningSet::empty(2).unwrap();
            let minus = ConditioningSet::all_messages_except(2, 1).unwrap();
            let all = ConditioningSet::all_messages(2).unwrap();
            let h_e = exact_conditional_entropy(&occ, &empty, q).unwrap();
            let h_m = exact_conditional_entropy(&occ, &minus, q).unwrap();
            let h_a = exact_conditional_entropy(&occ, &all, q).unwrap();
            prop_assert!(h_e >= h_m - 1e-12);
            prop_assert!(h_m >= h_a - 1e-12);
        }
    }
}
