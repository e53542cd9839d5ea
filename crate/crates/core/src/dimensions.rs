//! Monomial dimension sets and receiver occupancy bookkeeping.
//!
//! Every stream in the scheme rides on a dimension: a monomial in the channel
//! gains with bounded exponents. The structured set T_i collects all products
//! of user i's direct gain, every cross gain and every eavesdropper tap with
//! exponents in 1..=m. T_i deliberately contains powers of h(i,i) and of no
//! other direct gain; that asymmetry is what keeps user i's desired streams
//! separable from all interference at receiver i. Multiplying a set by one
//! more gain symbol models propagation through that link, and the union of
//! every shifted set a receiver can see is the dimension budget M_R entering
//! the rate denominator.
//!
//! Everything here is exact arithmetic on canonical monomials. Cardinalities
//! and intersections are computed by real set operations and only compared
//! against closed forms in tests; numeric evaluation against sampled gains
//! exists as a diagnostic for the rational-independence assumption.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::channel::{
    canonical_symbols, tx_to_observer, validate_k, validate_observer, validate_user, ChannelGains,
    GainSymbol,
};
use crate::{Error, Result};

/// Hard ceiling on the number of monomials any single enumeration may
/// materialize or walk. Keeps accidental K/m blowups from exhausting memory.
pub const ENUMERATION_CAP: u128 = 100_000_000;

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// A product of gain symbols raised to positive exponents, in canonical form:
/// factors sorted by symbol, no zero exponents stored, the empty product
/// meaning 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<(GainSymbol, u32)>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Self { exps: Vec::new() }
    }

    /// Canonicalizes an arbitrary factor list: merges duplicate symbols and
    /// drops zero exponents.
    pub fn from_exponents<I: IntoIterator<Item = (GainSymbol, u32)>>(factors: I) -> Self {
        let mut exps: Vec<(GainSymbol, u32)> = Vec::new();
        for (sym, e) in factors {
            if e == 0 {
                continue;
            }
            match exps.binary_search_by_key(&sym, |p| p.0) {
                Ok(i) => exps[i].1 += e,
                Err(i) => exps.insert(i, (sym, e)),
            }
        }
        Self { exps }
    }

    /// Already-canonical factors, callers guarantee sortedness and positivity.
    pub(crate) fn from_sorted_unchecked(exps: Vec<(GainSymbol, u32)>) -> Self {
        debug_assert!(exps.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(exps.iter().all(|&(_, e)| e > 0));
        Self { exps }
    }

    /// This monomial multiplied by one more gain symbol.
    pub fn times_symbol(&self, sym: GainSymbol) -> Self {
        let mut exps = self.exps.clone();
        match exps.binary_search_by_key(&sym, |p| p.0) {
            Ok(i) => exps[i].1 += 1,
            Err(i) => exps.insert(i, (sym, 1)),
        }
        Self { exps }
    }

    /// Exponent of `sym`, zero when absent.
    pub fn exponent(&self, sym: GainSymbol) -> u32 {
        self.exps
            .binary_search_by_key(&sym, |p| p.0)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn exponents(&self) -> &[(GainSymbol, u32)] {
        &self.exps
    }

    pub fn factor_count(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e as u64).sum()
    }

    /// Numeric value of the monomial under the given gains.
    pub fn evaluate(&self, gains: &ChannelGains) -> Result<f64> {
        let mut v = 1.0;
        for &(sym, e) in &self.exps {
            v *= gains.value(sym)?.powi(e as i32);
        }
        Ok(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (i, (sym, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{sym}^{e}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Product enumeration
// ---------------------------------------------------------------------------

/// Streams the full exponent box over sorted symbol slots in ascending
/// monomial order, the last slot varying fastest.
struct ProductIter {
    slots: Vec<(GainSymbol, u32, u32)>,
    exps: Vec<u32>,
    done: bool,
}

impl ProductIter {
    fn new(slots: Vec<(GainSymbol, u32, u32)>) -> Self {
        debug_assert!(slots.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(slots.iter().all(|&(_, lo, hi)| lo >= 1 && lo <= hi));
        let exps = slots.iter().map(|&(_, lo, _)| lo).collect();
        Self {
            slots,
            exps,
            done: false,
        }
    }

    fn combination_count(slots: &[(GainSymbol, u32, u32)]) -> Option<u128> {
        let mut n: u128 = 1;
        for &(_, lo, hi) in slots {
            n = n.checked_mul((hi - lo + 1) as u128)?;
        }
        Some(n)
    }
}

impl Iterator for ProductIter {
    type Item = Monomial;

    fn next(&mut self) -> Option<Monomial> {
        if self.done {
            return None;
        }
        let mono = Monomial::from_sorted_unchecked(
            self.slots
                .iter()
                .zip(&self.exps)
                .map(|(&(sym, _, _), &e)| (sym, e))
                .collect(),
        );
        // Odometer step.
        let mut i = self.slots.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.exps[i] < self.slots[i].2 {
                self.exps[i] += 1;
                break;
            }
            self.exps[i] = self.slots[i].1;
        }
        Some(mono)
    }
}

// ---------------------------------------------------------------------------
// Dimension sets
// ---------------------------------------------------------------------------

/// What a dimension set stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetLabel {
    /// T_i with exponents 1..=m.
    Base { user: usize },
    /// The widened box with exponents 1..=m+1.
    Extended { user: usize },
    /// Another set multiplied by one gain symbol.
    Shifted { base: Box<SetLabel>, by: GainSymbol },
    /// A hand-built product set.
    Custom,
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetLabel::Base { user } => write!(f, "T_{user}"),
            SetLabel::Extended { user } => write!(f, "T~_{user}"),
            SetLabel::Shifted { base, by } => write!(f, "{by}*{base}"),
            SetLabel::Custom => write!(f, "custom"),
        }
    }
}

/// A finite set of monomials, stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionSet {
    label: SetLabel,
    members: Vec<Monomial>,
}

impl DimensionSet {
    /// Full exponent box: every listed generator raised to each exponent in
    /// 1..=max_exponent. Generators must be distinct.
    pub fn product(
        label: SetLabel,
        generators: &[GainSymbol],
        max_exponent: u32,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument(
                "a product set needs at least one generator".into(),
            ));
        }
        if max_exponent == 0 {
            return Err(Error::InvalidArgument(
                "exponent range must include at least 1".into(),
            ));
        }
        let mut slots: Vec<(GainSymbol, u32, u32)> =
            generators.iter().map(|&g| (g, 1, max_exponent)).collect();
        slots.sort_by_key(|p| p.0);
        if slots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "generator list contains duplicates".into(),
            ));
        }
        let needed = ProductIter::combination_count(&slots).unwrap_or(u128::MAX);
        if needed > ENUMERATION_CAP {
            return Err(Error::BudgetExceeded {
                needed,
                budget: ENUMERATION_CAP,
            });
        }
        let members: Vec<Monomial> = ProductIter::new(slots).collect();
        debug_assert!(members.is_sorted());
        Ok(Self { label, members })
    }

    /// Wraps explicit members, canonicalizing order and duplicates.
    pub fn from_members(label: SetLabel, mut members: Vec<Monomial>) -> Self {
        members.sort();
        members.dedup();
        Self { label, members }
    }

    pub fn label(&self) -> &SetLabel {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Monomial] {
        &self.members
    }

    pub fn contains(&self, mono: &Monomial) -> bool {
        self.members.binary_search(mono).is_ok()
    }

    /// The set multiplied elementwise by one gain symbol. Cardinality is
    /// preserved, multiplication by a fixed monomial is injective.
    pub fn shift(&self, sym: GainSymbol) -> DimensionSet {
        let mut members: Vec<Monomial> =
            self.members.iter().map(|m| m.times_symbol(sym)).collect();
        if !members.is_sorted() {
            members.sort();
        }
        DimensionSet {
            label: SetLabel::Shifted {
                base: Box::new(self.label.clone()),
                by: sym,
            },
            members,
        }
    }

    /// Exact intersection size via a sorted merge walk.
    pub fn intersection_len(&self, other: &DimensionSet) -> usize {
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn is_disjoint(&self, other: &DimensionSet) -> bool {
        self.intersection_len(other) == 0
    }

    pub fn is_subset_of(&self, other: &DimensionSet) -> bool {
        let (a, b) = (&self.members, &other.members);
        let mut j = 0;
        for m in a {
            while j < b.len() && b[j] < *m {
                j += 1;
            }
            if j == b.len() || b[j] != *m {
                return false;
            }
            j += 1;
        }
        true
    }

    /// Member values under the given gains, in member order.
    pub fn evaluate(&self, gains: &ChannelGains) -> Result<Vec<f64>> {
        self.members.iter().map(|m| m.evaluate(gains)).collect()
    }
}

/// Generator list of T_i: the user's direct gain, every cross gain, and when
/// an eavesdropper is present every eavesdropper tap. Sorted canonically.
pub fn t_generators(k: usize, user: usize, eavesdropper: bool) -> Result<Vec<GainSymbol>> {
    validate_k(k)?;
    validate_user(k, user)?;
    let gens: Vec<GainSymbol> = canonical_symbols(k, eavesdropper)?
        .into_iter()
        .filter(|sym| match sym {
            GainSymbol::Direct(i) => *i as usize == user,
            GainSymbol::Cross(_, _) => true,
            GainSymbol::Eave(_) => true,
        })
        .collect();
    Ok(gens)
}

/// The structured set T_i: exponents 1..=m over user i's generator list.
pub fn build_t(k: usize, m: u32, user: usize, eavesdropper: bool) -> Result<DimensionSet> {
    validate_m(m)?;
    let gens = t_generators(k, user, eavesdropper)?;
    DimensionSet::product(SetLabel::Base { user }, &gens, m)
}

/// The widened box with exponents 1..=m+1. It contains T_i together with
/// every single-symbol shift of T_i by one of its own generators.
pub fn build_t_extended(
    k: usize,
    m: u32,
    user: usize,
    eavesdropper: bool,
) -> Result<DimensionSet> {
    validate_m(m)?;
    let gens = t_generators(k, user, eavesdropper)?;
    DimensionSet::product(SetLabel::Extended { user }, &gens, m + 1)
}

fn validate_m(m: u32) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("exponent range m must be >= 1".into()))
    }
}

// ---------------------------------------------------------------------------
// Closed-form counts
// ---------------------------------------------------------------------------

/// Closed-form cardinalities implied by the box structure. These are the
/// reference values the enumerating operations are tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CardinalityFormulas {
    /// Number of generators per set.
    pub generator_count: u32,
    /// |T_i| = m^G.
    pub m_cardinality: u128,
    /// Pairwise alignment overlap |h*T_k meet h'*T_k| = m^(G-2) (m-1)^2.
    pub m_delta: u128,
    /// Receiver dimension budget (K-1) m^G + K (m+1)^G.
    pub m_r: u128,
}

/// Evaluates the closed forms, erring on arithmetic overflow.
pub fn cardinality_formulas(k: usize, m: u32, eavesdropper: bool) -> Result<CardinalityFormulas> {
    validate_k(k)?;
    validate_m(m)?;
    let g = 1 + k * (k - 1) + if eavesdropper { k } else { 0 };
    let g: u32 = g
        .try_into()
        .map_err(|_| Error::InvalidArgument("generator count overflow".into()))?;
    let overflow = || Error::InvalidArgument("cardinality formula overflows u128".into());
    let m128 = m as u128;
    let m_cardinality = m128.checked_pow(g).ok_or_else(overflow)?;
    let m_delta = m128
        .checked_pow(g - 2)
        .and_then(|x| x.checked_mul(((m - 1) as u128).pow(2)))
        .ok_or_else(overflow)?;
    let ext = (m128 + 1).checked_pow(g).ok_or_else(overflow)?;
    let m_r = m_cardinality
        .checked_mul((k - 1) as u128)
        .and_then(|x| x.checked_add(ext.checked_mul(k as u128)?))
        .ok_or_else(overflow)?;
    Ok(CardinalityFormulas {
        generator_count: g,
        m_cardinality,
        m_delta,
        m_r,
    })
}

/// Size of the overlap between the two shifted copies of T_k that meet at
/// observer `j`: the copy carrying transmitter i's stream block and the copy
/// carrying transmitter k's jamming block. Computed by actual set
/// intersection over the unified construction (eavesdropper taps included).
/// Observer 0 is the eavesdropper; a receiver index must avoid i and k so
/// that both shifts use generators of T_k.
pub fn intersection_count(
    k: usize,
    m: u32,
    tx_i: usize,
    set_k: usize,
    observer_j: usize,
) -> Result<u64> {
    validate_k(k)?;
    validate_m(m)?;
    validate_user(k, tx_i)?;
    validate_user(k, set_k)?;
    if tx_i == set_k {
        return Err(Error::InvalidArgument(
            "transmitter and set indices must differ".into(),
        ));
    }
    if observer_j != 0 {
        validate_user(k, observer_j)?;
        if observer_j == tx_i || observer_j == set_k {
            return Err(Error::InvalidArgument(format!(
                "receiver {observer_j} clashes with indices ({tx_i}, {set_k}); use the eavesdropper or a third receiver"
            )));
        }
    }
    let t_k = build_t(k, m, set_k, true)?;
    let via_i = t_k.shift(tx_to_observer(tx_i, observer_j));
    let via_k = t_k.shift(tx_to_observer(set_k, observer_j));
    Ok(via_i.intersection_len(&via_k) as u64)
}

// ---------------------------------------------------------------------------
// Receiver occupancy
// ---------------------------------------------------------------------------

/// The blocks transmitter `tx` sends: one message block per other user in
/// ascending slot order, then the jamming block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    /// Message sub-stream block riding dimension set T_slot.
    Message { slot: usize },
    /// Jamming block riding the transmitter's own T.
    Jamming,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::Message { slot } => write!(f, "v[{slot}]"),
            BlockKind::Jamming => write!(f, "u"),
        }
    }
}

/// Block order used everywhere a transmitter's streams are laid out flat.
pub(crate) fn transmitter_blocks(k: usize, tx: usize) -> Vec<BlockKind> {
    let mut blocks: Vec<BlockKind> = (1..=k)
        .filter(|slot| *slot != tx)
        .map(|slot| BlockKind::Message { slot })
        .collect();
    blocks.push(BlockKind::Jamming);
    blocks
}

/// Which dimension set a block rides.
pub(crate) fn block_set_user(tx: usize, block: BlockKind) -> usize {
    match block {
        BlockKind::Message { slot } => slot,
        BlockKind::Jamming => tx,
    }
}

/// One stream: a transmitter, a block, and a position inside the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StreamId {
    pub tx: usize,
    pub block: BlockKind,
    pub index: usize,
}

/// Exact map from every occupied dimension at one observer to the streams
/// landing on it.
#[derive(Clone, Debug)]
pub struct OccupancyMap {
    observer: usize,
    entries: BTreeMap<Monomial, Vec<StreamId>>,
    stream_total: usize,
}

impl OccupancyMap {
    pub fn observer(&self) -> usize {
        self.observer
    }

    /// Number of distinct occupied dimensions.
    pub fn dimension_count(&self) -> usize {
        self.entries.len()
    }

    /// Total streams placed, K*K*M for a full system.
    pub fn stream_total(&self) -> usize {
        self.stream_total
    }

    /// Occupied dimensions in ascending monomial order.
    pub fn entries(&self) -> impl Iterator<Item = (&Monomial, &[StreamId])> {
        self.entries.iter().map(|(m, s)| (m, s.as_slice()))
    }

    pub fn streams_on(&self, mono: &Monomial) -> &[StreamId] {
        self.entries.get(mono).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Places every stream of the system at the given observer: transmitter i's
/// block riding T_s lands on T_s shifted by the gain of the link from i to
/// the observer, stream index pairing off with the set's member order.
pub fn receiver_occupancy(
    k: usize,
    m: u32,
    observer: usize,
    eavesdropper: bool,
) -> Result<OccupancyMap> {
    let sets = build_all_t(k, m, eavesdropper)?;
    occupancy_from_sets(&sets, k, observer, eavesdropper)
}

pub(crate) fn build_all_t(
    k: usize,
    m: u32,
    eavesdropper: bool,
) -> Result<Vec<std::sync::Arc<DimensionSet>>> {
    (1..=k)
        .map(|u| build_t(k, m, u, eavesdropper).map(std::sync::Arc::new))
        .collect()
}

pub(crate) fn occupancy_from_sets(
    t_sets: &[std::sync::Arc<DimensionSet>],
    k: usize,
    observer: usize,
    eavesdropper: bool,
) -> Result<OccupancyMap> {
    validate_k(k)?;
    validate_observer(k, observer, eavesdropper)?;
    debug_assert_eq!(t_sets.len(), k);
    let per_set = t_sets[0].len();
    let total = k
        .checked_mul(k)
        .and_then(|x| x.checked_mul(per_set))
        .ok_or_else(|| Error::InvalidArgument("stream count overflow".into()))?;
    if total as u128 > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded {
            needed: total as u128,
            budget: ENUMERATION_CAP,
        });
    }
    let mut entries: BTreeMap<Monomial, Vec<StreamId>> = BTreeMap::new();
    for tx in 1..=k {
        let link = tx_to_observer(tx, observer);
        for block in transmitter_blocks(k, tx) {
            let set = &t_sets[block_set_user(tx, block) - 1];
            for (index, mono) in set.members().iter().enumerate() {
                let dim = mono.times_symbol(link);
                let slot = entries.entry(dim).or_default();
                // One stream per transmitter per dimension: a transmitter's
                // blocks ride pairwise disjoint sets through a common shift.
                debug_assert!(slot.iter().all(|s| s.tx != tx));
                slot.push(StreamId { tx, block, index });
            }
        }
    }
    Ok(OccupancyMap {
        observer,
        entries,
        stream_total: total,
    })
}

/// Exact cardinality of the union of everything receiver `observer` can see:
/// the K-1 desired shifted sets plus every widened box. Streamed with a
/// sorted multi-way merge, nothing is materialized.
pub fn receiver_dimension_budget(
    k: usize,
    m: u32,
    observer: usize,
    eavesdropper: bool,
) -> Result<u64> {
    validate_k(k)?;
    validate_m(m)?;
    validate_user(k, observer)?;
    let formulas = cardinality_formulas(k, m, eavesdropper)?;
    if formulas.m_r > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded {
            needed: formulas.m_r,
            budget: ENUMERATION_CAP,
        });
    }
    let mut ways: Vec<std::iter::Peekable<ProductIter>> = Vec::new();
    let direct = GainSymbol::Direct(observer as u8);
    for slot in 1..=k {
        if slot == observer {
            continue;
        }
        let mut slots: Vec<(GainSymbol, u32, u32)> = t_generators(k, slot, eavesdropper)?
            .into_iter()
            .map(|g| (g, 1, m))
            .collect();
        let at = slots
            .binary_search_by_key(&direct, |p| p.0)
            .expect_err("another user's direct gain is never a T generator");
        slots.insert(at, (direct, 1, 1));
        ways.push(ProductIter::new(slots).peekable());
    }
    for user in 1..=k {
        let slots: Vec<(GainSymbol, u32, u32)> = t_generators(k, user, eavesdropper)?
            .into_iter()
            .map(|g| (g, 1, m + 1))
            .collect();
        ways.push(ProductIter::new(slots).peekable());
    }
    let mut count: u64 = 0;
    loop {
        let mut min: Option<Monomial> = None;
        for way in ways.iter_mut() {
            if let Some(peek) = way.peek() {
                if min.as_ref().map_or(true, |m| peek < m) {
                    min = Some(peek.clone());
                }
            }
        }
        let Some(min) = min else { break };
        count += 1;
        for way in ways.iter_mut() {
            while way.peek() == Some(&min) {
                way.next();
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Separability and numeric diagnostics
// ---------------------------------------------------------------------------

/// Set-level verdicts for one receiver: its desired blocks must be pairwise
/// disjoint and disjoint from every interference and jamming block.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparabilityReport {
    pub observer: usize,
    pub desired_pairwise_disjoint: bool,
    pub desired_disjoint_from_rest: bool,
    pub occupied_dimensions: u64,
    pub dimension_budget: u128,
    pub occupied_within_budget: bool,
}

impl SeparabilityReport {
    pub fn all_ok(&self) -> bool {
        self.desired_pairwise_disjoint
            && self.desired_disjoint_from_rest
            && self.occupied_within_budget
    }
}

/// Runs the exact set-level separability checks at one receiver.
pub fn check_separability(
    k: usize,
    m: u32,
    receiver: usize,
    eavesdropper: bool,
) -> Result<SeparabilityReport> {
    validate_k(k)?;
    validate_m(m)?;
    validate_user(k, receiver)?;
    let sets = build_all_t(k, m, eavesdropper)?;
    let direct = GainSymbol::Direct(receiver as u8);
    let desired: Vec<DimensionSet> = (1..=k)
        .filter(|slot| *slot != receiver)
        .map(|slot| sets[slot - 1].shift(direct))
        .collect();
    let mut rest: Vec<DimensionSet> = Vec::new();
    for tx in 1..=k {
        let link = tx_to_observer(tx, receiver);
        for block in transmitter_blocks(k, tx) {
            if tx == receiver && matches!(block, BlockKind::Message { .. }) {
                continue;
            }
            rest.push(sets[block_set_user(tx, block) - 1].shift(link));
        }
    }
    let mut desired_pairwise = true;
    for a in 0..desired.len() {
        for b in (a + 1)..desired.len() {
            desired_pairwise &= desired[a].is_disjoint(&desired[b]);
        }
    }
    let mut desired_vs_rest = true;
    for d in &desired {
        for r in &rest {
            desired_vs_rest &= d.is_disjoint(r);
        }
    }
    let occupancy = occupancy_from_sets(&sets, k, receiver, eavesdropper)?;
    let occupied = occupancy.dimension_count() as u64;
    let budget = cardinality_formulas(k, m, eavesdropper)?.m_r;
    Ok(SeparabilityReport {
        observer: receiver,
        desired_pairwise_disjoint: desired_pairwise,
        desired_disjoint_from_rest: desired_vs_rest,
        occupied_dimensions: occupied,
        dimension_budget: budget,
        occupied_within_budget: (occupied as u128) <= budget,
    })
}

/// True when all member values are pairwise separated by more than
/// `tol * max|value|`. A diagnostic for the rational-independence assumption
/// behind treating dimensions as distinct.
pub fn numeric_distinctness(set: &DimensionSet, gains: &ChannelGains, tol: f64) -> Result<bool> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    let mut values = set.evaluate(gains)?;
    if values.len() < 2 {
        return Ok(true);
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite gain products"));
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(false);
    }
    Ok(values.windows(2).all(|w| w[1] - w[0] > tol * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym_d(i: u8) -> GainSymbol {
        GainSymbol::Direct(i)
    }
    fn sym_x(j: u8, k: u8) -> GainSymbol {
        GainSymbol::Cross(j, k)
    }
    fn sym_g(j: u8) -> GainSymbol {
        GainSymbol::Eave(j)
    }

    #[test]
    fn monomial_canonical_form_merges_and_drops() {
        let m = Monomial::from_exponents([
            (sym_x(2, 1), 1),
            (sym_d(1), 2),
            (sym_x(2, 1), 1),
            (sym_g(1), 0),
        ]);
        assert_eq!(m.exponents(), &[(sym_d(1), 2), (sym_x(2, 1), 2)]);
        assert_eq!(m.exponent(sym_g(1)), 0);
        assert_eq!(m.total_degree(), 4);
        assert_eq!(format!("{m}"), "h(1,1)^2*h(2,1)^2");
        assert_eq!(format!("{}", Monomial::one()), "1");
    }

    #[test]
    fn times_symbol_increments_exactly_one_exponent() {
        let base = Monomial::from_exponents([(sym_d(1), 1), (sym_g(2), 3)]);
        let bumped = base.times_symbol(sym_g(2));
        assert_eq!(bumped.exponent(sym_g(2)), 4);
        assert_eq!(bumped.exponent(sym_d(1)), 1);
        let widened = base.times_symbol(sym_x(1, 2));
        assert_eq!(widened.exponent(sym_x(1, 2)), 1);
        assert_eq!(widened.factor_count(), 3);
    }

    #[test]
    fn monomial_evaluate_is_the_product_of_powers() {
        let gains = ChannelGains::sample(2, true, 5).unwrap();
        let m = Monomial::from_exponents([(sym_d(1), 2), (sym_g(2), 1)]);
        let expect =
            gains.value(sym_d(1)).unwrap().powi(2) * gains.value(sym_g(2)).unwrap();
        assert_eq!(m.evaluate(&gains).unwrap(), expect);
        assert_eq!(Monomial::one().evaluate(&gains).unwrap(), 1.0);
    }

    #[test]
    fn base_set_shapes_at_small_sizes() {
        // K=2, m=1: a single monomial with every generator to the first power.
        let t1 = build_t(2, 1, 1, true).unwrap();
        assert_eq!(t1.len(), 1);
        let only = &t1.members()[0];
        for g in [sym_d(1), sym_x(1, 2), sym_x(2, 1), sym_g(1), sym_g(2)] {
            assert_eq!(only.exponent(g), 1);
        }
        assert_eq!(only.exponent(sym_d(2)), 0);
        // Cardinality law |T_i| = m^G across small shapes, every user.
        for k in [2usize, 3] {
            for m in 1u32..=3 {
                for eave in [false, true] {
                    let f = cardinality_formulas(k, m, eave).unwrap();
                    for user in 1..=k {
                        let t = build_t(k, m, user, eave).unwrap();
                        assert_eq!(t.len() as u128, f.m_cardinality, "K={k} m={m} u={user}");
                    }
                }
            }
        }
        // Frozen spot values: G = K^2+1 with the eavesdropper.
        assert_eq!(build_t(2, 2, 2, true).unwrap().len(), 32);
        assert_eq!(build_t(3, 2, 1, true).unwrap().len(), 1024);
        assert_eq!(build_t(3, 2, 1, false).unwrap().len(), 128);
    }

    #[test]
    fn base_sets_of_different_users_are_disjoint() {
        for m in 1u32..=3 {
            let t1 = build_t(2, m, 1, true).unwrap();
            let t2 = build_t(2, m, 2, true).unwrap();
            assert!(t1.is_disjoint(&t2));
        }
    }

    #[test]
    fn extended_set_contains_base_and_all_generator_shifts() {
        let t1 = build_t(2, 1, 1, true).unwrap();
        let ext = build_t_extended(2, 1, 1, true).unwrap();
        assert_eq!(ext.len(), 32);
        assert!(t1.is_subset_of(&ext));
        for g in t_generators(2, 1, true).unwrap() {
            assert!(t1.shift(g).is_subset_of(&ext), "shift by {g}");
        }
    }

    #[test]
    fn cross_shift_of_base_lands_in_extended() {
        let t1 = build_t(3, 2, 1, true).unwrap();
        let ext = build_t_extended(3, 2, 1, true).unwrap();
        assert!(t1.shift(sym_x(2, 1)).is_subset_of(&ext));
        assert_eq!(t1.shift(sym_x(2, 1)).len(), t1.len());
    }

    #[test]
    fn four_generator_overlap_follows_the_square_law() {
        // Reduced two-shift picture over generators {h(1,1), h(2,1), h(1,3),
        // h(2,3)}: the overlap of the two shifted copies is m^2 (m-1)^2.
        let gens = [sym_d(1), sym_x(2, 1), sym_x(1, 3), sym_x(2, 3)];
        for (m, expect) in [(1u32, 0usize), (2, 4), (3, 36)] {
            let t = DimensionSet::product(SetLabel::Custom, &gens, m).unwrap();
            let a = t.shift(sym_d(1));
            let b = t.shift(sym_x(2, 1));
            assert_eq!(a.intersection_len(&b), expect, "m={m}");
        }
    }

    #[test]
    fn intersection_count_matches_the_closed_form() {
        assert_eq!(intersection_count(2, 2, 1, 2, 0).unwrap(), 8);
        assert_eq!(intersection_count(2, 1, 1, 2, 0).unwrap(), 0);
        assert_eq!(intersection_count(3, 3, 1, 2, 3).unwrap(), 26244);
        for k in [2usize, 3] {
            for m in 1u32..=2 {
                let f = cardinality_formulas(k, m, true).unwrap();
                for i in 1..=k {
                    for s in 1..=k {
                        if i == s {
                            continue;
                        }
                        for j in (0..=k).filter(|j| *j == 0 || (*j != i && *j != s)) {
                            assert_eq!(
                                intersection_count(k, m, i, s, j).unwrap() as u128,
                                f.m_delta,
                                "K={k} m={m} i={i} s={s} j={j}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intersection_count_rejects_index_clashes() {
        assert!(intersection_count(2, 2, 1, 1, 0).is_err());
        assert!(intersection_count(3, 2, 1, 2, 1).is_err());
        assert!(intersection_count(3, 2, 1, 2, 2).is_err());
        assert!(intersection_count(3, 2, 1, 2, 4).is_err());
        assert!(intersection_count(2, 2, 1, 2, 1).is_err());
    }

    #[test]
    fn occupancy_places_every_stream_exactly_once() {
        let occ = receiver_occupancy(3, 2, 1, true).unwrap();
        assert_eq!(occ.stream_total(), 9 * 1024);
        let mut seen = std::collections::BTreeSet::new();
        let mut placed = 0usize;
        for (_, streams) in occ.entries() {
            for s in streams {
                assert!(seen.insert(*s), "stream {s:?} placed twice");
                placed += 1;
            }
            let mut txs: Vec<usize> = streams.iter().map(|s| s.tx).collect();
            txs.dedup();
            assert_eq!(txs.len(), streams.len(), "transmitter repeated on a dim");
        }
        assert_eq!(placed, occ.stream_total());
        let budget = cardinality_formulas(3, 2, true).unwrap().m_r;
        assert!((occ.dimension_count() as u128) <= budget);
    }

    #[test]
    fn desired_dimensions_carry_exactly_one_stream_and_no_jamming() {
        let occ = receiver_occupancy(3, 2, 1, true).unwrap();
        let direct = sym_d(1);
        for slot in 2..=3usize {
            let t = build_t(3, 2, slot, true).unwrap();
            for mono in t.members() {
                let dim = mono.times_symbol(direct);
                let streams = occ.streams_on(&dim);
                assert_eq!(streams.len(), 1, "desired dim shared: {dim}");
                assert_eq!(streams[0].tx, 1);
                assert_eq!(streams[0].block, BlockKind::Message { slot });
            }
        }
    }

    #[test]
    fn eavesdropper_occupancy_uses_the_tap_links() {
        let occ = receiver_occupancy(2, 1, 0, true).unwrap();
        assert_eq!(occ.stream_total(), 4);
        assert_eq!(occ.dimension_count(), 4);
        for (mono, _) in occ.entries() {
            let eave_deg: u32 = (1u8..=2).map(|j| mono.exponent(sym_g(j))).sum();
            assert_eq!(eave_deg, 3, "one tap shift on top of the base taps");
        }
        assert!(receiver_occupancy(2, 1, 0, false).is_err());
    }

    #[test]
    fn receiver_budget_enumeration_matches_the_closed_form() {
        assert_eq!(receiver_dimension_budget(2, 2, 1, true).unwrap(), 518);
        assert_eq!(receiver_dimension_budget(3, 2, 1, true).unwrap(), 179_195);
        for k in [2usize, 3] {
            for m in 1u32..=2 {
                let f = cardinality_formulas(k, m, true).unwrap();
                for j in 1..=k {
                    assert_eq!(
                        receiver_dimension_budget(k, m, j, true).unwrap() as u128,
                        f.m_r,
                        "K={k} m={m} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn separability_holds_at_every_receiver() {
        for k in [2usize, 3] {
            for m in 1u32..=2 {
                for receiver in 1..=k {
                    let rep = check_separability(k, m, receiver, true).unwrap();
                    assert!(rep.all_ok(), "K={k} m={m} j={receiver}: {rep:?}");
                }
            }
        }
    }

    #[test]
    fn generic_gains_keep_dimension_values_distinct() {
        let t1 = build_t(2, 2, 1, true).unwrap();
        for seed in 0..100u64 {
            let gains = ChannelGains::sample(2, true, seed).unwrap();
            assert!(numeric_distinctness(&t1, &gains, 1e-12).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn constructed_gain_collision_is_detected() {
        let mut values = std::collections::BTreeMap::new();
        for sym in canonical_symbols(2, true).unwrap() {
            values.insert(sym, 1.25);
        }
        values.insert(sym_d(1), 0.75);
        values.insert(sym_d(2), 1.5);
        // h(1,2) = h(2,1) makes h(1,2)^2*h(2,1) collide with h(1,2)*h(2,1)^2.
        let gains = ChannelGains::from_values(2, true, values).unwrap();
        let t1 = build_t(2, 2, 1, true).unwrap();
        assert!(!numeric_distinctness(&t1, &gains, 1e-12).unwrap());
    }

    #[test]
    fn distinctness_rejects_nonpositive_tolerance() {
        let t1 = build_t(2, 1, 1, true).unwrap();
        let gains = ChannelGains::sample(2, true, 0).unwrap();
        assert!(numeric_distinctness(&t1, &gains, 0.0).is_err());
        assert!(numeric_distinctness(&t1, &gains, -1.0).is_err());
    }

    #[test]
    fn product_rejects_degenerate_inputs() {
        assert!(DimensionSet::product(SetLabel::Custom, &[], 2).is_err());
        assert!(DimensionSet::product(SetLabel::Custom, &[sym_d(1)], 0).is_err());
        assert!(
            DimensionSet::product(SetLabel::Custom, &[sym_d(1), sym_d(1)], 2).is_err()
        );
    }

    proptest! {
        // Shifting never changes cardinality and bumps exactly the shift
        // symbol's exponent on every member.
        #[test]
        fn shift_is_injective_and_exponent_exact(
            m in 1u32..=3,
            pick in 0usize..4,
        ) {
            let gens = [sym_d(1), sym_x(1, 2), sym_x(2, 1), sym_g(2)];
            let by = gens[pick];
            let t = DimensionSet::product(SetLabel::Custom, &gens, m).unwrap();
            let shifted = t.shift(by);
            prop_assert_eq!(shifted.len(), t.len());
            for (a, b) in t.members().iter().zip(shifted.members()) {
                prop_assert_eq!(a.exponent(by) + 1, b.exponent(by));
            }
        }

        // The union budget never exceeds the formula and the formula is
        // attained, streamed count equals closed form.
        #[test]
        fn budget_matches_formula_on_random_small_shapes(
            k in 2usize..=3,
            m in 1u32..=2,
        ) {
            let f = cardinality_formulas(k, m, true).unwrap();
            let n = receiver_dimension_budget(k, m, 1, true).unwrap();
            prop_assert_eq!(n as u128, f.m_r);
        }
    }
}
