//! The assembled transmission scheme for one system shape.
//!
//! A scheme fixes K, the exponent range m, and whether an eavesdropper is
//! modeled, then owns the shared dimension sets and every transmitter's
//! stream layout. Transmitter i sends K-1 message blocks, the block bound
//! for receiver j riding T_j, plus one jamming block riding its own T_i.
//! All downstream machinery (occupancy, decoding, leakage accounting) works
//! off one `Scheme` so the pieces can never disagree about stream order.

use std::sync::Arc;

use crate::channel::{validate_observer, validate_user, ChannelGains};
use crate::dimensions::{
    build_all_t, cardinality_formulas, occupancy_from_sets, CardinalityFormulas, DimensionSet,
    OccupancyMap,
};
use crate::signaling::{select_parameters, PowerParams, StreamLayout};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Scheme {
    k: usize,
    m: u32,
    eavesdropper: bool,
    formulas: CardinalityFormulas,
    t_sets: Vec<Arc<DimensionSet>>,
    layouts: Vec<StreamLayout>,
}

impl Scheme {
    pub fn new(k: usize, m: u32, eavesdropper: bool) -> Result<Self> {
        let formulas = cardinality_formulas(k, m, eavesdropper)?;
        let t_sets = build_all_t(k, m, eavesdropper)?;
        let layouts = (1..=k)
            .map(|tx| StreamLayout::from_sets(tx, k, &t_sets))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            m,
            eavesdropper,
            formulas,
            t_sets,
            layouts,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn eavesdropper(&self) -> bool {
        self.eavesdropper
    }

    pub fn cardinalities(&self) -> CardinalityFormulas {
        self.formulas
    }

    /// Streams per block, |T_i|, equal across users.
    pub fn dimension_cardinality(&self) -> usize {
        self.t_sets[0].len()
    }

    /// Streams per transmitter: K blocks of M streams each.
    pub fn streams_per_tx(&self) -> usize {
        self.k * self.dimension_cardinality()
    }

    /// Streams in the whole system.
    pub fn total_streams(&self) -> usize {
        self.k * self.streams_per_tx()
    }

    pub fn t_set(&self, user: usize) -> Result<&DimensionSet> {
        validate_user(self.k, user)?;
        Ok(self.t_sets[user - 1].as_ref())
    }

    pub fn layout(&self, tx: usize) -> Result<&StreamLayout> {
        validate_user(self.k, tx)?;
        Ok(&self.layouts[tx - 1])
    }

    pub fn layouts(&self) -> &[StreamLayout] {
        &self.layouts
    }

    /// Every observer index in canonical order: the eavesdropper (0) when
    /// modeled, then receivers 1..=K.
    pub fn observers(&self) -> Vec<usize> {
        let mut obs = Vec::with_capacity(self.k + 1);
        if self.eavesdropper {
            obs.push(0);
        }
        obs.extend(1..=self.k);
        obs
    }

    pub fn validate_observer(&self, observer: usize) -> Result<()> {
        validate_observer(self.k, observer, self.eavesdropper)
    }

    /// Exact stream placement at one observer.
    pub fn occupancy(&self, observer: usize) -> Result<OccupancyMap> {
        occupancy_from_sets(&self.t_sets, self.k, observer, self.eavesdropper)
    }

    /// Power parameters for this scheme under the given gains, using the
    /// receiver dimension budget as the resolution exponent.
    pub fn select_parameters(
        &self,
        power: f64,
        delta: f64,
        gains: &ChannelGains,
    ) -> Result<PowerParams> {
        if gains.k() != self.k || gains.eavesdropper() != self.eavesdropper {
            return Err(Error::InvalidArgument(
                "channel gains were sampled for a different system shape".into(),
            ));
        }
        select_parameters(power, delta, self.formulas.m_r, gains, &self.layouts)
    }
}
