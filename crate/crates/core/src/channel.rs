//! Channel gains and the linear Gaussian channel.
//!
//! A K-user system carries one direct gain per user (transmitter i to receiver
//! i), K(K-1) cross gains (transmitter j to receiver k for j != k) and, when
//! an external eavesdropper is present, one tap per transmitter to the
//! eavesdropper's observation. Each observer sees the matching linear
//! combination of the channel inputs plus Gaussian noise. The alignment
//! machinery relies on the gains being nonzero and, for the counting
//! arguments, rationally independent; sampled magnitudes in [0.5, 2.0) with
//! random signs give that with probability one while keeping every link
//! numerically well conditioned.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest supported number of users. Everything here is exhaustive
/// bookkeeping, so the cap is generous rather than tight.
pub const MAX_USERS: usize = 64;

/// One channel coefficient, named by its role. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GainSymbol {
    /// Transmitter i to receiver i.
    Direct(u8),
    /// Transmitter j to receiver k, j != k.
    Cross(u8, u8),
    /// Transmitter j to the eavesdropper.
    Eave(u8),
}

impl GainSymbol {
    /// Transmitter index this coefficient originates from.
    pub fn tx(self) -> usize {
        match self {
            GainSymbol::Direct(i) => i as usize,
            GainSymbol::Cross(j, _) => j as usize,
            GainSymbol::Eave(j) => j as usize,
        }
    }

}

impl fmt::Display for GainSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GainSymbol::Direct(i) => write!(f, "h({i},{i})"),
            GainSymbol::Cross(j, k) => write!(f, "h({j},{k})"),
            GainSymbol::Eave(j) => write!(f, "g({j})"),
        }
    }
}

/// All gain symbols of a K-user system in canonical order: direct gains by
/// user, cross gains sorted by (transmitter, receiver), then eavesdropper
/// taps by transmitter. The order matches the derived `Ord` on `GainSymbol`.
pub fn canonical_symbols(k: usize, eavesdropper: bool) -> Result<Vec<GainSymbol>> {
    validate_k(k)?;
    let mut out = Vec::with_capacity(k * k + if eavesdropper { k } else { 0 });
    for i in 1..=k {
        out.push(GainSymbol::Direct(i as u8));
    }
    for j in 1..=k {
        for r in 1..=k {
            if j != r {
                out.push(GainSymbol::Cross(j as u8, r as u8));
            }
        }
    }
    if eavesdropper {
        for j in 1..=k {
            out.push(GainSymbol::Eave(j as u8));
        }
    }
    debug_assert!(out.is_sorted());
    Ok(out)
}

/// The gain symbol on the link from `tx` to `observer`, with observer 0 being
/// the eavesdropper.
pub fn tx_to_observer(tx: usize, observer: usize) -> GainSymbol {
    if observer == 0 {
        GainSymbol::Eave(tx as u8)
    } else if tx == observer {
        GainSymbol::Direct(tx as u8)
    } else {
        GainSymbol::Cross(tx as u8, observer as u8)
    }
}

pub(crate) fn validate_k(k: usize) -> Result<()> {
    if (2..=MAX_USERS).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidConfiguration(format!(
            "user count must be in 2..={MAX_USERS}, got {k}"
        )))
    }
}

pub(crate) fn validate_user(k: usize, user: usize) -> Result<()> {
    if (1..=k).contains(&user) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "user index {user} is outside 1..={k}"
        )))
    }
}

pub(crate) fn validate_observer(k: usize, observer: usize, eavesdropper: bool) -> Result<()> {
    if observer == 0 {
        if eavesdropper {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "observer 0 refers to the eavesdropper, but the system has none".into(),
            ))
        }
    } else {
        validate_user(k, observer)
    }
}

/// A full draw of channel coefficients for one K-user system.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelGains {
    k: usize,
    eavesdropper: bool,
    values: BTreeMap<GainSymbol, f64>,
}

impl ChannelGains {
    /// Samples every coefficient of the system deterministically from `seed`:
    /// magnitude uniform in [0.5, 2.0), sign fair, drawn in canonical symbol
    /// order. Identical seeds give identical gains.
    pub fn sample(k: usize, eavesdropper: bool, seed: u64) -> Result<Self> {
        let symbols = canonical_symbols(k, eavesdropper)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = BTreeMap::new();
        for sym in symbols {
            let magnitude: f64 = rng.gen_range(0.5..2.0);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            values.insert(sym, sign * magnitude);
        }
        Ok(Self {
            k,
            eavesdropper,
            values,
        })
    }

    /// Builds gains from explicit values. The map must contain exactly the
    /// canonical symbol set of the system, all finite and nonzero.
    pub fn from_values(
        k: usize,
        eavesdropper: bool,
        values: BTreeMap<GainSymbol, f64>,
    ) -> Result<Self> {
        let symbols = canonical_symbols(k, eavesdropper)?;
        if values.len() != symbols.len() {
            return Err(Error::InvalidConfiguration(format!(
                "expected {} gain values, got {}",
                symbols.len(),
                values.len()
            )));
        }
        for sym in &symbols {
            match values.get(sym) {
                None => {
                    return Err(Error::InvalidConfiguration(format!(
                        "missing gain value for {sym}"
                    )))
                }
                Some(v) if !v.is_finite() || *v == 0.0 => {
                    return Err(Error::InvalidConfiguration(format!(
                        "gain {sym} must be finite and nonzero, got {v}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(Self {
            k,
            eavesdropper,
            values,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eavesdropper(&self) -> bool {
        self.eavesdropper
    }

    /// Number of observers whose outputs `apply_channel` produces.
    pub fn observer_count(&self) -> usize {
        self.k + usize::from(self.eavesdropper)
    }

    pub fn gain_count(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, sym: GainSymbol) -> Result<f64> {
        self.values.get(&sym).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("gain {sym} is not part of this system"))
        })
    }

    /// Coefficients in canonical symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (&GainSymbol, &f64)> {
        self.values.iter()
    }
}

/// Power constraint, noise level and seed for one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Per-transmitter power ceiling, E[X^2] <= power.
    pub power: f64,
    /// Standard deviation of the additive noise at every observer.
    pub noise_std: f64,
    /// Seed all randomness of the experiment derives from.
    pub seed: u64,
}

impl LinkConfig {
    pub fn new(power: f64, noise_std: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            power,
            noise_std,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "power must be positive and finite, got {}",
                self.power
            )));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "noise_std must be nonnegative and finite, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// Applies the channel to one vector of transmitter outputs. The result holds
/// the K receiver observations in user order, followed by the eavesdropper's
/// observation when the system has one. With `noise_std == 0` the outputs are
/// the exact linear combinations; power is the encoder's concern and is not
/// consulted here.
pub fn apply_channel<R: Rng>(
    gains: &ChannelGains,
    inputs: &[f64],
    cfg: &LinkConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if inputs.len() != gains.k() {
        return Err(Error::InvalidArgument(format!(
            "expected {} channel inputs, got {}",
            gains.k(),
            inputs.len()
        )));
    }
    if inputs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "channel inputs must be finite".into(),
        ));
    }
    let mut observers: Vec<usize> = (1..=gains.k()).collect();
    if gains.eavesdropper() {
        observers.push(0);
    }
    let mut out = Vec::with_capacity(observers.len());
    for observer in observers {
        let mut y = 0.0;
        for (tx, x) in inputs.iter().enumerate() {
            y += gains.value(tx_to_observer(tx + 1, observer))? * x;
        }
        if cfg.noise_std > 0.0 {
            let n: f64 = rng.sample(StandardNormal);
            y += cfg.noise_std * n;
        }
        out.push(y);
    }
    Ok(out)
}
