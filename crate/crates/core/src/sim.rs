//! Deterministic Monte Carlo experiments: full-scheme decoding error rates
//! at receiver 1 and the single-stream PAM reliability sweep.
//!
//! Reproducibility contract: every trial draws from its own counter-derived
//! generator, so results depend only on (seed, trial index) and never on
//! execution order or worker count. Stream 0 of the seed is reserved for
//! gain sampling; trials use streams 1 and up.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::analysis::dof_slope;
use crate::channel::{apply_channel, ChannelGains, LinkConfig};
use crate::receiver::{DecodeResult, DecoderContext, MinDistanceMode, MinDistanceReport};
use crate::scheme::Scheme;
use crate::secrecy::fano_mi_lower_bound;
use crate::signaling::{encode, p2p_parameters, random_symbols, PowerParams};
use crate::{Error, Result};

/// Generator for one trial: seed picks the key, trial+1 picks the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

/// How the PAM range is chosen per power point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum QMode {
    /// One fixed range for every power.
    Explicit(u32),
    /// Power-dependent range from the resolution rule.
    Derived { delta: f64 },
}

/// Full-scheme error-rate experiment at receiver 1.
#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub k: usize,
    pub m: u32,
    pub eavesdropper: bool,
    pub q_mode: QMode,
    pub power_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub noise_std: f64,
    /// Cap on nearest-point candidates, (2Q+1)^streams.
    pub decode_budget: u128,
    /// Cap for exact minimum-distance enumeration; larger constellations
    /// fall back to pair sampling.
    pub dmin_budget: u128,
    pub dmin_pairs: u64,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.power_grid.is_empty() {
            return Err(Error::InvalidConfiguration("empty power grid".into()));
        }
        for &p in &self.power_grid {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "powers must be positive and finite, got {p}"
                )));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfiguration("trials must be at least 1".into()));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "noise level must be nonnegative and finite, got {}",
                self.noise_std
            )));
        }
        if let QMode::Derived { delta } = self.q_mode {
            if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "delta must lie strictly inside (0, 1), got {delta}"
                )));
            }
        }
        if self.dmin_pairs == 0 {
            return Err(Error::InvalidConfiguration(
                "sampled minimum distance needs at least one pair".into(),
            ));
        }
        Ok(())
    }
}

/// One power point of the full-scheme experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimPoint {
    pub power: f64,
    pub q: u32,
    pub spacing: f64,
    pub gamma: f64,
    pub trials: u64,
    pub symbol_errors: u64,
    pub symbols_checked: u64,
    pub pe_estimate: f64,
    pub d_min: f64,
    pub d_min_exact: bool,
}

/// Runs the nearest-point decoding experiment over the power grid. Errors
/// are counted across receiver 1's desired blocks; the minimum distance
/// reported per point is receiver 1's.
pub fn simulate_error_rates(cfg: &SimConfig, gains: &ChannelGains) -> Result<Vec<SimPoint>> {
    cfg.validate()?;
    let scheme = Scheme::new(cfg.k, cfg.m, cfg.eavesdropper)?;
    if gains.k() != cfg.k || gains.eavesdropper() != cfg.eavesdropper {
        return Err(Error::InvalidConfiguration(
            "channel gains were sampled for a different system shape".into(),
        ));
    }
    let mut worst_mass = 0.0f64;
    for layout in scheme.layouts() {
        worst_mass = worst_mass.max(layout.coefficient_abs_sum(gains)?);
    }
    let mut points = Vec::with_capacity(cfg.power_grid.len());
    for &power in &cfg.power_grid {
        let params = match cfg.q_mode {
            QMode::Explicit(q) => {
                if q == 0 {
                    return Err(Error::InvalidConfiguration(
                        "explicit Q must be at least 1".into(),
                    ));
                }
                let gamma = 1.0 / worst_mass;
                PowerParams {
                    q,
                    spacing: gamma * power.sqrt() / q as f64,
                    gamma,
                }
            }
            QMode::Derived { delta } => scheme.select_parameters(power, delta, gains)?,
        };
        let ctx = DecoderContext::new(&scheme, gains, 1, params.spacing, params.q, cfg.decode_budget)?;
        let d_min = receiver_min_distance(&scheme, gains, params, cfg)?;
        let link = LinkConfig::new(power, cfg.noise_std, cfg.seed)?;
        let mut symbol_errors = 0u64;
        let mut symbols_checked = 0u64;
        for trial in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, trial);
            let symbols: Vec<_> = scheme
                .layouts()
                .iter()
                .map(|l| random_symbols(l, params.q, &mut rng))
                .collect();
            let inputs: Vec<f64> = scheme
                .layouts()
                .iter()
                .zip(&symbols)
                .map(|(l, s)| encode(l, s, params.spacing, gains))
                .collect::<Result<_>>()?;
            let outputs = apply_channel(gains, &inputs, &link, &mut rng)?;
            let decoded = ctx.decode(outputs[0]);
            let truth = DecodeResult::desired_truth(&scheme, &symbols, 1)?;
            symbol_errors += decoded.mismatches_vs(&truth) as u64;
            symbols_checked += truth.total_symbols() as u64;
        }
        points.push(SimPoint {
            power,
            q: params.q,
            spacing: params.spacing,
            gamma: params.gamma,
            trials: cfg.trials,
            symbol_errors,
            symbols_checked,
            pe_estimate: symbol_errors as f64 / symbols_checked as f64,
            d_min: d_min.d_min,
            d_min_exact: d_min.exact,
        });
    }
    Ok(points)
}

fn receiver_min_distance(
    scheme: &Scheme,
    gains: &ChannelGains,
    params: PowerParams,
    cfg: &SimConfig,
) -> Result<MinDistanceReport> {
    let exact = crate::receiver::min_distance(
        scheme,
        gains,
        1,
        params.spacing,
        params.q,
        MinDistanceMode::Exact,
        cfg.dmin_budget,
    );
    match exact {
        Err(Error::BudgetExceeded { .. }) => crate::receiver::min_distance(
            scheme,
            gains,
            1,
            params.spacing,
            params.q,
            MinDistanceMode::Sampled {
                pairs: cfg.dmin_pairs,
                seed: cfg.seed ^ 0xD1B5_4A32_D192_ED03,
            },
            cfg.dmin_budget,
        ),
        other => other,
    }
}

/// Single-stream PAM reliability sweep over unit-gain AWGN.
#[derive(Clone, Debug, Serialize)]
pub struct P2pConfig {
    pub delta: f64,
    pub power_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub noise_std: f64,
}

impl P2pConfig {
    fn validate(&self) -> Result<()> {
        if self.power_grid.is_empty() {
            return Err(Error::InvalidConfiguration("empty power grid".into()));
        }
        for &p in &self.power_grid {
            if !(p.is_finite() && p > 1.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "powers must be finite and exceed 1, got {p}"
                )));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfiguration("trials must be at least 1".into()));
        }
        if !(self.noise_std.is_finite() && self.noise_std > 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "noise level must be positive and finite, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

/// One power point of the sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct P2pPoint {
    pub power: f64,
    pub q: u32,
    pub spacing: f64,
    pub trials: u64,
    pub symbol_errors: u64,
    pub pe_estimate: f64,
    /// Fano-certified reliable rate at the measured error probability.
    pub rate_bits: f64,
}

/// Sends one uniform PAM symbol per trial through y = a*s + noise and
/// decodes by rounding; the rate column is what the measured error
/// probability certifies via the Fano bound.
pub fn p2p_pam_sweep(cfg: &P2pConfig) -> Result<Vec<P2pPoint>> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.power_grid.len());
    for &power in &cfg.power_grid {
        let params = p2p_parameters(power, cfg.delta)?;
        let q = params.q as i64;
        let mut errors = 0u64;
        for trial in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, trial);
            let s = rng.gen_range(-q..=q);
            let noise: f64 = rng.sample::<f64, _>(StandardNormal) * cfg.noise_std;
            let y = params.spacing * s as f64 + noise;
            let guess = (y / params.spacing).round().clamp(-(q as f64), q as f64) as i64;
            if guess != s {
                errors += 1;
            }
        }
        let pe = errors as f64 / cfg.trials as f64;
        let alphabet_bits = (2.0 * params.q as f64 + 1.0).log2();
        let rate_bits = fano_mi_lower_bound(alphabet_bits, pe, alphabet_bits)?;
        points.push(P2pPoint {
            power,
            q: params.q,
            spacing: params.spacing,
            trials: cfg.trials,
            symbol_errors: errors,
            pe_estimate: pe,
            rate_bits,
        });
    }
    Ok(points)
}

/// Slope of the sweep's reliable rate against (1/2) log2 P.
pub fn p2p_rate_slope(points: &[P2pPoint]) -> Result<f64> {
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.power, p.rate_bits)).collect();
    dof_slope(&samples)
}
