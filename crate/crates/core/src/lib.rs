//! Real interference alignment with cooperative jamming for the K-user
//! Gaussian interference channel, at desk scale.
//!
//! Each of the K transmitters splits its message into K-1 sub-streams and adds
//! one jamming stream. Every stream is a PAM symbol riding on a monomial in
//! the channel gains, chosen so that at every unintended observer each message
//! stream lands on top of some jamming stream, while at the intended receiver
//! the desired streams occupy dimensions nothing else touches. The crate
//! provides:
//!
//! * exact dimension-set arithmetic over canonical gain monomials:
//!   cardinalities, shifts, intersections, receiver occupancy,
//! * transmit-side constellation scaling and encoding,
//! * receiver-side exact recovery, minimum distance, brute-force decoding,
//! * an exact per-dimension leakage engine plus an independent brute-force
//!   oracle it is checked against,
//! * closed-form achievable-rate and converse degrees-of-freedom accounting,
//! * deterministic Monte Carlo harnesses used by the `secdof` CLI.
//!
//! User indices are 1-based throughout; observer index 0 denotes the external
//! eavesdropper.

pub mod analysis;
pub mod channel;
pub mod dimensions;
pub mod receiver;
pub mod scheme;
pub mod secrecy;
pub mod signaling;
pub mod sim;

use thiserror::Error;

/// Library version string embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("corrupted input: {0}")]
    CorruptedInput(String),
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub use analysis::{
    achievable_rate_formula, converse_dof, converse_dof_f64, dof_slope, positive_rate_threshold,
    secrecy_rate_bits, RateReport,
};
pub use channel::{
    apply_channel, canonical_symbols, tx_to_observer, ChannelGains, GainSymbol, LinkConfig,
};
pub use dimensions::{
    build_t, build_t_extended, cardinality_formulas, check_separability, intersection_count,
    numeric_distinctness, receiver_dimension_budget, receiver_occupancy, t_generators, BlockKind,
    CardinalityFormulas, DimensionSet, Monomial, OccupancyMap, SeparabilityReport, SetLabel,
    StreamId,
};
pub use receiver::{
    exact_recover, min_distance, min_distance_over_dims, nearest_point_decode, noiseless_point,
    CoefficientVector, DecodeResult, DecoderContext, MinDistanceMode, MinDistanceReport,
};
pub use scheme::Scheme;
pub use secrecy::{
    exact_conditional_entropy, fano_mi_lower_bound, leakage_bound_bits, leakage_bound_dof,
    leakage_exact, leakage_exact_with_occupancy, leakage_oracle, oracle_conditional_entropy,
    per_dimension_distributions, ConditioningSet, EntropyEngine, IntDist, LeakageReport,
};
pub use signaling::{
    encode, p2p_parameters, random_symbols, select_parameters, select_parameters_from_sum,
    PamConstellation, PowerParams, StreamLayout, SymbolVector,
};
pub use sim::{
    p2p_pam_sweep, p2p_rate_slope, simulate_error_rates, trial_rng, P2pConfig, P2pPoint, QMode,
    SimConfig, SimPoint,
};
