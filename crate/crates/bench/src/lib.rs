//! Shared fixtures for the criterion benchmarks.

use secdof_core::{ChannelGains, Result, Scheme};

/// The largest shape the hot paths are benchmarked at.
pub fn benchmark_scheme() -> Result<Scheme> {
    Scheme::new(3, 2, true)
}

/// Deterministic gains matching [`benchmark_scheme`].
pub fn benchmark_gains() -> Result<ChannelGains> {
    ChannelGains::sample(3, true, 1)
}
