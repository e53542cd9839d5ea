//! Closed-form rate and degrees-of-freedom evaluators.
//!
//! The headline quantities are asymptotic in P; at finite power the printed
//! rate coefficient is evaluated with its vanishing remainder term dropped,
//! and every report states so through the formula itself: rates are the
//! coefficient times (1/2) log2 P, nothing more.

use num_rational::Ratio;
use serde::Serialize;

use crate::channel::validate_k;
use crate::{Error, Result};

/// One evaluation of the achievable-rate formula.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RateReport {
    pub k: usize,
    pub m: u64,
    pub delta: f64,
    pub power: f64,
    /// Per-user secrecy rate in bits per channel use, floored at zero.
    pub per_user_rate_bits: f64,
    pub sum_rate_bits: f64,
    /// Sum-rate coefficient of (1/2) log2 P.
    pub dof_coefficient: f64,
    /// K(K-1)/(2K-1), the matching upper bound.
    pub converse_dof: f64,
}

fn validate_formula_inputs(k: usize, m: u64, delta: f64, power: f64) -> Result<()> {
    validate_k(k)?;
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(delta.is_finite() && (0.0..1.0).contains(&delta)) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    if !(power.is_finite() && power > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "power must exceed 1, got {power}"
        )));
    }
    Ok(())
}

/// Per-user rate coefficient of (1/2) log2 P before flooring:
/// [(K-1) - K(2m-1)/m^2] (1-delta) / ((K-1) + K(1+1/m)^(K^2+1) + delta/m^(K^2+1)).
fn per_user_coefficient(k: usize, m: u64, delta: f64) -> f64 {
    let k_f = k as f64;
    let m_f = m as f64;
    let g = (k * k + 1) as f64;
    let numerator = ((k_f - 1.0) - k_f * (2.0 * m_f - 1.0) / (m_f * m_f)) * (1.0 - delta);
    let tail = if delta == 0.0 {
        0.0
    } else {
        (delta.ln() - g * m_f.ln()).exp()
    };
    let denominator = (k_f - 1.0) + k_f * (1.0 + 1.0 / m_f).powf(g) + tail;
    numerator / denominator
}

/// Evaluates the printed achievable-rate formula at one parameter point.
pub fn achievable_rate_formula(k: usize, m: u64, delta: f64, power: f64) -> Result<RateReport> {
    validate_formula_inputs(k, m, delta, power)?;
    let coeff = per_user_coefficient(k, m, delta).max(0.0);
    let half_log = 0.5 * power.log2();
    let per_user = coeff * half_log;
    let converse = converse_dof_f64(k)?;
    let dof = k as f64 * coeff;
    debug_assert!(dof <= converse + 1e-12);
    Ok(RateReport {
        k,
        m,
        delta,
        power,
        per_user_rate_bits: per_user,
        sum_rate_bits: k as f64 * per_user,
        dof_coefficient: dof,
        converse_dof: converse,
    })
}

/// The exact sum secure d.o.f. upper bound K(K-1)/(2K-1).
pub fn converse_dof(k: usize) -> Result<Ratio<u64>> {
    validate_k(k)?;
    let k = k as u64;
    Ok(Ratio::new(k * (k - 1), 2 * k - 1))
}

pub fn converse_dof_f64(k: usize) -> Result<f64> {
    let r = converse_dof(k)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// Achievable secrecy rate of the region assembly:
/// max(0, mi_main - max of the leakage terms); no leakage terms means the
/// main link is the only constraint.
pub fn secrecy_rate_bits(mi_main: f64, mi_leaks: &[f64]) -> Result<f64> {
    if !(mi_main.is_finite() && mi_main >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "main-link information must be finite and nonnegative, got {mi_main}"
        )));
    }
    let mut worst = 0.0f64;
    for &l in mi_leaks {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "leakage terms must be finite and nonnegative, got {l}"
            )));
        }
        worst = worst.max(l);
    }
    Ok((mi_main - worst).max(0.0))
}

/// Least-squares slope of rate against (1/2) log2 P.
pub fn dof_slope(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slope estimation needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let mut xs = Vec::with_capacity(samples.len());
    for &(p, rate) in samples {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "powers must be finite and exceed 1, got {p}"
            )));
        }
        if !rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rates must be finite, got {rate}"
            )));
        }
        xs.push(0.5 * p.log2());
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = samples.iter().map(|&(_, r)| r).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, &(_, y)) in xs.iter().zip(samples) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument(
            "powers must not all coincide".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Smallest m with a positive rate numerator: (K-1) m^2 > K (2m-1).
pub fn positive_rate_threshold(k: usize) -> Result<u64> {
    validate_k(k)?;
    let k = k as u64;
    let mut m = 1u64;
    loop {
        if (k - 1) * m * m > k * (2 * m - 1) {
            return Ok(m);
        }
        m += 1;
    }
}
