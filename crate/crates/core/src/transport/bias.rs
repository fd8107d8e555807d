//! Peak-normalized intensity mapping for IM/DD transmission.

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BiasMapped {
    /// Optical intensity, nonnegative.
    pub intensity: Vec<f64>,
    /// `max|s|` used for the mapping (side information for the receiver).
    pub peak: f64,
}

/// `P_avg · (1 + s / max|s|)`. An all-zero input maps to constant `P_avg`.
pub fn imdd_bias_map(samples: &[f64], p_avg: f64) -> Result<BiasMapped> {
    if !(p_avg > 0.0 && p_avg.is_finite()) {
        return Err(domain(format!(
            "average power must be positive (got {p_avg})"
        )));
    }
    let peak = samples.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    if !peak.is_finite() {
        return Err(domain("non-finite sample"));
    }
    let intensity = if peak == 0.0 {
        vec![p_avg; samples.len()]
    } else {
        samples
            .iter()
            .map(|&s| (p_avg * (1.0 + s / peak)).max(0.0))
            .collect()
    };
    Ok(BiasMapped { intensity, peak })
}

/// Inverts [`imdd_bias_map`] on a detected electrical signal whose DC level
/// corresponds to `p_avg`.
pub fn imdd_bias_unmap(detected: &[f64], p_avg: f64, peak: f64) -> Vec<f64> {
    detected.iter().map(|&d| (d / p_avg - 1.0) * peak).collect()
}
