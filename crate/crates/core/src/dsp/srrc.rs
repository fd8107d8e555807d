use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Unit-energy, even-symmetric FIR taps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterTaps<T: Real = f64> {
    pub coefficients: Vec<T>,
    pub span_symbols: usize,
    pub samples_per_symbol: usize,
}

impl<T: Real> FilterTaps<T> {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        (self.coefficients.len() - 1) / 2
    }

    pub fn energy(&self) -> T {
        self.coefficients.iter().map(|&c| c * c).sum()
    }
}

/// Square-root raised-cosine taps spanning `span` symbols at `sps` samples
/// per symbol, normalized to unit energy.
pub fn srrc_taps<T: Real>(roll_off: T, span: usize, sps: usize) -> Result<FilterTaps<T>> {
    if !(roll_off > T::zero() && roll_off <= T::one()) {
        return Err(domain(format!(
            "roll-off must be in (0, 1] (got {roll_off})"
        )));
    }
    if span < 8 {
        return Err(domain(format!(
            "span must be at least 8 symbols (got {span})"
        )));
    }
    if sps < 2 {
        return Err(domain(format!(
            "samples per symbol must be at least 2 (got {sps})"
        )));
    }
    let half = span * sps / 2;
    let b = roll_off;
    let pi = T::PI();
    let one = T::one();
    let four = T::lit(4.0);
    // Evaluated on |k − center| so that both halves are computed identically.
    let value = |d: usize| -> T {
        let t = T::from_count(d) / T::from_count(sps);
        if d == 0 {
            return one - b + four * b / pi;
        }
        let x = four * b * t;
        if (x - one).abs() < T::lit(1e-9) {
            let q = pi / (four * b);
            let two_over_pi = T::lit(2.0) / pi;
            return b / T::SQRT_2()
                * ((one + two_over_pi) * q.sin() + (one - two_over_pi) * q.cos());
        }
        ((pi * t * (one - b)).sin() + x * (pi * t * (one + b)).cos()) / (pi * t * (one - x * x))
    };
    let mut coefficients: Vec<T> = (0..=2 * half).map(|k| value(k.abs_diff(half))).collect();
    let norm = coefficients.iter().map(|&c| c * c).sum::<T>().sqrt();
    for c in &mut coefficients {
        *c /= norm;
    }
    Ok(FilterTaps {
        coefficients,
        span_symbols: span,
        samples_per_symbol: sps,
    })
}
