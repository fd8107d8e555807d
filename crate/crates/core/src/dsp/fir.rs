//! Pulse shaping, matched filtering and plain FIR convolution.

use std::ops::{Add, Mul};

use num_complex::Complex;
use num_traits::Zero;

use super::srrc::FilterTaps;
use crate::scalar::Real;

/// A sample that real taps can scale: `T` itself or `Complex<T>`.
pub trait Sample<T: Real>:
    Copy + Zero + Add<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
}

impl<T: Real> Sample<T> for T {}
impl<T: Real> Sample<T> for Complex<T> {}

/// Full linear convolution, length `x.len() + h.len() − 1`.
pub fn convolve<T: Real, S: Sample<T>>(x: &[S], h: &[T]) -> Vec<S> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut y = vec![S::zero(); x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &hj) in h.iter().enumerate() {
            y[i + j] = y[i + j] + xi * hj;
        }
    }
    y
}

/// Upsamples by the taps' samples-per-symbol and filters. Output has
/// `symbols.len() · sps` samples aligned so that sample `k·sps` is the peak
/// of symbol `k`.
pub fn pulse_shape<T: Real, S: Sample<T>>(symbols: &[S], taps: &FilterTaps<T>) -> Vec<S> {
    let sps = taps.samples_per_symbol;
    let delay = taps.delay();
    let n = symbols.len() * sps;
    let mut out = vec![S::zero(); n];
    for (k, &s) in symbols.iter().enumerate() {
        let origin = k * sps;
        for (j, &c) in taps.coefficients.iter().enumerate() {
            // tap j lands on sample origin + j − delay
            let idx = origin + j;
            if idx < delay || idx - delay >= n {
                continue;
            }
            out[idx - delay] = out[idx - delay] + s * c;
        }
    }
    out
}

/// Filters with the (symmetric) taps and removes the group delay, so the
/// output stays aligned with the input.
pub fn matched_filter<T: Real, S: Sample<T>>(waveform: &[S], taps: &FilterTaps<T>) -> Vec<S> {
    let delay = taps.delay();
    let full = convolve(waveform, &taps.coefficients);
    full.into_iter().skip(delay).take(waveform.len()).collect()
}

/// Keeps every `factor`-th sample starting at `phase`.
pub fn downsample<S: Copy>(samples: &[S], factor: usize, phase: usize) -> Vec<S> {
    samples
        .iter()
        .skip(phase)
        .step_by(factor)
        .copied()
        .collect()
}
