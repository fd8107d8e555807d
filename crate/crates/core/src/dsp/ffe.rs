//! Real-valued fractionally spaced feed-forward equalizer with LMS adaptation.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

const DIVERGENCE_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqMode {
    Training,
    DecisionDirected,
    PilotDirected,
    Frozen,
}

/// What drives adaptation for a run of symbols.
pub enum Guide<'a, T> {
    /// Known symbols, one per output.
    Training(&'a [T]),
    /// Adapt against the slicer's decision.
    Decisions(&'a dyn Fn(T) -> T),
    /// Adapt only where a known symbol is given.
    Pilots(&'a [Option<T>]),
    /// Filter without adapting.
    Frozen,
}

impl<T> Guide<'_, T> {
    pub fn mode(&self) -> EqMode {
        match self {
            Guide::Training(_) => EqMode::Training,
            Guide::Decisions(_) => EqMode::DecisionDirected,
            Guide::Pilots(_) => EqMode::PilotDirected,
            Guide::Frozen => EqMode::Frozen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfeState<T: Real = f64> {
    pub taps: Vec<T>,
    pub step: T,
    pub samples_per_symbol: usize,
    pub mode: EqMode,
}

impl<T: Real> FfeState<T> {
    /// Center-spike initialization.
    pub fn new(n_taps: usize, samples_per_symbol: usize, step: T) -> Result<Self> {
        if n_taps == 0 || n_taps % 2 == 0 {
            return Err(domain(format!("tap count must be odd (got {n_taps})")));
        }
        if samples_per_symbol == 0 {
            return Err(domain("samples per symbol must be positive"));
        }
        if !(step >= T::zero() && step <= T::lit(0.1)) {
            return Err(domain(format!("LMS step must be in [0, 0.1] (got {step})")));
        }
        let mut taps = vec![T::zero(); n_taps];
        taps[n_taps / 2] = T::one();
        Ok(Self {
            taps,
            step,
            samples_per_symbol,
            mode: EqMode::Training,
        })
    }

    fn tap_norm(&self) -> f64 {
        self.taps
            .iter()
            .map(|t| t.as_f64() * t.as_f64())
            .sum::<f64>()
            .sqrt()
    }

    #[inline]
    fn output(&self, received: &[T], k: usize) -> T {
        let c = self.taps.len() / 2;
        let centre = k * self.samples_per_symbol;
        let mut acc = T::zero();
        for (j, &w) in self.taps.iter().enumerate() {
            if let Some(&x) = (centre + j).checked_sub(c).and_then(|i| received.get(i)) {
                acc += w * x;
            }
        }
        acc
    }

    #[inline]
    fn adapt(&mut self, received: &[T], k: usize, err: T) {
        let c = self.taps.len() / 2;
        let centre = k * self.samples_per_symbol;
        let g = self.step * err;
        for (j, w) in self.taps.iter_mut().enumerate() {
            if let Some(&x) = (centre + j).checked_sub(c).and_then(|i| received.get(i)) {
                *w += g * x;
            }
        }
    }

    /// Equalizes symbols `range` of the sample buffer `received`; symbol `k`
    /// is centred on sample `k · sps`.
    pub fn run(
        &mut self,
        received: &[T],
        range: Range<usize>,
        guide: &Guide<'_, T>,
    ) -> Result<Vec<T>> {
        let n = range.len();
        match guide {
            Guide::Training(r) if r.len() != n => {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            Guide::Pilots(p) if p.len() != n => {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            _ => {}
        }
        self.mode = guide.mode();
        let mut out = Vec::with_capacity(n);
        for (i, k) in range.enumerate() {
            let y = self.output(received, k);
            out.push(y);
            let target = match guide {
                Guide::Training(r) => Some(r[i]),
                Guide::Decisions(slice) => Some(slice(y)),
                Guide::Pilots(p) => p[i],
                Guide::Frozen => None,
            };
            if let Some(d) = target {
                self.adapt(received, k, d - y);
                if !y.is_finite() {
                    return Err(Error::EqualizerDiverged(f64::INFINITY));
                }
            }
        }
        let norm = self.tap_norm();
        if !(norm.is_finite() && norm < DIVERGENCE_LIMIT) {
            return Err(Error::EqualizerDiverged(norm));
        }
        Ok(out)
    }
}

/// Equalizes every complete symbol in `received`.
pub fn ffe_equalize<T: Real>(
    received: &[T],
    guide: &Guide<'_, T>,
    mut state: FfeState<T>,
) -> Result<(Vec<T>, FfeState<T>)> {
    let n = received.len() / state.samples_per_symbol;
    let out = state.run(received, 0..n, guide)?;
    Ok((out, state))
}
