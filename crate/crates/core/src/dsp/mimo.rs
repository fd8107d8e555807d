//! 2×2 complex butterfly equalizer for dual-polarization reception.

use std::ops::Range;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ffe::EqMode;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

const DIVERGENCE_LIMIT: f64 = 1e3;

pub enum MimoGuide<'a, T: Real> {
    /// Known X and Y symbols.
    Training(&'a [Complex<T>], &'a [Complex<T>]),
    Decisions(&'a dyn Fn(Complex<T>) -> Complex<T>),
    Frozen,
}

impl<T: Real> MimoGuide<'_, T> {
    pub fn mode(&self) -> EqMode {
        match self {
            MimoGuide::Training(..) => EqMode::Training,
            MimoGuide::Decisions(_) => EqMode::DecisionDirected,
            MimoGuide::Frozen => EqMode::Frozen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoState<T: Real = f64> {
    /// `taps[out][input]`, each of odd length.
    pub taps: [[Vec<Complex<T>>; 2]; 2],
    pub step: T,
    pub samples_per_symbol: usize,
    /// Loop gain of the carrier-phase tracker used while adapting; zero
    /// disables tracking.
    pub pll_gain: T,
    /// Current tracked carrier phase (radians).
    pub phase: T,
    pub mode: EqMode,
}

impl<T: Real> MimoState<T> {
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
        let zero = vec![Complex::new(T::zero(), T::zero()); n_taps];
        let mut spike = zero.clone();
        spike[n_taps / 2] = Complex::new(T::one(), T::zero());
        Ok(Self {
            taps: [[spike.clone(), zero.clone()], [zero, spike]],
            step,
            samples_per_symbol,
            pll_gain: T::zero(),
            phase: T::zero(),
            mode: EqMode::Training,
        })
    }

    pub fn with_phase_tracking(mut self, gain: T) -> Self {
        self.pll_gain = gain;
        self
    }

    fn n_taps(&self) -> usize {
        self.taps[0][0].len()
    }

    fn output(&self, rx: [&[Complex<T>]; 2], k: usize) -> [Complex<T>; 2] {
        let c = self.n_taps() / 2;
        let centre = k * self.samples_per_symbol;
        let mut out = [Complex::new(T::zero(), T::zero()); 2];
        for j in 0..self.n_taps() {
            let Some(i) = (centre + j).checked_sub(c) else {
                continue;
            };
            for (p, input) in rx.iter().enumerate() {
                if let Some(&x) = input.get(i) {
                    out[0] += self.taps[0][p][j] * x;
                    out[1] += self.taps[1][p][j] * x;
                }
            }
        }
        out
    }

    fn adapt(&mut self, rx: [&[Complex<T>]; 2], k: usize, err: [Complex<T>; 2]) {
        let c = self.n_taps() / 2;
        let centre = k * self.samples_per_symbol;
        let g = [err[0] * self.step, err[1] * self.step];
        for j in 0..self.n_taps() {
            let Some(i) = (centre + j).checked_sub(c) else {
                continue;
            };
            for (p, input) in rx.iter().enumerate() {
                if let Some(&x) = input.get(i) {
                    let xc = x.conj();
                    self.taps[0][p][j] += g[0] * xc;
                    self.taps[1][p][j] += g[1] * xc;
                }
            }
        }
    }

    fn tap_norm(&self) -> f64 {
        self.taps
            .iter()
            .flatten()
            .flatten()
            .map(|t| t.norm_sqr().as_f64())
            .sum::<f64>()
            .sqrt()
    }

    /// Equalizes symbols `range` of the two received sample buffers.
    ///
    /// While adapting with a non-zero `pll_gain`, outputs are de-rotated by the
    /// tracked phase before the error is formed and the returned symbols are
    /// the de-rotated ones. Frozen runs apply the taps only.
    pub fn run(
        &mut self,
        x: &[Complex<T>],
        y: &[Complex<T>],
        range: Range<usize>,
        guide: &MimoGuide<'_, T>,
    ) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        let n = range.len();
        if let MimoGuide::Training(a, b) = guide {
            if a.len() != n || b.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: a.len().min(b.len()),
                });
            }
        }
        self.mode = guide.mode();
        let rx = [x, y];
        let mut out_x = Vec::with_capacity(n);
        let mut out_y = Vec::with_capacity(n);
        let track = self.pll_gain > T::zero() && !matches!(guide, MimoGuide::Frozen);
        for (i, k) in range.enumerate() {
            let raw = self.output(rx, k);
            let rot = if track {
                Complex::from_polar(T::one(), -self.phase)
            } else {
                Complex::new(T::one(), T::zero())
            };
            let z = [raw[0] * rot, raw[1] * rot];
            out_x.push(z[0]);
            out_y.push(z[1]);
            let d = match guide {
                MimoGuide::Training(a, b) => Some([a[i], b[i]]),
                MimoGuide::Decisions(slice) => Some([slice(z[0]), slice(z[1])]),
                MimoGuide::Frozen => None,
            };
            if let Some(d) = d {
                let back = rot.conj();
                self.adapt(rx, k, [(d[0] - z[0]) * back, (d[1] - z[1]) * back]);
                if track {
                    let corr = z[0] * d[0].conj() + z[1] * d[1].conj();
                    if corr.norm_sqr() > T::zero() {
                        self.phase += self.pll_gain * corr.arg();
                    }
                }
                if !raw[0].re.is_finite() || !raw[1].re.is_finite() {
                    return Err(Error::EqualizerDiverged(f64::INFINITY));
                }
            }
        }
        let norm = self.tap_norm();
        if !(norm.is_finite() && norm < DIVERGENCE_LIMIT) {
            return Err(Error::EqualizerDiverged(norm));
        }
        Ok((out_x, out_y))
    }
}

/// Equalizes every complete symbol of the dual-polarization input.
pub fn mimo_equalize<T: Real>(
    x: &[Complex<T>],
    y: &[Complex<T>],
    guide: &MimoGuide<'_, T>,
    mut state: MimoState<T>,
) -> Result<((Vec<Complex<T>>, Vec<Complex<T>>), MimoState<T>)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len() / state.samples_per_symbol;
    let out = state.run(x, y, 0..n, guide)?;
    Ok((out, state))
}
