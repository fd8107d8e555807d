//! Rational-ratio polyphase resampling with a Kaiser-windowed sinc prototype.

use super::fir::Sample;
use crate::error::{domain, Result};
use crate::scalar::Real;

const HALF_WIDTH: usize = 24;
const KAISER_BETA: f64 = 8.6;

/// Precomputed polyphase filter for an `up / down` rate change.
#[derive(Debug, Clone)]
pub struct Resampler<T: Real = f64> {
    up: usize,
    down: usize,
    /// Prototype taps split by upsampled-grid phase.
    phases: Vec<Vec<T>>,
    offset: usize,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Best rational approximation of `x` with denominator up to `max_den`.
fn rational(x: f64, max_den: u64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = x;
    loop {
        let a = v.floor();
        let ai = a as u64;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-12 || (p1 as f64 / q1 as f64 - x).abs() < 1e-12 * x {
            break;
        }
        v = 1.0 / frac;
    }
    (p1, q1)
}

impl<T: Real> Resampler<T> {
    pub fn new(from_rate: f64, to_rate: f64) -> Result<Self> {
        if !(from_rate > 0.0 && to_rate > 0.0 && from_rate.is_finite() && to_rate.is_finite()) {
            return Err(domain(format!(
                "sample rates must be positive (got {from_rate}, {to_rate})"
            )));
        }
        let (l, m) = rational(to_rate / from_rate, 1000);
        if l == 0 || m == 0 {
            return Err(domain(format!(
                "rate ratio {} not representable",
                to_rate / from_rate
            )));
        }
        let g = gcd(l, m);
        let (up, down) = ((l / g) as usize, (m / g) as usize);
        let r = up.max(down);
        // Cutoff at 0.7 of the lower Nyquist rate, expressed at the upsampled rate.
        let fc = 0.7 * 0.5 / r as f64;
        let half = HALF_WIDTH * r;
        let len = 2 * half + 1;
        let denom = bessel_i0(KAISER_BETA);
        let proto: Vec<f64> = (0..len)
            .map(|i| {
                let n = i as f64 - half as f64;
                let sinc = if n == 0.0 {
                    2.0 * fc
                } else {
                    (2.0 * std::f64::consts::PI * fc * n).sin() / (std::f64::consts::PI * n)
                };
                let z = n / half as f64;
                let w = bessel_i0(KAISER_BETA * (1.0 - z * z).max(0.0).sqrt()) / denom;
                sinc * w
            })
            .collect();
        // phase p holds proto[p + k·up]; each is normalized so DC passes at unit gain
        let phases = (0..up)
            .map(|p| {
                let taps: Vec<f64> = proto.iter().skip(p).step_by(up).copied().collect();
                let s: f64 = taps.iter().sum();
                taps.into_iter().map(|t| T::lit(t / s)).collect()
            })
            .collect();
        Ok(Self {
            up,
            down,
            phases,
            offset: half,
        })
    }

    pub fn ratio(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len * self.up).div_ceil(self.down)
    }

    /// Resamples `x`; the output is time-aligned with the input (no delay).
    pub fn process<S: Sample<T>>(&self, x: &[S]) -> Vec<S> {
        let n_out = self.output_len(x.len());
        let up = self.up as isize;
        let mut y = Vec::with_capacity(n_out);
        for m in 0..n_out {
            // position on the upsampled grid, shifted to the filter center
            let t = (m * self.down + self.offset) as isize;
            let p = t.rem_euclid(up) as usize;
            let base = (t - p as isize) / up; // input index for tap k = 0
            let mut acc = S::zero();
            for (k, &h) in self.phases[p].iter().enumerate() {
                let idx = base - k as isize;
                if idx >= 0 && (idx as usize) < x.len() {
                    acc = acc + x[idx as usize] * h;
                }
            }
            y.push(acc);
        }
        y
    }
}

/// One-shot convenience wrapper around [`Resampler`].
pub fn resample<T: Real, S: Sample<T>>(
    waveform: &[S],
    from_rate: f64,
    to_rate: f64,
) -> Result<Vec<S>> {
    Ok(Resampler::<T>::new(from_rate, to_rate)?.process(waveform))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(n: usize, f: f64, fs: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
            .collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn rational_approximation() {
        assert_eq!(rational(2.0, 1000), (2, 1));
        assert_eq!(rational(0.75, 1000), (3, 4));
        assert_eq!(rational(160.0 / 147.0, 1000), (160, 147));
    }

    #[test]
    fn tone_amplitude_preserved() {
        for (fs_in, fs_out) in [(1.0, 2.0), (2.0, 1.0), (3.0, 4.0), (5.0, 3.0)] {
            let f = 0.4 * f64::min(fs_in, fs_out) / 2.0 * 0.99;
            let x = tone(4000, f, fs_in);
            let y = resample::<f64, f64>(&x, fs_in, fs_out).unwrap();
            let m = y.len();
            let interior = &y[m / 4..3 * m / 4];
            let gain_db = 20.0 * (rms(interior) / (0.5f64).sqrt()).log10();
            assert!(gain_db.abs() < 0.1, "{fs_in}->{fs_out}: {gain_db} dB");
            // and the tone sits at the right place in time
            let expect: Vec<f64> = (m / 4..3 * m / 4)
                .map(|i| (2.0 * PI * f * i as f64 / fs_out).cos())
                .collect();
            let err: Vec<f64> = interior.iter().zip(&expect).map(|(a, b)| a - b).collect();
            assert!(
                rms(&err) < 1e-3,
                "{fs_in}->{fs_out}: misaligned by {}",
                rms(&err)
            );
        }
    }

    #[test]
    fn dc_level_preserved() {
        let x = vec![0.7; 600];
        let y = resample::<f64, f64>(&x, 3.0, 7.0).unwrap();
        let m = y.len();
        for v in &y[m / 4..3 * m / 4] {
            assert!((v - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_band_limited() {
        let fs = 1.0;
        let x: Vec<f64> = (0..3000)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * PI * 0.05 * t).sin() + 0.5 * (2.0 * PI * 0.13 * t + 0.3).cos()
            })
            .collect();
        let up = resample::<f64, f64>(&x, 1.0, 2.0).unwrap();
        let back = resample::<f64, f64>(&up, 2.0, 1.0).unwrap();
        assert_eq!(back.len(), x.len());
        let a = &x[500..2500];
        let b = &back[500..2500];
        let err: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
        let db = 20.0 * (rms(&err) / rms(a)).log10();
        assert!(db < -60.0, "round trip error {db} dB");
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(Resampler::<f64>::new(0.0, 1.0).is_err());
        assert!(Resampler::<f64>::new(1.0, f64::NAN).is_err());
    }
}
