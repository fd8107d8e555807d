//! Dual-polarization coherent chain: pilot framing, Jones rotation, Wiener
//! phase noise, 2×2 MIMO equalization and pilot-aided phase recovery.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::imdd::MIN_NOISE_VAR;
use super::preamble;
use crate::channel::ChannelRealization;
use crate::config::LinkConfig;
use crate::digital::ModFormat;
use crate::dsp::{
    interpolate_phases, matched_filter, phase_estimates, pulse_shape, srrc_taps, FilterTaps,
    MimoGuide, MimoState,
};
use crate::error::{domain, Error, Result};
use crate::transport::{insert_pilots, pilot_positions, strip_pilots, Tributaries};

type C = Complex<f64>;

/// Known pilot symbol; 3 dB above the unit-power data.
pub const PILOT_SYMBOL: C = C::new(1.0, 1.0);

/// Half-width (symbols) of the window used to track phase on the preamble
/// when estimating the residual noise.
const NOISE_PHASE_WINDOW: usize = 32;

/// XI + jXQ and YI + jYQ.
pub fn tributaries_to_pols(t: &Tributaries) -> [Vec<C>; 2] {
    let [xi, xq, yi, yq] = &t.lanes;
    [
        xi.iter().zip(xq).map(|(&i, &q)| C::new(i, q)).collect(),
        yi.iter().zip(yq).map(|(&i, &q)| C::new(i, q)).collect(),
    ]
}

pub fn pols_to_tributaries(pols: &[Vec<C>; 2], pad: usize) -> Tributaries {
    let [x, y] = pols;
    Tributaries {
        lanes: [
            x.iter().map(|c| c.re).collect(),
            x.iter().map(|c| c.im).collect(),
            y.iter().map(|c| c.re).collect(),
            y.iter().map(|c| c.im).collect(),
        ],
        pad,
    }
}

/// Deals a serial complex stream alternately onto X and Y; an odd tail is
/// padded with a zero symbol.
pub fn split_pols(symbols: &[C]) -> [Vec<C>; 2] {
    let half = symbols.len().div_ceil(2);
    let mut pols = [Vec::with_capacity(half), Vec::with_capacity(half)];
    for (i, &s) in symbols.iter().enumerate() {
        pols[i % 2].push(s);
    }
    if pols[1].len() < pols[0].len() {
        pols[1].push(C::new(0.0, 0.0));
    }
    pols
}

/// Inverse of [`split_pols`], truncated to `len` symbols.
pub fn merge_pols(pols: &[Vec<C>; 2], len: usize) -> Vec<C> {
    pols[0]
        .iter()
        .zip(&pols[1])
        .flat_map(|(&x, &y)| [x, y])
        .take(len)
        .collect()
}

/// Channel impairments beyond fading and additive noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentImpairments {
    pub pol_rotation_rad: f64,
    /// Combined laser linewidth, Hz; zero disables phase noise.
    pub linewidth_hz: f64,
}

impl CoherentImpairments {
    pub fn none() -> Self {
        Self {
            pol_rotation_rad: 0.0,
            linewidth_hz: 0.0,
        }
    }

    pub fn from_config(cfg: &LinkConfig) -> Self {
        Self {
            pol_rotation_rad: cfg.noise.coherent.pol_rotation_rad,
            linewidth_hz: cfg.noise.coherent.linewidth_hz,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoherentTx {
    /// Shaped X and Y waveforms.
    pub waveforms: [Vec<C>; 2],
    pub preambles: [Vec<C>; 2],
    /// Data symbols per polarization, before pilot insertion.
    pub data_len: usize,
    /// Payload symbols per polarization including pilots.
    pub framed_len: usize,
    pub spacing: usize,
    pub taps: FilterTaps,
}

/// Frames each polarization as preamble + pilot-interleaved data and shapes
/// it. Both polarizations must carry the same number of symbols.
pub fn coherent_transmit(cfg: &LinkConfig, pols: &[Vec<C>; 2]) -> Result<CoherentTx> {
    if pols[0].len() != pols[1].len() {
        return Err(Error::LengthMismatch {
            expected: pols[0].len(),
            got: pols[1].len(),
        });
    }
    if pols[0].is_empty() {
        return Err(Error::EmptyStream);
    }
    let taps = srrc_taps(cfg.roll_off, cfg.filter_span, cfg.samples_per_symbol)?;
    let spacing = cfg.dsp.pilot_spacing;
    let preambles = [
        preamble(ModFormat::Qpsk, cfg.dsp.preamble_len, "coherent-x"),
        preamble(ModFormat::Qpsk, cfg.dsp.preamble_len, "coherent-y"),
    ];
    let mut framed_len = 0;
    let mut waveforms: [Vec<C>; 2] = Default::default();
    for p in 0..2 {
        let framed = insert_pilots(&pols[p], spacing, PILOT_SYMBOL)?;
        framed_len = framed.len();
        let mut symbols = preambles[p].clone();
        symbols.extend(framed);
        waveforms[p] = pulse_shape(&symbols, &taps);
    }
    Ok(CoherentTx {
        waveforms,
        preambles,
        data_len: pols[0].len(),
        framed_len,
        spacing,
        taps,
    })
}

/// Received dual-polarization samples. The signal amplitude follows
/// √ROP (mW) and the complex noise variance per sample is `n0`, so the
/// symbol SNR grows linearly with ROP. Phase noise is common to both
/// polarizations (one transmit laser, one local oscillator).
#[allow(clippy::too_many_arguments)]
pub fn run_coherent<R: Rng + ?Sized, P: Rng + ?Sized>(
    cfg: &LinkConfig,
    tx: &CoherentTx,
    realization: &ChannelRealization,
    n0: f64,
    impairments: &CoherentImpairments,
    noise_rng: &mut R,
    phase_rng: &mut P,
) -> Result<[Vec<C>; 2]> {
    if !(n0 >= 0.0 && n0.is_finite()) {
        return Err(domain(format!(
            "noise variance must be nonnegative (got {n0})"
        )));
    }
    if !(impairments.linewidth_hz >= 0.0) {
        return Err(domain("linewidth must be nonnegative"));
    }
    let amp = realization.rop_mw().sqrt();
    let (s, c) = impairments.pol_rotation_rad.sin_cos();
    let step_sigma = (std::f64::consts::TAU * impairments.linewidth_hz / cfg.sample_rate()).sqrt();
    let mut theta = if impairments.linewidth_hz > 0.0 {
        phase_rng.random::<f64>() * std::f64::consts::TAU
    } else {
        0.0
    };
    let sigma = (n0 / 2.0).sqrt();
    let [wx, wy] = &tx.waveforms;
    let mut out: [Vec<C>; 2] = [Vec::with_capacity(wx.len()), Vec::with_capacity(wy.len())];
    for (&x, &y) in wx.iter().zip(wy) {
        if step_sigma > 0.0 {
            let d: f64 = phase_rng.sample(StandardNormal);
            theta += step_sigma * d;
        }
        let rot = C::from_polar(amp, theta);
        let mut rx = [(x * c - y * s) * rot, (x * s + y * c) * rot];
        if sigma > 0.0 {
            for v in &mut rx {
                let (a, b): (f64, f64) = (
                    noise_rng.sample(StandardNormal),
                    noise_rng.sample(StandardNormal),
                );
                *v += C::new(sigma * a, sigma * b);
            }
        }
        out[0].push(rx[0]);
        out[1].push(rx[1]);
    }
    Ok(out)
}

/// Joint-polarization pilot phase recovery. Both polarizations share the
/// carrier phase walk up to a static offset, which is estimated first; the
/// per-pilot phases then combine both polarizations' pilot observations.
pub fn cpr_pilot_joint(x: &[C], y: &[C], positions: &[usize], pilot: C) -> Result<[Vec<C>; 2]> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if positions.iter().any(|&p| p >= x.len()) {
        return Err(Error::PilotLayout("pilot beyond stream end".into()));
    }
    let a: Vec<C> = positions.iter().map(|&p| x[p] * pilot.conj()).collect();
    let b: Vec<C> = positions.iter().map(|&p| y[p] * pilot.conj()).collect();
    let offset = -a.iter().zip(&b).map(|(a, b)| a * b.conj()).sum::<C>().arg();
    let align = C::from_polar(1.0, -offset);
    let combined: Vec<C> = a.iter().zip(&b).map(|(a, b)| a + b * align).collect();
    let index: Vec<usize> = (0..combined.len()).collect();
    let phases = phase_estimates(&combined, &index, &vec![C::new(1.0, 0.0); combined.len()])?;
    let track = interpolate_phases(positions, &phases, x.len());
    let derotate = |s: &[C], extra: f64| -> Vec<C> {
        s.iter()
            .zip(&track)
            .map(|(&v, &phi)| v * C::from_polar(1.0, -(phi + extra)))
            .collect()
    };
    Ok([derotate(x, 0.0), derotate(y, offset)])
}

#[derive(Debug, Clone)]
pub struct CoherentRx {
    /// Recovered data symbols per polarization, pilots removed.
    pub pols: [Vec<C>; 2],
    /// Residual complex noise variance per symbol on the preamble.
    pub noise_var: f64,
    pub mimo: MimoState,
}

/// Matched filter, AGC, MIMO equalization trained on the preambles with
/// carrier tracking, then frozen over the payload; pilot phase recovery when
/// `cpr` is set, otherwise only the tracker's final phase is removed.
pub fn coherent_receive(
    cfg: &LinkConfig,
    received: &[Vec<C>; 2],
    tx: &CoherentTx,
    cpr: bool,
) -> Result<CoherentRx> {
    let sps = cfg.samples_per_symbol;
    let n_pre = tx.preambles[0].len();
    let mut mf = [
        matched_filter(&received[0], &tx.taps),
        matched_filter(&received[1], &tx.taps),
    ];
    let power = mf
        .iter()
        .flat_map(|w| (0..n_pre).map(move |k| w[k * sps].norm_sqr()))
        .sum::<f64>()
        / (2 * n_pre) as f64;
    if power > 0.0 {
        let g = power.sqrt().recip();
        for w in &mut mf {
            for v in w.iter_mut() {
                *v *= g;
            }
        }
    }
    let [x, y] = &mf;
    let mut mimo = MimoState::new(cfg.dsp.mimo_taps, sps, cfg.dsp.mimo_step)?
        .with_phase_tracking(cfg.dsp.pll_gain);
    let training = MimoGuide::Training(&tx.preambles[0], &tx.preambles[1]);
    for _ in 0..cfg.dsp.training_passes.max(1) {
        mimo.phase = 0.0;
        mimo.run(x, y, 0..n_pre, &training)?;
    }
    let (px, py) = mimo.run(x, y, 0..n_pre, &MimoGuide::Frozen)?;
    let noise_var =
        (windowed_residual(&px, &tx.preambles[0]) + windowed_residual(&py, &tx.preambles[1])) / 2.0;
    let (fx, fy) = mimo.run(x, y, n_pre..n_pre + tx.framed_len, &MimoGuide::Frozen)?;
    let [fx, fy] = if cpr {
        let positions = pilot_positions(tx.framed_len, tx.spacing);
        cpr_pilot_joint(&fx, &fy, &positions, PILOT_SYMBOL)?
    } else {
        let rot = C::from_polar(1.0, -mimo.phase);
        [
            fx.iter().map(|v| v * rot).collect(),
            fy.iter().map(|v| v * rot).collect(),
        ]
    };
    let pols = [
        strip_pilots(&fx, tx.spacing)?,
        strip_pilots(&fy, tx.spacing)?,
    ];
    Ok(CoherentRx {
        pols,
        noise_var: noise_var.max(MIN_NOISE_VAR),
        mimo,
    })
}

/// Mean |z − d|² after removing a sliding-window phase estimate.
fn windowed_residual(z: &[C], d: &[C]) -> f64 {
    let corr: Vec<C> = z.iter().zip(d).map(|(z, d)| z * d.conj()).collect();
    let mut prefix = Vec::with_capacity(corr.len() + 1);
    prefix.push(C::new(0.0, 0.0));
    for c in &corr {
        let last = *prefix.last().unwrap_or(&C::new(0.0, 0.0));
        prefix.push(last + c);
    }
    let n = z.len();
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(NOISE_PHASE_WINDOW);
            let hi = (k + NOISE_PHASE_WINDOW + 1).min(n);
            let phi = (prefix[hi] - prefix[lo]).arg();
            (z[k] * C::from_polar(1.0, -phi) - d[k]).norm_sqr()
        })
        .sum::<f64>()
        / n as f64
}
