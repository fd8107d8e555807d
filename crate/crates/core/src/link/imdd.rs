//! Intensity-modulation / direct-detection chain.

use rand::Rng;
use rand_distr::StandardNormal;

use super::preamble;
use crate::channel::ChannelRealization;
use crate::config::LinkConfig;
use crate::digital::modem::slice_nearest;
use crate::digital::ModFormat;
use crate::dsp::{convolve, matched_filter, pulse_shape, srrc_taps, FfeState, FilterTaps, Guide};
use crate::error::{domain, Result};
use crate::transport::imdd_bias_map;

/// Lower bound on estimated noise variances, keeping LLRs finite.
pub(crate) const MIN_NOISE_VAR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ImddTx {
    /// Optical intensity with unit average power.
    pub intensity: Vec<f64>,
    pub preamble: Vec<f64>,
    pub payload_len: usize,
    /// Peak electrical amplitude used by the bias mapping.
    pub peak: f64,
    pub taps: FilterTaps,
}

/// Prepends the training preamble, shapes and maps to intensity.
pub fn imdd_transmit(cfg: &LinkConfig, payload: &[f64], training: ModFormat) -> Result<ImddTx> {
    let taps = srrc_taps(cfg.roll_off, cfg.filter_span, cfg.samples_per_symbol)?;
    let pre: Vec<f64> = preamble(training, cfg.dsp.preamble_len, "imdd")
        .iter()
        .map(|c| c.re)
        .collect();
    let mut symbols = pre.clone();
    symbols.extend_from_slice(payload);
    let wave = pulse_shape(&symbols, &taps);
    let mapped = imdd_bias_map(&wave, 1.0)?;
    Ok(ImddTx {
        intensity: mapped.intensity,
        preamble: pre,
        payload_len: payload.len(),
        peak: mapped.peak,
        taps,
    })
}

/// Photodetected current (mA) for a unit-mean intensity waveform received
/// at the realization's ROP: responsivity × optical power through the
/// electrical response, plus thermal noise of variance `noise_floor`.
pub fn run_imdd<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    intensity: &[f64],
    realization: &ChannelRealization,
    noise_floor: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if let Some(v) = intensity.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(domain(format!(
            "intensity must be nonnegative and finite (got {v})"
        )));
    }
    if !(noise_floor >= 0.0) {
        return Err(domain(format!(
            "noise floor must be nonnegative (got {noise_floor})"
        )));
    }
    let response = &cfg.noise.imdd.electrical_response;
    let dc: f64 = response.iter().sum();
    if response.is_empty() || dc == 0.0 {
        return Err(domain("electrical response needs a nonzero DC gain"));
    }
    let scale = cfg.noise.imdd.responsivity * realization.rop_mw() / dc;
    let mut current = if response.len() == 1 {
        intensity.to_vec()
    } else {
        let mut c = convolve(intensity, response);
        c.truncate(intensity.len());
        c
    };
    let sigma = noise_floor.sqrt();
    for v in &mut current {
        *v *= scale;
        if sigma > 0.0 {
            let n: f64 = rng.sample(StandardNormal);
            *v += sigma * n;
        }
    }
    Ok(current)
}

#[derive(Debug, Clone)]
pub struct ImddRx {
    /// Equalized payload symbols.
    pub symbols: Vec<f64>,
    /// Residual noise variance on the training preamble.
    pub noise_var: f64,
    pub ffe: FfeState,
}

/// DC removal, matched filter, AGC and FFE. `decisions` selects
/// decision-directed tracking with that format's slicer; `None` freezes the
/// equalizer after training (analog payloads).
pub fn imdd_receive(
    cfg: &LinkConfig,
    received: &[f64],
    tx: &ImddTx,
    decisions: Option<ModFormat>,
) -> Result<ImddRx> {
    let sps = cfg.samples_per_symbol;
    let n_pre = tx.preamble.len();
    let guard = (cfg.filter_span * sps).min(n_pre * sps / 4);
    let dc_region = &received[guard..n_pre * sps - guard];
    let dc = dc_region.iter().sum::<f64>() / dc_region.len() as f64;
    let ac: Vec<f64> = received.iter().map(|v| v - dc).collect();
    let mut mf = matched_filter(&ac, &tx.taps);
    let power = mf.iter().map(|v| v * v).sum::<f64>() / mf.len() as f64;
    if power > 0.0 {
        let g = power.sqrt().recip();
        for v in &mut mf {
            *v *= g;
        }
    }
    let mut ffe = FfeState::new(cfg.dsp.ffe_taps, sps, cfg.dsp.ffe_step)?;
    for _ in 0..cfg.dsp.training_passes.max(1) {
        ffe.run(&mf, 0..n_pre, &Guide::Training(&tx.preamble))?;
    }
    let check = ffe.run(&mf, 0..n_pre, &Guide::Frozen)?;
    let noise_var = (check
        .iter()
        .zip(&tx.preamble)
        .map(|(y, d)| (y - d).powi(2))
        .sum::<f64>()
        / n_pre as f64)
        .max(MIN_NOISE_VAR);
    let payload = n_pre..n_pre + tx.payload_len;
    let symbols = match decisions {
        Some(fmt) => {
            ffe.step = cfg.dsp.ffe_dd_step;
            let points = fmt.constellation();
            let slicer = |y: f64| slice_nearest(&points, num_complex::Complex::new(y, 0.0)).re;
            ffe.run(&mf, payload, &Guide::Decisions(&slicer))?
        }
        None => ffe.run(&mf, payload, &Guide::Frozen)?,
    };
    Ok(ImddRx {
        symbols,
        noise_var,
        ffe,
    })
}
