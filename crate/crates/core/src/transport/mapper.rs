//! Linear analog joint source–channel mapper.
//!
//! The image is transformed per YCbCr plane with an 8×8 DCT. Each of the
//! 192 (plane, frequency) slots is a subband whose coefficients are sent as
//! raw amplitudes: the strongest subbands are kept, scaled by
//! `g ∝ (w/λ)^{1/4}` for unit mean power, and decoded with a per-subband
//! linear MMSE estimator. Quality therefore follows the channel SNR smoothly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::stream::{Layout, SymbolStream};
use crate::transform::{forward_plane, inverse_plane, Block, BLOCK};

pub const SLOTS: usize = 3 * BLOCK;
const LEVEL_SHIFT: f64 = 128.0;
/// Second moments below this are rounding residue of the colour transform.
const VARIANCE_FLOOR: f64 = 1e-12;

fn plane_weights() -> [f64; 3] {
    [
        3.0,
        0.344136f64.powi(2) + 1.772f64.powi(2),
        1.402f64.powi(2) + 0.714136f64.powi(2),
    ]
}

/// Channel uses per source value, counted in real or complex symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthRatio {
    pub value: f64,
    pub layout: Layout,
}

impl BandwidthRatio {
    pub fn real(value: f64) -> Self {
        Self {
            value,
            layout: Layout::Real,
        }
    }

    pub fn complex(value: f64) -> Self {
        Self {
            value,
            layout: Layout::Complex,
        }
    }

    /// Real values carried per slot unit of ratio.
    fn slots_per_unit(self) -> f64 {
        (SLOTS * self.layout.width()) as f64
    }

    /// Number of kept subbands, or the nearest achievable ratios.
    pub fn kept_slots(self) -> Result<usize> {
        let unit = self.slots_per_unit();
        let exact = self.value * unit;
        let k = exact.round();
        if (exact - k).abs() < 1e-9 && (1.0..=SLOTS as f64).contains(&k) {
            return Ok(k as usize);
        }
        let below = (exact.floor().clamp(1.0, SLOTS as f64)) / unit;
        let above = (exact.ceil().clamp(1.0, SLOTS as f64)) / unit;
        Err(Error::RatioNotAchievable {
            requested: self.value,
            below,
            above,
        })
    }
}

/// Side information needed to invert the mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogMapping {
    pub height: usize,
    pub width: usize,
    pub ratio: BandwidthRatio,
    /// Kept subbands in transmission order.
    pub kept: Vec<usize>,
    /// Per-subband gain; zero for discarded or empty subbands.
    pub gains: Vec<f64>,
    /// Per-subband second moment of the coefficients.
    pub variances: Vec<f64>,
    /// Peak amplitude of the emitted stream.
    pub peak: f64,
}

impl AnalogMapping {
    pub fn blocks(&self) -> usize {
        self.height * self.width / BLOCK
    }

    /// Real values in the stream.
    pub fn stream_reals(&self) -> usize {
        self.blocks() * self.kept.len()
    }
}

/// Encodes an image into `ratio · samples` channel symbols of unit mean power.
pub fn analog_encode(
    img: &ImageTensor,
    ratio: BandwidthRatio,
) -> Result<(SymbolStream, AnalogMapping)> {
    let n_kept = ratio.kept_slots()?;
    let (h, w) = img.dims();
    let planes = img.to_ycbcr();
    let coeffs: [Vec<Block<f64>>; 3] = std::array::from_fn(|c| {
        let shifted: Vec<f64> = planes[c].iter().map(|v| v - LEVEL_SHIFT).collect();
        forward_plane(&shifted, h, w)
    });
    let n_blocks = coeffs[0].len();
    let weights = plane_weights();
    let variances: Vec<f64> = (0..SLOTS)
        .map(|s| {
            coeffs[s / BLOCK]
                .iter()
                .map(|b| b[s % BLOCK].powi(2))
                .sum::<f64>()
                / n_blocks as f64
        })
        .map(|v| if v < VARIANCE_FLOOR { 0.0 } else { v })
        .collect();

    let mut order: Vec<usize> = (0..SLOTS).collect();
    // stable sort keeps low-frequency-first order among ties
    order.sort_by(|&a, &b| {
        (weights[b / BLOCK] * variances[b]).total_cmp(&(weights[a / BLOCK] * variances[a]))
    });
    let mut kept: Vec<usize> = order[..n_kept].to_vec();
    kept.sort_unstable();

    let mut gains = vec![0.0; SLOTS];
    for &s in &kept {
        if variances[s] > 0.0 {
            gains[s] = (weights[s / BLOCK] / variances[s]).powf(0.25);
        }
    }
    let power: f64 = kept
        .iter()
        .map(|&s| gains[s].powi(2) * variances[s])
        .sum::<f64>()
        / n_kept as f64;
    if power > 0.0 {
        let norm = power.sqrt();
        for g in &mut gains {
            *g /= norm;
        }
    }

    let mut raw = Vec::with_capacity(n_blocks * n_kept);
    for blk in 0..n_blocks {
        for &s in &kept {
            raw.push(gains[s] * coeffs[s / BLOCK][blk][s % BLOCK]);
        }
    }
    let peak = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let stream = SymbolStream::from_raw(raw, ratio.layout)?;
    Ok((
        stream,
        AnalogMapping {
            height: h,
            width: w,
            ratio,
            kept,
            gains,
            variances,
            peak,
        },
    ))
}

/// Per-subband linear MMSE decoding; `noise_var` is the noise variance per
/// real component. Discarded subbands are reconstructed as zero.
pub fn analog_decode(
    received: &SymbolStream,
    mapping: &AnalogMapping,
    noise_var: f64,
) -> Result<ImageTensor> {
    if !(noise_var >= 0.0) {
        return Err(Error::Domain(format!(
            "noise variance must be nonnegative (got {noise_var})"
        )));
    }
    let expected = mapping.stream_reals();
    if received.raw().len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: received.raw().len(),
        });
    }
    if mapping.gains.len() != SLOTS
        || mapping.variances.len() != SLOTS
        || mapping.kept.iter().any(|&s| s >= SLOTS)
    {
        return Err(Error::Config("malformed analog mapping".into()));
    }
    let factors: Vec<f64> = mapping
        .kept
        .iter()
        .map(|&s| {
            let (g, lam) = (mapping.gains[s], mapping.variances[s]);
            let denom = g * g * lam + noise_var;
            if g == 0.0 || denom == 0.0 {
                0.0
            } else {
                g * lam / denom
            }
        })
        .collect();
    let (h, w) = (mapping.height, mapping.width);
    let n_blocks = mapping.blocks();
    let mut coeffs: [Vec<Block<f64>>; 3] = std::array::from_fn(|_| vec![[0.0; BLOCK]; n_blocks]);
    for (blk, chunk) in received.raw().chunks_exact(mapping.kept.len()).enumerate() {
        for ((&s, &f), &y) in mapping.kept.iter().zip(&factors).zip(chunk) {
            coeffs[s / BLOCK][blk][s % BLOCK] = f * y;
        }
    }
    let planes: [Vec<f64>; 3] = std::array::from_fn(|c| {
        inverse_plane(&coeffs[c], h, w)
            .into_iter()
            .map(|v| v + LEVEL_SHIFT)
            .collect()
    });
    ImageTensor::from_ycbcr(h, w, &planes)
}
