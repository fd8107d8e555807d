//! Image-quality and link metrics.

mod ssim;

pub use ssim::{ms_ssim, ms_ssim_report, MsSsimReport, MS_SSIM_WEIGHTS};

use serde::{Deserialize, Serialize};

use crate::digital::BitBuffer;
use crate::error::{domain, Error, Result};
use crate::image::ImageTensor;

/// Reporting cap for dB-scaled quality of identical images.
pub const DB_CAP: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub ms_ssim: f64,
    pub ms_ssim_db: f64,
    pub psnr_db: f64,
}

impl QualityScore {
    pub fn between(reference: &ImageTensor, test: &ImageTensor) -> Result<Self> {
        let s = ms_ssim(reference, test)?;
        Ok(Self {
            ms_ssim: s,
            ms_ssim_db: ms_ssim_db(s)?,
            psnr_db: psnr(reference, test)?,
        })
    }
}

/// `−10·log10(1 − s)`, capped at [`DB_CAP`].
pub fn ms_ssim_db(score: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&score) {
        return Err(domain(format!("MS-SSIM must be in [0, 1] (got {score})")));
    }
    if score >= 1.0 {
        return Ok(DB_CAP);
    }
    Ok((-10.0 * (1.0 - score).log10()).min(DB_CAP))
}

/// Peak signal-to-noise ratio over all 8-bit samples, capped at [`DB_CAP`].
pub fn psnr(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::Image(format!(
            "dimension mismatch {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let sse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (f64::from(x) - f64::from(y)).powi(2))
        .sum();
    if sse == 0.0 {
        return Ok(DB_CAP);
    }
    let mse = sse / a.data().len() as f64;
    Ok((10.0 * (255.0f64 * 255.0 / mse).log10()).min(DB_CAP))
}

/// Fraction of differing bits.
pub fn ber(tx: &BitBuffer, rx: &BitBuffer) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            got: rx.len(),
        });
    }
    if tx.is_empty() {
        return Err(domain("BER of empty sequences is undefined"));
    }
    Ok(tx.hamming_distance(rx) as f64 / tx.len() as f64)
}

/// Images per second: `R_s · overhead / N`.
pub fn image_rate(symbol_rate: f64, symbols_per_image: f64, overhead_factor: f64) -> Result<f64> {
    if !(symbol_rate > 0.0 && symbols_per_image > 0.0) {
        return Err(domain("symbol rate and symbols per image must be positive"));
    }
    if !(overhead_factor > 0.0 && overhead_factor <= 1.0) {
        return Err(domain(format!(
            "overhead factor must be in (0, 1] (got {overhead_factor})"
        )));
    }
    Ok(symbol_rate * overhead_factor / symbols_per_image)
}
