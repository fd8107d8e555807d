//! Multi-scale structural similarity on BT.601 luma.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageTensor;

pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsSsimReport {
    pub score: f64,
    pub scales: usize,
    /// Contrast-structure term per scale (the last entry is the full SSIM
    /// term of the coarsest scale).
    pub terms: Vec<f64>,
}

fn gaussian_window() -> [f64; WINDOW] {
    let c = (WINDOW / 2) as f64;
    let mut g: [f64; WINDOW] =
        std::array::from_fn(|i| (-((i as f64 - c).powi(2)) / (2.0 * SIGMA * SIGMA)).exp());
    let s: f64 = g.iter().sum();
    for v in &mut g {
        *v /= s;
    }
    g
}

/// Separable "valid" Gaussian filtering.
fn filter_valid(img: &[f64], h: usize, w: usize, g: &[f64; WINDOW]) -> (Vec<f64>, usize, usize) {
    let (oh, ow) = (h + 1 - WINDOW, w + 1 - WINDOW);
    let mut tmp = vec![0.0; h * ow];
    for r in 0..h {
        for c in 0..ow {
            tmp[r * ow + c] = (0..WINDOW).map(|k| g[k] * img[r * w + c + k]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..WINDOW).map(|k| g[k] * tmp[(r + k) * ow + c]).sum();
        }
    }
    (out, oh, ow)
}

/// Mean luminance and contrast-structure terms at one scale.
fn ssim_terms(x: &[f64], y: &[f64], h: usize, w: usize, g: &[f64; WINDOW]) -> (f64, f64) {
    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let (mx, oh, ow) = filter_valid(x, h, w, g);
    let (my, _, _) = filter_valid(y, h, w, g);
    let (sxx, _, _) = filter_valid(&xx, h, w, g);
    let (syy, _, _) = filter_valid(&yy, h, w, g);
    let (sxy, _, _) = filter_valid(&xy, h, w, g);
    let n = (oh * ow) as f64;
    let (mut l_sum, mut cs_sum) = (0.0, 0.0);
    for i in 0..oh * ow {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cov = sxy[i] - ux * uy;
        l_sum += (2.0 * ux * uy + c1) / (ux * ux + uy * uy + c1);
        cs_sum += (2.0 * cov + c2) / (vx + vy + c2);
    }
    (l_sum / n, cs_sum / n)
}

fn downsample(img: &[f64], h: usize, w: usize) -> (Vec<f64>, usize, usize) {
    let (nh, nw) = (h / 2, w / 2);
    let mut out = Vec::with_capacity(nh * nw);
    for r in 0..nh {
        for c in 0..nw {
            let i = 2 * r * w + 2 * c;
            out.push(0.25 * (img[i] + img[i + 1] + img[i + w] + img[i + w + 1]));
        }
    }
    (out, nh, nw)
}

/// Number of scales whose coarsest level still fits the window.
fn scales_for(min_dim: usize) -> usize {
    (1..=MS_SSIM_WEIGHTS.len())
        .rev()
        .find(|&m| min_dim >> (m - 1) >= WINDOW)
        .unwrap_or(0)
}

pub fn ms_ssim_report(a: &ImageTensor, b: &ImageTensor) -> Result<MsSsimReport> {
    if a.dims() != b.dims() {
        return Err(Error::Image(format!(
            "dimension mismatch {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let (h, w) = a.dims();
    let scales = scales_for(h.min(w));
    if scales == 0 {
        return Err(Error::Image(format!(
            "{w}×{h} is smaller than the {WINDOW}×{WINDOW} window"
        )));
    }
    if a.data() == b.data() {
        return Ok(MsSsimReport {
            score: 1.0,
            scales,
            terms: vec![1.0; scales],
        });
    }
    let weight_sum: f64 = MS_SSIM_WEIGHTS[..scales].iter().sum();
    let g = gaussian_window();
    let (mut x, mut y, mut hh, mut ww) = (a.luma(), b.luma(), h, w);
    let mut terms = Vec::with_capacity(scales);
    let mut score = 1.0;
    for s in 0..scales {
        let (l, cs) = ssim_terms(&x, &y, hh, ww, &g);
        let weight = MS_SSIM_WEIGHTS[s] / weight_sum;
        let term = if s + 1 == scales {
            (l * cs).max(0.0)
        } else {
            cs.max(0.0)
        };
        terms.push(term);
        score *= term.powf(weight);
        if s + 1 < scales {
            let (nx, nh, nw) = downsample(&x, hh, ww);
            let (ny, _, _) = downsample(&y, hh, ww);
            (x, y, hh, ww) = (nx, ny, nh, nw);
        }
    }
    // 1 is reserved for byte-identical images
    let score = score.clamp(0.0, 1.0 - f64::EPSILON);
    Ok(MsSsimReport {
        score,
        scales,
        terms,
    })
}

/// MS-SSIM in [0, 1]; exactly 1 only for byte-identical images.
pub fn ms_ssim(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    ms_ssim_report(a, b).map(|r| r.score)
}
