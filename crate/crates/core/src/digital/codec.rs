//! Fixed-length block-DCT image codec with exact rate control.
//!
//! Each of the 192 (channel, frequency) slots gets a bit width from a greedy
//! rate–distortion allocation over measured quantizer distortion. The stream
//! is zero-padded to the requested length and closed by a CRC-32, so any
//! residual channel error makes the decode fail instead of producing a
//! silently damaged image.

use crate::digital::bits::BitBuffer;
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::transform::{forward_plane, inverse_plane, Block, BLOCK};

const MAGIC: u16 = 0xD1C7;
const SLOTS: usize = 3 * BLOCK;
const MAX_BITS: usize = 12;
const LEVEL_SHIFT: f64 = 128.0;
const BOUND_SCALE: f64 = 16.0;
const CRC_BITS: usize = 32;
/// Quantizer range candidates, in standard deviations about the slot mean.
const LOADINGS: [f64; 7] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, f64::INFINITY];

/// Squared-error weight of each YCbCr plane in RGB space (column norms of
/// the inverse colour transform).
fn plane_weights() -> [f64; 3] {
    [
        3.0,
        0.344136f64.powi(2) + 1.772f64.powi(2),
        1.402f64.powi(2) + 0.714136f64.powi(2),
    ]
}

/// Header bits with `active` coded slots, excluding the trailing CRC.
pub fn header_bits(active: usize) -> usize {
    16 + 32 + 4 * SLOTS + 3 * 32 + 32 * active
}

/// Smallest stream the codec can produce.
pub fn min_stream_bits() -> usize {
    header_bits(0) + CRC_BITS
}

#[derive(Debug, Clone, Copy)]
struct Quantizer {
    bits: usize,
    lo: i16,
    hi: i16,
}

impl Quantizer {
    fn step(&self) -> f64 {
        (f64::from(self.hi) - f64::from(self.lo)) / BOUND_SCALE / (1u64 << self.bits) as f64
    }

    fn index(&self, x: f64) -> u64 {
        let levels = 1u64 << self.bits;
        let q = ((x - f64::from(self.lo) / BOUND_SCALE) / self.step()).floor();
        q.clamp(0.0, (levels - 1) as f64) as u64
    }

    fn value(&self, q: u64) -> f64 {
        f64::from(self.lo) / BOUND_SCALE + (q as f64 + 0.5) * self.step()
    }
}

fn bound_units(v: f64, up: bool) -> i16 {
    let u = if up {
        (v * BOUND_SCALE).ceil()
    } else {
        (v * BOUND_SCALE).floor()
    };
    u.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
}

/// Best quantizer and its distortion for every bit width of one slot.
fn slot_table(values: &[f64], zero_value: f64) -> Vec<(f64, Option<Quantizer>)> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let d0: f64 = values.iter().map(|v| (v - zero_value).powi(2)).sum();
    let mut table = vec![(d0, None)];
    for bits in 1..=MAX_BITS {
        let mut best: (f64, Option<Quantizer>) = (f64::INFINITY, None);
        for k in LOADINGS {
            let lo = bound_units((mean - k * std).max(min), false);
            let mut hi = bound_units((mean + k * std).min(max), true);
            if hi <= lo {
                hi = lo.saturating_add(1);
            }
            let q = Quantizer { bits, lo, hi };
            let d: f64 = values
                .iter()
                .map(|&v| (v - q.value(q.index(v))).powi(2))
                .sum();
            if d < best.0 {
                best = (d, Some(q));
            }
        }
        table.push(best);
        if best.0 == 0.0 {
            break;
        }
    }
    table
}

fn planes_to_coefficients(img: &ImageTensor) -> [Vec<Block<f64>>; 3] {
    let (h, w) = img.dims();
    let planes = img.to_ycbcr();
    std::array::from_fn(|c| {
        let shifted: Vec<f64> = planes[c].iter().map(|v| v - LEVEL_SHIFT).collect();
        forward_plane(&shifted, h, w)
    })
}

/// Encodes `img` into exactly `target_bits` bits.
pub fn source_encode(img: &ImageTensor, target_bits: usize) -> Result<BitBuffer> {
    let (h, w) = img.dims();
    if h > usize::from(u16::MAX) || w > usize::from(u16::MAX) {
        return Err(Error::Image(format!(
            "{w}×{h} exceeds the codec's 16-bit dimension fields"
        )));
    }
    if target_bits < min_stream_bits() {
        return Err(Error::RateInfeasible {
            target: target_bits,
            minimum: min_stream_bits(),
        });
    }
    let coeffs = planes_to_coefficients(img);
    let n_blocks = coeffs[0].len();
    let dc_means: [f64; 3] = std::array::from_fn(|c| {
        f64::from((coeffs[c].iter().map(|b| b[0]).sum::<f64>() / n_blocks as f64) as f32)
    });
    let weights = plane_weights();

    let tables: Vec<Vec<(f64, Option<Quantizer>)>> = (0..SLOTS)
        .map(|s| {
            let (c, u) = (s / BLOCK, s % BLOCK);
            let values: Vec<f64> = coeffs[c].iter().map(|b| b[u]).collect();
            let zero = if u == 0 { dc_means[c] } else { 0.0 };
            slot_table(&values, zero)
        })
        .collect();

    // Greedy allocation by weighted distortion drop per bit.
    let mut alloc = [0usize; SLOTS];
    let mut remaining = target_bits - min_stream_bits();
    loop {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for s in 0..SLOTS {
            let wgt = weights[s / BLOCK];
            let cur = alloc[s];
            let table = &tables[s];
            for nb in cur + 1..table.len() {
                let cost = n_blocks * (nb - cur) + if cur == 0 { 32 } else { 0 };
                if cost > remaining {
                    break;
                }
                let gain = wgt * (table[cur].0 - table[nb].0);
                let ratio = gain / cost as f64;
                if gain > 0.0 && best.is_none_or(|b| ratio > b.0) {
                    best = Some((ratio, s, nb, cost));
                }
            }
        }
        let Some((_, s, nb, cost)) = best else { break };
        alloc[s] = nb;
        remaining -= cost;
    }

    let mut out = BitBuffer::with_capacity(target_bits);
    out.push_bits(u64::from(MAGIC), 16);
    out.push_bits(w as u64, 16);
    out.push_bits(h as u64, 16);
    for &b in &alloc {
        out.push_bits(b as u64, 4);
    }
    let quantizers: Vec<Option<Quantizer>> = (0..SLOTS)
        .map(|s| {
            if alloc[s] == 0 {
                None
            } else {
                tables[s][alloc[s]].1
            }
        })
        .collect();
    for q in quantizers.iter().flatten() {
        out.push_bits(u64::from(q.lo as u16), 16);
        out.push_bits(u64::from(q.hi as u16), 16);
    }
    for m in dc_means {
        out.push_bits(u64::from((m as f32).to_bits()), 32);
    }
    for blk in 0..n_blocks {
        for (s, q) in quantizers.iter().enumerate() {
            if let Some(q) = q {
                out.push_bits(q.index(coeffs[s / BLOCK][blk][s % BLOCK]), q.bits as u32);
            }
        }
    }
    debug_assert!(out.len() + CRC_BITS <= target_bits);
    out.resize(target_bits - CRC_BITS);
    let crc = crc32fast::hash(out.as_bytes());
    out.push_bits(u64::from(crc), 32);
    Ok(out)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptStream(msg.into())
}

/// Decodes a stream produced by [`source_encode`]; `dims` is `(height, width)`.
pub fn source_decode(bits: &BitBuffer, dims: (usize, usize)) -> Result<ImageTensor> {
    let (h, w) = dims;
    if bits.len() < min_stream_bits() {
        return Err(corrupt(format!(
            "{} bits is shorter than any valid stream",
            bits.len()
        )));
    }
    let body = bits.slice(0, bits.len() - CRC_BITS);
    let stored = bits
        .slice(bits.len() - CRC_BITS, bits.len())
        .reader()
        .read(32)
        .unwrap_or_default();
    if u64::from(crc32fast::hash(body.as_bytes())) != stored {
        return Err(corrupt("checksum mismatch"));
    }
    let mut r = body.reader();
    let mut field = |n: u32| r.read(n).ok_or_else(|| corrupt("header truncated"));
    if field(16)? != u64::from(MAGIC) {
        return Err(corrupt("bad stream magic"));
    }
    let (sw, sh) = (field(16)? as usize, field(16)? as usize);
    if (sh, sw) != (h, w) {
        return Err(corrupt(format!("stream is {sw}×{sh}, expected {w}×{h}")));
    }
    let mut alloc = [0usize; SLOTS];
    for a in alloc.iter_mut() {
        *a = field(4)? as usize;
        if *a > MAX_BITS {
            return Err(corrupt("slot width out of range"));
        }
    }
    let mut quantizers: Vec<Option<Quantizer>> = vec![None; SLOTS];
    for s in 0..SLOTS {
        if alloc[s] > 0 {
            let lo = field(16)? as u16 as i16;
            let hi = field(16)? as u16 as i16;
            if hi <= lo {
                return Err(corrupt("empty quantizer range"));
            }
            quantizers[s] = Some(Quantizer {
                bits: alloc[s],
                lo,
                hi,
            });
        }
    }
    let mut dc_means = [0.0f64; 3];
    for m in dc_means.iter_mut() {
        *m = f64::from(f32::from_bits(field(32)? as u32));
        if !m.is_finite() {
            return Err(corrupt("non-finite DC mean"));
        }
    }
    let img = ImageTensor::blank(h, w);
    let n_blocks = img.samples() / 3 / BLOCK;
    let per_block: usize = alloc.iter().sum();
    if r.remaining() < n_blocks * per_block {
        return Err(corrupt("payload shorter than allocation"));
    }
    let mut coeffs: [Vec<Block<f64>>; 3] = std::array::from_fn(|c| {
        let mut b = [0.0; BLOCK];
        b[0] = dc_means[c];
        vec![b; n_blocks]
    });
    for blk in 0..n_blocks {
        for (s, q) in quantizers.iter().enumerate() {
            if let Some(q) = q {
                let idx = r
                    .read(q.bits as u32)
                    .ok_or_else(|| corrupt("payload truncated"))?;
                coeffs[s / BLOCK][blk][s % BLOCK] = q.value(idx);
            }
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
