//! Gray-mapped OOK/PAM4/QPSK/16QAM modulation and max-log LLR demapping.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::digital::bits::BitBuffer;
use crate::error::{domain, Error, Result};
use crate::stream::{Layout, SymbolStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModFormat {
    Ook,
    Pam4,
    Qpsk,
    Qam16,
}

impl ModFormat {
    pub const ALL: [ModFormat; 4] = [
        ModFormat::Ook,
        ModFormat::Pam4,
        ModFormat::Qpsk,
        ModFormat::Qam16,
    ];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModFormat::Ook => 1,
            ModFormat::Pam4 | ModFormat::Qpsk => 2,
            ModFormat::Qam16 => 4,
        }
    }

    pub fn layout(self) -> Layout {
        match self {
            ModFormat::Ook | ModFormat::Pam4 => Layout::Real,
            ModFormat::Qpsk | ModFormat::Qam16 => Layout::Complex,
        }
    }

    /// Constellation indexed by the symbol's bit label (first bit MSB).
    /// Every constellation has unit mean power.
    pub fn constellation(self) -> Vec<Complex<f64>> {
        let c = |re: f64, im: f64| Complex::new(re, im);
        match self {
            ModFormat::Ook => vec![c(-1.0, 0.0), c(1.0, 0.0)],
            ModFormat::Pam4 => (0..4)
                .map(|l| c(pam4_level(l) / 5f64.sqrt(), 0.0))
                .collect(),
            ModFormat::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                vec![c(a, a), c(-a, a), c(a, -a), c(-a, -a)]
            }
            ModFormat::Qam16 => {
                let s = 10f64.sqrt();
                (0..16)
                    .map(|l| c(pam4_level(l >> 2) / s, pam4_level(l & 3) / s))
                    .collect()
            }
        }
    }
}

/// Gray PAM4: labels 00, 01, 11, 10 → −3, −1, +1, +3.
fn pam4_level(label: usize) -> f64 {
    match label {
        0b00 => -3.0,
        0b01 => -1.0,
        0b11 => 1.0,
        _ => 3.0,
    }
}

impl fmt::Display for ModFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModFormat::Ook => "ook",
            ModFormat::Pam4 => "pam4",
            ModFormat::Qpsk => "qpsk",
            ModFormat::Qam16 => "16qam",
        })
    }
}

impl FromStr for ModFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ook" => Ok(ModFormat::Ook),
            "pam4" => Ok(ModFormat::Pam4),
            "qpsk" => Ok(ModFormat::Qpsk),
            "16qam" | "qam16" => Ok(ModFormat::Qam16),
            other => Err(Error::Config(format!(
                "unknown modulation format {other:?}"
            ))),
        }
    }
}

pub fn modulate(bits: &BitBuffer, fmt: ModFormat) -> Result<SymbolStream> {
    let b = fmt.bits_per_symbol();
    if bits.len() % b != 0 {
        return Err(domain(format!(
            "{} bits is not a multiple of {b} for {fmt}",
            bits.len()
        )));
    }
    let points = fmt.constellation();
    let labels = (0..bits.len() / b)
        .map(|s| (0..b).fold(0usize, |acc, j| acc << 1 | usize::from(bits.get(s * b + j))));
    Ok(match fmt.layout() {
        Layout::Real => SymbolStream::from_real(labels.map(|l| points[l].re).collect())?,
        Layout::Complex => {
            SymbolStream::from_complex(&labels.map(|l| points[l]).collect::<Vec<_>>())?
        }
    })
}

/// Max-log LLRs (positive favours bit 0). `noise_var` is the per-dimension
/// variance σ² for real formats and E|n|² for complex ones.
pub fn demodulate_llr(symbols: &SymbolStream, fmt: ModFormat, noise_var: f64) -> Result<Vec<f64>> {
    if symbols.layout() != fmt.layout() {
        return Err(domain(format!("{fmt} needs a {:?} stream", fmt.layout())));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(domain(format!(
            "noise variance must be positive (got {noise_var})"
        )));
    }
    let denom = match fmt.layout() {
        Layout::Real => 2.0 * noise_var,
        Layout::Complex => noise_var,
    };
    let points = fmt.constellation();
    let b = fmt.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * b);
    let mut d2 = vec![0.0; points.len()];
    for y in symbols.to_complex() {
        for (d, p) in d2.iter_mut().zip(&points) {
            *d = (y - p).norm_sqr();
        }
        for j in 0..b {
            let shift = b - 1 - j;
            let (mut m0, mut m1) = (f64::INFINITY, f64::INFINITY);
            for (label, &d) in d2.iter().enumerate() {
                if label >> shift & 1 == 0 {
                    m0 = m0.min(d);
                } else {
                    m1 = m1.min(d);
                }
            }
            out.push((m1 - m0) / denom);
        }
    }
    Ok(out)
}

/// Hard decisions from LLRs.
pub fn hard_decisions(llrs: &[f64]) -> BitBuffer {
    BitBuffer::from_bits(llrs.iter().map(|&l| l < 0.0))
}

/// Nearest constellation point, used as the equalizer slicer.
pub fn slice_nearest(points: &[Complex<f64>], y: Complex<f64>) -> Complex<f64> {
    *points
        .iter()
        .min_by(|a, b| (y - **a).norm_sqr().total_cmp(&(y - **b).norm_sqr()))
        .expect("nonempty constellation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpsk_gray_mapping() {
        let bits = BitBuffer::from_bits([false, false, false, true, true, true, true, false]);
        let s = modulate(&bits, ModFormat::Qpsk).unwrap().to_complex();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            Complex::new(a, a),
            Complex::new(-a, a),
            Complex::new(-a, -a),
            Complex::new(a, -a),
        ];
        for (x, y) in s.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn pam4_levels_in_gray_order() {
        let bits = BitBuffer::from_bits([false, false, false, true, true, true, true, false]);
        let s = modulate(&bits, ModFormat::Pam4).unwrap();
        let r5 = 5f64.sqrt();
        assert_eq!(s.raw(), &[-3.0 / r5, -1.0 / r5, 1.0 / r5, 3.0 / r5]);
    }

    #[test]
    fn unit_power_and_gray_neighbours() {
        for fmt in ModFormat::ALL {
            let pts = fmt.constellation();
            let p: f64 = pts.iter().map(|c| c.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{fmt}");
            let dmin = (0..pts.len())
                .flat_map(|i| (0..pts.len()).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| (pts[i] - pts[j]).norm())
                .fold(f64::INFINITY, f64::min);
            for i in 0..pts.len() {
                for j in 0..pts.len() {
                    if i != j && ((pts[i] - pts[j]).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{fmt}: {i} vs {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn llr_signs_invert_mapping() {
        for fmt in ModFormat::ALL {
            let n = 64 * fmt.bits_per_symbol();
            let bits = BitBuffer::from_bits((0..n).map(|i| (i * 7 + i / 3) % 5 < 2));
            let s = modulate(&bits, fmt).unwrap();
            let llr = demodulate_llr(&s, fmt, 0.01).unwrap();
            assert_eq!(hard_decisions(&llr), bits, "{fmt}");
        }
    }

    #[test]
    fn ook_llr_is_linear() {
        let s = SymbolStream::from_real(vec![0.3]).unwrap();
        let llr = demodulate_llr(&s, ModFormat::Ook, 0.5).unwrap();
        // ((0.3+1)² − (0.3−1)²)/(2·0.5) = 1.2 → negative sign: bit 1 favoured
        assert!((llr[0] + 1.2).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(modulate(&BitBuffer::zeros(3), ModFormat::Qpsk).is_err());
        let s = SymbolStream::from_real(vec![0.0; 4]).unwrap();
        assert!(demodulate_llr(&s, ModFormat::Qpsk, 1.0).is_err());
        assert!(demodulate_llr(&s, ModFormat::Ook, 0.0).is_err());
        assert_eq!("16QAM".parse::<ModFormat>().unwrap(), ModFormat::Qam16);
        assert!("bpsk".parse::<ModFormat>().is_err());
    }
}
