//! 8-bit RGB images, binary PPM I/O and color transforms.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng;

/// An H×W×3 image with 8-bit samples stored row-major, RGB interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl ImageTensor {
    pub const CHANNELS: usize = 3;

    /// Both dimensions must be nonzero multiples of 8.
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 || height % 8 != 0 || width % 8 != 0 {
            return Err(Error::Image(format!(
                "dimensions {width}x{height} must be nonzero multiples of 8"
            )));
        }
        if data.len() != height * width * 3 {
            return Err(Error::LengthMismatch {
                expected: height * width * 3,
                got: data.len(),
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, rgb: [u8; 3]) -> Result<Self> {
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(height * width * 3)
            .collect();
        Self::new(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Number of 8-bit samples (H·W·3).
    pub fn samples(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Splits into three full-range YCbCr planes (JPEG convention).
    pub fn to_ycbcr(&self) -> [Vec<f64>; 3] {
        let n = self.height * self.width;
        let mut y = Vec::with_capacity(n);
        let mut cb = Vec::with_capacity(n);
        let mut cr = Vec::with_capacity(n);
        for px in self.data.chunks_exact(3) {
            let (r, g, b) = (f64::from(px[0]), f64::from(px[1]), f64::from(px[2]));
            y.push(0.299 * r + 0.587 * g + 0.114 * b);
            cb.push(128.0 - 0.168_736 * r - 0.331_264 * g + 0.5 * b);
            cr.push(128.0 + 0.5 * r - 0.418_688 * g - 0.081_312 * b);
        }
        [y, cb, cr]
    }

    /// Inverse of [`to_ycbcr`](Self::to_ycbcr) with rounding and clamping.
    pub fn from_ycbcr(height: usize, width: usize, planes: &[Vec<f64>; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * 3);
        for i in 0..height * width {
            let (y, cb, cr) = (planes[0][i], planes[1][i] - 128.0, planes[2][i] - 128.0);
            data.push(to_u8(y + 1.402 * cr));
            data.push(to_u8(y - 0.344_136 * cb - 0.714_136 * cr));
            data.push(to_u8(y + 1.772 * cb));
        }
        Self::new(height, width, data)
    }

    /// BT.601 luma plane.
    pub fn luma(&self) -> Vec<f64> {
        self.data
            .chunks_exact(3)
            .map(|p| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]))
            .collect()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Image("truncated PPM header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        if fields[0] != "P6" {
            return Err(Error::Image(format!("expected P6, found {}", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Image(format!("bad PPM field {s}")))
        };
        let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval != 255 {
            return Err(Error::Image(format!(
                "only 8-bit PPM is supported (maxval {maxval})"
            )));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let need = width * height * 3;
        if bytes.len() < pos + need {
            return Err(Error::Image("truncated PPM raster".into()));
        }
        Self::new(height, width, bytes[pos..pos + need].to_vec())
    }

    pub fn read_ppm(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_ppm(&fs::read(path)?)
    }

    pub fn write_ppm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_ppm())?;
        Ok(())
    }

    /// Mid-gray image used when a digital frame is lost.
    pub fn blank(height: usize, width: usize) -> Self {
        Self::filled(height, width, [128, 128, 128]).expect("dims validated by caller")
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Deterministic synthetic test scene: smooth illumination, soft-edged
/// objects, patches of oriented texture and mild sensor noise.
pub fn synthetic_scene(height: usize, width: usize, seed: u64) -> Result<ImageTensor> {
    let mut rng = rng::seeded_rng(seed, "fixture");
    let (h, w) = (height as f64, width as f64);
    let mut planes = vec![vec![0.0_f64; height * width]; 3];

    let base: [f64; 3] = [
        rng.random_range(70.0..150.0),
        rng.random_range(70.0..150.0),
        rng.random_range(70.0..150.0),
    ];
    let waves: Vec<_> = (0..6)
        .map(|_| {
            let fx = rng.random_range(-2.5..2.5) / w;
            let fy = rng.random_range(-2.5..2.5) / h;
            let ph = rng.random_range(0.0..std::f64::consts::TAU);
            let amp: [f64; 3] = [
                rng.random_range(5.0..30.0),
                rng.random_range(5.0..30.0),
                rng.random_range(5.0..30.0),
            ];
            (fx, fy, ph, amp)
        })
        .collect();
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            for (ch, plane) in planes.iter_mut().enumerate() {
                let mut v = base[ch];
                for (fx, fy, ph, amp) in &waves {
                    v += amp[ch]
                        * (std::f64::consts::TAU * (fx * c as f64 + fy * r as f64) + ph).cos();
                }
                plane[i] = v;
            }
        }
    }

    let n_objects = 10 + (height * width / 20_000).min(20);
    for _ in 0..n_objects {
        let cx = rng.random_range(0.0..w);
        let cy = rng.random_range(0.0..h);
        let rx = rng.random_range(0.04..0.25) * w;
        let ry = rng.random_range(0.04..0.25) * h;
        let rot = rng.random_range(0.0..std::f64::consts::PI);
        let color: [f64; 3] = [
            rng.random_range(20.0..235.0),
            rng.random_range(20.0..235.0),
            rng.random_range(20.0..235.0),
        ];
        let shade = rng.random_range(-0.4..0.4);
        let texture = if rng.random_bool(0.4) {
            Some((
                rng.random_range(0.15..0.6),
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(4.0..14.0),
            ))
        } else {
            None
        };
        let (s, co) = rot.sin_cos();
        let r0 = (cy - ry.max(rx) - 3.0).max(0.0) as usize;
        let r1 = ((cy + ry.max(rx) + 3.0) as usize).min(height);
        let c0 = (cx - ry.max(rx) - 3.0).max(0.0) as usize;
        let c1 = ((cx + ry.max(rx) + 3.0) as usize).min(width);
        for r in r0..r1 {
            for c in c0..c1 {
                let dx = c as f64 - cx;
                let dy = r as f64 - cy;
                let u = (dx * co + dy * s) / rx;
                let v = (-dx * s + dy * co) / ry;
                let d = (u * u + v * v).sqrt();
                // soft edge over roughly 1.5 px
                let edge = ((1.0 - d) * rx.min(ry) / 1.5).clamp(0.0, 1.0);
                if edge <= 0.0 {
                    continue;
                }
                let mut tex = 0.0;
                if let Some((freq, angle, amp)) = texture {
                    let (sa, ca) = f64::sin_cos(angle);
                    tex = amp * (freq * (dx * ca + dy * sa)).sin();
                }
                let i = r * width + c;
                for (ch, plane) in planes.iter_mut().enumerate() {
                    let val = color[ch] * (1.0 + shade * u) + tex;
                    plane[i] = plane[i] * (1.0 - edge) + val * edge;
                }
            }
        }
    }

    let noise = Normal::new(0.0, 1.5).expect("valid sigma");
    let mut data = Vec::with_capacity(height * width * 3);
    for i in 0..height * width {
        for plane in &planes {
            data.push(to_u8(plane[i] + noise.sample(&mut rng)));
        }
    }
    ImageTensor::new(height, width, data)
}
