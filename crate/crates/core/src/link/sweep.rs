//! ROP sweeps and turbulence time-series runs.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibrate::resolve_noise;
use super::frame::{run_frame, PreparedImage};
use super::{Scheme, System};
use crate::channel::{rop_timeseries, ChannelRealization};
use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::report::RunReport;

fn default_frames() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Received optical powers, dBm, strictly increasing.
    pub rop_grid: Vec<f64>,
    #[serde(default = "default_frames")]
    pub frames_per_point: usize,
    pub schemes: Vec<Scheme>,
    /// PPM images; frame `f` uses image `f mod len`.
    #[serde(default)]
    pub dataset: Vec<PathBuf>,
}

impl SweepSpec {
    /// Grid from `start` to `stop` inclusive in `step` dB increments.
    pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rop_grid.is_empty() || self.rop_grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "rop_grid must be a nonempty list of finite values".into(),
            ));
        }
        if self.rop_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("rop_grid must be strictly increasing".into()));
        }
        if self.frames_per_point == 0 {
            return Err(Error::Config("frames_per_point must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        Ok(())
    }

    /// Reads a sweep spec; relative dataset paths resolve against its file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec: Self = serde_json::from_slice(&std::fs::read(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in &mut spec.dataset {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load_images(&self) -> Result<Vec<ImageTensor>> {
        self.dataset.iter().map(ImageTensor::read_ppm).collect()
    }
}

struct Job {
    sample_index: usize,
    scheme: Scheme,
    realization: ChannelRealization,
    image: usize,
    noise_index: u64,
}

fn prepare(
    system: System,
    schemes: &[Scheme],
    images: &[ImageTensor],
    used: usize,
) -> Result<Vec<PreparedImage>> {
    if images.is_empty() {
        return Err(Error::Config("at least one image is required".into()));
    }
    images[..used.min(images.len())]
        .par_iter()
        .map(|img| PreparedImage::new(img.clone(), system, schemes))
        .collect()
}

fn execute(
    cfg: &LinkConfig,
    system: System,
    schemes: &[Scheme],
    prepared: &[PreparedImage],
    jobs: Vec<Job>,
) -> Result<RunReport> {
    let rows = jobs
        .par_iter()
        .map(|j| {
            run_frame(
                cfg,
                &prepared[j.image],
                j.scheme,
                &j.realization,
                j.sample_index,
                j.noise_index,
            )
            .map(|o| o.row)
        })
        .collect::<Result<Vec<_>>>()?;
    let rates = schemes
        .iter()
        .map(|&s| prepared[0].image_rate(s, cfg).map(|r| (s, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport::new(system, cfg.seed, rows, &rates))
}

/// Sweep over the images listed in `spec.dataset`.
pub fn rop_sweep(cfg: &LinkConfig, spec: &SweepSpec, system: System) -> Result<RunReport> {
    let images = spec.load_images()?;
    rop_sweep_images(cfg, spec, system, &images)
}

/// Every scheme at every grid point and frame, with the fading gain fixed
/// so the frame lands exactly on the grid ROP. Frame `f` uses noise lane
/// index `f` at every point, so schemes and ROPs are compared on common
/// noise.
pub fn rop_sweep_images(
    cfg: &LinkConfig,
    spec: &SweepSpec,
    system: System,
    images: &[ImageTensor],
) -> Result<RunReport> {
    spec.validate()?;
    let cfg = resolve_noise(cfg, system)?;
    let prepared = prepare(system, &spec.schemes, images, spec.frames_per_point)?;
    let mut jobs = Vec::new();
    for (p, &rop) in spec.rop_grid.iter().enumerate() {
        for f in 0..spec.frames_per_point {
            for &scheme in &spec.schemes {
                jobs.push(Job {
                    sample_index: p * spec.frames_per_point + f,
                    scheme,
                    realization: ChannelRealization::at_rop(rop),
                    image: f % prepared.len(),
                    noise_index: f as u64,
                });
            }
        }
    }
    execute(&cfg, system, &spec.schemes, &prepared, jobs)
}

/// `n_captures` independent quasi-static captures drawn from the configured
/// turbulence, each carrying every scheme.
pub fn turbulence_run<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    system: System,
    n_captures: usize,
    schemes: &[Scheme],
    images: &[ImageTensor],
    rng: &mut R,
) -> Result<RunReport> {
    let series = rop_timeseries(cfg, n_captures, rng)?;
    turbulence_run_with(cfg, system, &series, schemes, images)
}

/// Turbulence run over a given capture series.
pub fn turbulence_run_with(
    cfg: &LinkConfig,
    system: System,
    series: &[ChannelRealization],
    schemes: &[Scheme],
    images: &[ImageTensor],
) -> Result<RunReport> {
    if schemes.is_empty() {
        return Err(Error::Config("at least one scheme is required".into()));
    }
    let cfg = resolve_noise(cfg, system)?;
    let prepared = prepare(system, schemes, images, series.len())?;
    let jobs = series
        .iter()
        .enumerate()
        .flat_map(|(c, real)| {
            let image = c % prepared.len();
            schemes.iter().map(move |&scheme| Job {
                sample_index: c,
                scheme,
                realization: *real,
                image,
                noise_index: c as u64,
            })
        })
        .collect();
    execute(&cfg, system, schemes, &prepared, jobs)
}
