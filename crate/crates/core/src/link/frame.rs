//! One image through one scheme over one channel state.

use super::coherent::{
    coherent_receive, coherent_transmit, merge_pols, pols_to_tributaries, run_coherent, split_pols,
    tributaries_to_pols, CoherentImpairments,
};
use super::imdd::{imdd_receive, imdd_transmit, run_imdd};
use super::{Scheme, System};
use crate::channel::ChannelRealization;
use crate::config::LinkConfig;
use crate::digital::{
    digital_budget, td_receive_image, td_transmit_image, LdpcCode, ModFormat, TdFrame,
};
use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::metrics::{image_rate, QualityScore};
use crate::report::FrameRow;
use crate::rng::{seeded_rng_indexed, NOISE, PHASE_NOISE};
use crate::stream::{Layout, SymbolStream};
use crate::transport::{
    analog_decode, analog_encode, papr, parallel_to_serial, serial_to_parallel, AnalogMapping,
    BandwidthRatio,
};

/// Real channel uses per 8-bit source value for the analog scheme.
pub const ANALOG_RATIO: f64 = 0.125;

#[derive(Debug, Clone)]
enum Payload {
    Digital {
        fmt: ModFormat,
        budget: usize,
        frame: TdFrame,
    },
    Analog {
        stream: SymbolStream,
        mapping: AnalogMapping,
    },
}

impl Payload {
    fn symbols(&self) -> &SymbolStream {
        match self {
            Payload::Digital { frame, .. } => &frame.symbols,
            Payload::Analog { stream, .. } => stream,
        }
    }
}

/// An image with its transmit-side encodings, computed once and reused for
/// every channel state.
#[derive(Debug, Clone)]
pub struct PreparedImage {
    pub image: ImageTensor,
    system: System,
    payloads: Vec<(Scheme, Payload)>,
}

impl PreparedImage {
    pub fn new(image: ImageTensor, system: System, schemes: &[Scheme]) -> Result<Self> {
        let code = LdpcCode::standard();
        let mut payloads = Vec::with_capacity(schemes.len());
        for &scheme in schemes {
            if !system.supports(scheme) {
                return Err(Error::Config(format!(
                    "scheme {scheme} is not available on {system}"
                )));
            }
            let payload = match scheme.format() {
                Some(fmt) => {
                    let budget = digital_budget(fmt, image.samples());
                    Payload::Digital {
                        fmt,
                        budget,
                        frame: td_transmit_image(&image, fmt, code, budget)?,
                    }
                }
                None => {
                    // coherent links carry the same real stream on four tributaries
                    let (stream, mapping) =
                        analog_encode(&image, BandwidthRatio::real(ANALOG_RATIO))?;
                    Payload::Analog { stream, mapping }
                }
            };
            payloads.push((scheme, payload));
        }
        Ok(Self {
            image,
            system,
            payloads,
        })
    }

    fn payload(&self, scheme: Scheme) -> Result<&Payload> {
        self.payloads
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Config(format!("scheme {scheme} was not prepared")))
    }

    /// Channel symbols per image on one lane: the real stream for IM/DD, one
    /// polarization's complex stream for coherent.
    pub fn lane_symbols(&self, scheme: Scheme) -> Result<usize> {
        let s = self.payload(scheme)?.symbols();
        Ok(match self.system {
            System::Imdd => s.len(),
            System::Coherent => s.raw().len().div_ceil(4),
        })
    }

    /// Images per second at `baud_rate`; coherent lanes carry pilots.
    pub fn image_rate(&self, scheme: Scheme, cfg: &LinkConfig) -> Result<f64> {
        let n = self.lane_symbols(scheme)?;
        let overhead = match self.system {
            System::Imdd => 1.0,
            System::Coherent => {
                let s = cfg.dsp.pilot_spacing as f64;
                (s - 1.0) / s
            }
        };
        image_rate(cfg.baud_rate, n as f64, overhead)
    }
}

#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub row: FrameRow,
    pub image: Option<ImageTensor>,
}

/// Runs `scheme` for `prepared` over `realization`. Noise and phase-noise
/// lanes are indexed by `noise_index`, so frames sharing an index see the
/// same noise samples regardless of scheme or ROP. `cfg` must carry resolved
/// noise parameters.
pub fn run_frame(
    cfg: &LinkConfig,
    prepared: &PreparedImage,
    scheme: Scheme,
    realization: &ChannelRealization,
    sample_index: usize,
    noise_index: u64,
) -> Result<FrameOutcome> {
    let payload = prepared.payload(scheme)?;
    let dims = prepared.image.dims();
    let code = LdpcCode::standard();
    let mut noise = seeded_rng_indexed(cfg.seed, NOISE, noise_index);
    let mut phase = seeded_rng_indexed(cfg.seed, PHASE_NOISE, noise_index);
    let papr_db = papr(payload.symbols())?.papr_db;

    // (received symbols, noise variance per real dimension for analog / per symbol for digital)
    let (received, noise_var) =
        match prepared.system {
            System::Imdd => {
                let floor =
                    cfg.noise.imdd.noise_floor.ok_or_else(|| {
                        Error::Config("IM/DD noise floor is not calibrated".into())
                    })?;
                let (training, decisions) = match payload {
                    Payload::Digital { fmt, .. } => (*fmt, Some(*fmt)),
                    Payload::Analog { .. } => (ModFormat::Pam4, None),
                };
                let tx = imdd_transmit(cfg, payload.symbols().raw(), training)?;
                let rx = run_imdd(cfg, &tx.intensity, realization, floor, &mut noise)?;
                let out = imdd_receive(cfg, &rx, &tx, decisions)?;
                (SymbolStream::from_real(out.symbols)?, out.noise_var)
            }
            System::Coherent => {
                let snr_ref_db = cfg.noise.coherent.snr_ref_db.ok_or_else(|| {
                    Error::Config("coherent reference SNR is not calibrated".into())
                })?;
                let anchor_mw = 10f64.powf(cfg.noise.coherent.anchor.rop_dbm / 10.0);
                let n0 = anchor_mw / 10f64.powf(snr_ref_db / 10.0);
                let impairments = CoherentImpairments::from_config(cfg);
                match payload {
                    Payload::Digital { frame, .. } => {
                        let symbols = frame.symbols.to_complex();
                        let tx = coherent_transmit(cfg, &split_pols(&symbols))?;
                        let rx = run_coherent(
                            cfg,
                            &tx,
                            realization,
                            n0,
                            &impairments,
                            &mut noise,
                            &mut phase,
                        )?;
                        let out = coherent_receive(cfg, &rx, &tx, true)?;
                        (
                            SymbolStream::from_complex(&merge_pols(&out.pols, symbols.len()))?,
                            out.noise_var,
                        )
                    }
                    Payload::Analog { stream, .. } => {
                        let t = serial_to_parallel(stream);
                        let tx = coherent_transmit(cfg, &tributaries_to_pols(&t))?;
                        let rx = run_coherent(
                            cfg,
                            &tx,
                            realization,
                            n0,
                            &impairments,
                            &mut noise,
                            &mut phase,
                        )?;
                        let out = coherent_receive(cfg, &rx, &tx, true)?;
                        let back = pols_to_tributaries(&out.pols, t.pad);
                        (
                            parallel_to_serial(&back, Layout::Real)?,
                            out.noise_var / 2.0,
                        )
                    }
                }
            }
        };

    let rop_dbm = realization.rop_dbm;
    let (image, ber_pre_fec, ber_post_fec) = match payload {
        Payload::Digital { fmt, budget, frame } => {
            let rx = td_receive_image(&received, *fmt, code, noise_var, dims, *budget)?;
            let (pre, post) = (rx.ber_pre_fec(frame), rx.ber_post_fec(frame));
            (rx.image, Some(pre), Some(post))
        }
        Payload::Analog { mapping, .. } => (
            Some(analog_decode(&received, mapping, noise_var)?),
            None,
            None,
        ),
    };
    let (ms_ssim, ms_ssim_db) = match &image {
        Some(img) => {
            let q = QualityScore::between(&prepared.image, img)?;
            (q.ms_ssim, q.ms_ssim_db)
        }
        None => (0.0, 0.0),
    };
    let row = FrameRow {
        sample_index,
        scheme,
        rop_dbm,
        ber_pre_fec,
        ber_post_fec,
        ms_ssim,
        ms_ssim_db,
        papr_db,
        decode_ok: image.is_some(),
        image_crc: image.as_ref().map(|img| crc32fast::hash(img.data())),
    };
    Ok(FrameOutcome { row, image })
}
