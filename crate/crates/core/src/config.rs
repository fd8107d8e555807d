//! Link and receiver configuration, serialized as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and system parameters of one link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub wavelength_m: f64,
    pub distance_m: f64,
    /// Refractive-index structure parameter, m^(-2/3). Zero disables turbulence.
    pub cn2: f64,
    pub attenuation_db_per_km: f64,
    pub beam_divergence_rad: f64,
    pub tx_aperture_m: f64,
    pub rx_aperture_m: f64,
    pub tx_power_dbm: f64,
    pub baud_rate: f64,
    pub samples_per_symbol: usize,
    pub roll_off: f64,
    /// SRRC span in symbols.
    pub filter_span: usize,
    pub dsp: DspConfig,
    pub noise: NoiseCalibration,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspConfig {
    pub ffe_taps: usize,
    pub ffe_step: f64,
    pub ffe_dd_step: f64,
    pub mimo_taps: usize,
    pub mimo_step: f64,
    pub preamble_len: usize,
    pub training_passes: usize,
    pub pilot_spacing: usize,
    /// Carrier-phase tracking gain used while the MIMO equalizer trains.
    pub pll_gain: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            ffe_taps: 61,
            ffe_step: 2e-3,
            ffe_dd_step: 2e-4,
            mimo_taps: 15,
            mimo_step: 2e-3,
            preamble_len: 4096,
            training_passes: 3,
            pilot_spacing: 50,
            pll_gain: 0.02,
        }
    }
}

/// Pre-FEC BER target at a given received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationAnchor {
    pub rop_dbm: f64,
    pub ber: f64,
}

/// Thermal-noise-limited direct-detection receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImddNoiseModel {
    /// A/W.
    pub responsivity: f64,
    /// Electrical noise variance per sample, mA². Calibrated from the
    /// anchor when absent.
    pub noise_floor: Option<f64>,
    pub anchor: CalibrationAnchor,
    /// Combined modulator/photodiode impulse response at the sample rate.
    pub electrical_response: Vec<f64>,
}

impl Default for ImddNoiseModel {
    fn default() -> Self {
        Self {
            responsivity: 1.0,
            noise_floor: None,
            anchor: CalibrationAnchor {
                rop_dbm: -13.0,
                ber: 2e-2,
            },
            electrical_response: vec![1.0, 0.3, 0.1],
        }
    }
}

/// LO-noise-limited coherent receiver: SNR grows linearly with ROP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentNoiseModel {
    /// Es/N0 at `anchor.rop_dbm`. Calibrated from the QPSK anchor when absent.
    pub snr_ref_db: Option<f64>,
    pub anchor: CalibrationAnchor,
    /// Combined laser linewidth, Hz.
    pub linewidth_hz: f64,
    pub pol_rotation_rad: f64,
}

impl Default for CoherentNoiseModel {
    fn default() -> Self {
        Self {
            snr_ref_db: None,
            anchor: CalibrationAnchor {
                rop_dbm: -12.0,
                ber: 2e-2,
            },
            linewidth_hz: 100e3,
            pol_rotation_rad: std::f64::consts::FRAC_PI_4,
        }
    }
}

impl CoherentNoiseModel {
    /// Es/N0 (linear) at the given received power.
    pub fn snr_at(&self, rop_dbm: f64, snr_ref_db: f64) -> f64 {
        10f64.powf((snr_ref_db + rop_dbm - self.anchor.rop_dbm) / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCalibration {
    pub imdd: ImddNoiseModel,
    pub coherent: CoherentNoiseModel,
}

impl LinkConfig {
    /// 5 km path at moderate turbulence with a 10 GBd direct-detection
    /// transceiver launching 15 dBm.
    pub fn imdd() -> Self {
        Self {
            wavelength_m: 1550e-9,
            distance_m: 5000.0,
            cn2: 1e-15,
            attenuation_db_per_km: 0.443,
            beam_divergence_rad: 0.25e-3,
            tx_aperture_m: 0.05,
            rx_aperture_m: 0.20,
            tx_power_dbm: 15.0,
            baud_rate: 10e9,
            samples_per_symbol: 2,
            roll_off: 0.1,
            filter_span: 32,
            dsp: DspConfig::default(),
            noise: NoiseCalibration::default(),
            seed: 1,
        }
    }

    /// Same path with a 25 GBd dual-polarization coherent transceiver
    /// launching 10 dBm.
    pub fn coherent() -> Self {
        Self {
            baud_rate: 25e9,
            tx_power_dbm: 10.0,
            ..Self::imdd()
        }
    }

    pub fn sample_rate(&self) -> f64 {
        self.baud_rate * self.samples_per_symbol as f64
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength_m", self.wavelength_m),
            ("distance_m", self.distance_m),
            ("attenuation_db_per_km", self.attenuation_db_per_km),
            ("beam_divergence_rad", self.beam_divergence_rad),
            ("tx_aperture_m", self.tx_aperture_m),
            ("rx_aperture_m", self.rx_aperture_m),
            ("baud_rate", self.baud_rate),
            ("responsivity", self.noise.imdd.responsivity),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite (got {v})"
                )));
            }
        }
        if !(self.cn2 >= 0.0) {
            return Err(Error::Config(format!(
                "cn2 must be >= 0 (got {})",
                self.cn2
            )));
        }
        if !(self.roll_off > 0.0 && self.roll_off <= 1.0) {
            return Err(Error::Config(format!(
                "roll_off must be in (0, 1] (got {})",
                self.roll_off
            )));
        }
        if self.samples_per_symbol < 2 {
            return Err(Error::Config("samples_per_symbol must be >= 2".into()));
        }
        if self.filter_span < 8 {
            return Err(Error::Config("filter_span must be >= 8".into()));
        }
        if self.dsp.ffe_taps % 2 == 0 || self.dsp.mimo_taps % 2 == 0 {
            return Err(Error::Config("equalizer tap counts must be odd".into()));
        }
        if self.dsp.pilot_spacing < 2 {
            return Err(Error::Config("pilot_spacing must be >= 2".into()));
        }
        if let Some(nf) = self.noise.imdd.noise_floor {
            if !(nf > 0.0) {
                return Err(Error::Config("noise_floor must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: Self = serde_json::from_slice(&std::fs::read(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
