//! End-to-end IM/DD and coherent link simulations, calibration, ROP sweeps
//! and turbulence runs.

mod calibrate;
mod coherent;
mod frame;
mod imdd;
mod sweep;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::digital::ModFormat;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

pub use calibrate::{
    calibrate_coherent_snr, calibrate_imdd_noise, resolve_noise, CALIBRATION_SYMBOLS,
};
pub use coherent::{
    coherent_receive, coherent_transmit, cpr_pilot_joint, merge_pols, pols_to_tributaries,
    run_coherent, split_pols, tributaries_to_pols, CoherentImpairments, CoherentRx, CoherentTx,
    PILOT_SYMBOL,
};
pub use frame::{run_frame, FrameOutcome, PreparedImage, ANALOG_RATIO};
pub use imdd::{imdd_receive, imdd_transmit, run_imdd, ImddRx, ImddTx};
pub use sweep::{rop_sweep, rop_sweep_images, turbulence_run, turbulence_run_with, SweepSpec};

/// Transceiver architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Imdd,
    Coherent,
}

impl System {
    pub fn schemes(self) -> [Scheme; 3] {
        match self {
            System::Imdd => [Scheme::Ook, Scheme::Pam4, Scheme::Analog],
            System::Coherent => [Scheme::Qpsk, Scheme::Qam16, Scheme::Analog],
        }
    }

    pub fn supports(self, scheme: Scheme) -> bool {
        self.schemes().contains(&scheme)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Imdd => "imdd",
            System::Coherent => "coherent",
        })
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "imdd" | "im/dd" => Ok(System::Imdd),
            "coherent" => Ok(System::Coherent),
            other => Err(Error::Config(format!("unknown system {other:?}"))),
        }
    }
}

/// A transmission scheme: one of the digital formats or the analog mapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ook,
    Pam4,
    Qpsk,
    #[serde(rename = "16qam")]
    Qam16,
    Analog,
}

impl Scheme {
    pub fn format(self) -> Option<ModFormat> {
        match self {
            Scheme::Ook => Some(ModFormat::Ook),
            Scheme::Pam4 => Some(ModFormat::Pam4),
            Scheme::Qpsk => Some(ModFormat::Qpsk),
            Scheme::Qam16 => Some(ModFormat::Qam16),
            Scheme::Analog => None,
        }
    }

    pub fn is_digital(self) -> bool {
        self.format().is_some()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.format() {
            Some(fmt) => fmt.fmt(f),
            None => f.write_str("analog"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("analog") || s.eq_ignore_ascii_case("dtat") {
            return Ok(Scheme::Analog);
        }
        Ok(match s.parse::<ModFormat>()? {
            ModFormat::Ook => Scheme::Ook,
            ModFormat::Pam4 => Scheme::Pam4,
            ModFormat::Qpsk => Scheme::Qpsk,
            ModFormat::Qam16 => Scheme::Qam16,
        })
    }
}

const PREAMBLE_SEED: u64 = 0x5EED_0F_A1;

/// Zero-mean known training sequence drawn from `fmt`'s constellation, with
/// every point used equally often.
pub fn preamble(fmt: ModFormat, len: usize, lane: &str) -> Vec<Complex<f64>> {
    let points = fmt.constellation();
    let mut seq: Vec<Complex<f64>> = (0..len).map(|i| points[i % points.len()]).collect();
    seq.shuffle(&mut seeded_rng(PREAMBLE_SEED, lane));
    seq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for s in [
            Scheme::Ook,
            Scheme::Pam4,
            Scheme::Qpsk,
            Scheme::Qam16,
            Scheme::Analog,
        ] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json.trim_matches('"'), s.to_string());
        }
        assert!(System::Imdd.supports(Scheme::Pam4));
        assert!(!System::Imdd.supports(Scheme::Qpsk));
    }

    #[test]
    fn preamble_is_balanced_and_fixed() {
        let p = preamble(ModFormat::Pam4, 4096, "imdd");
        assert_eq!(p, preamble(ModFormat::Pam4, 4096, "imdd"));
        assert!(p.iter().map(|c| c.re).sum::<f64>().abs() < 1e-9);
        assert!((p.iter().map(|c| c.norm_sqr()).sum::<f64>() / 4096.0 - 1.0).abs() < 1e-12);
    }
}
