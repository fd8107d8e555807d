//! Inverse-solving receiver noise from a sensitivity anchor (ROP, pre-FEC
//! BER). Both searches bisect in dB to 0.1 dB on a fixed simulation, so the
//! result depends only on the configuration.

use rand::Rng;

use super::coherent::{
    coherent_receive, coherent_transmit, merge_pols, run_coherent, split_pols, CoherentImpairments,
};
use super::imdd::{imdd_receive, imdd_transmit, run_imdd};
use super::System;
use crate::channel::ChannelRealization;
use crate::config::LinkConfig;
use crate::digital::modem::{demodulate_llr, hard_decisions, modulate};
use crate::digital::{BitBuffer, ModFormat};
use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::stream::SymbolStream;

/// Payload symbols simulated per BER evaluation.
pub const CALIBRATION_SYMBOLS: usize = 1 << 17;
const CALIBRATION_SEED: u64 = 0xCA11_B8;
const TOLERANCE_DB: f64 = 0.1;
const BER_RANGE: (f64, f64) = (1e-4, 1e-1);

fn random_bits(n: usize) -> BitBuffer {
    let mut rng = seeded_rng(CALIBRATION_SEED, "calibration-data");
    BitBuffer::from_bits((0..n).map(|_| rng.random::<bool>()))
}

fn bit_errors(rx: &SymbolStream, fmt: ModFormat, noise_var: f64, bits: &BitBuffer) -> Result<f64> {
    let hard = hard_decisions(&demodulate_llr(rx, fmt, noise_var)?);
    Ok(hard.hamming_distance(bits) as f64 / bits.len() as f64)
}

/// Pre-FEC BER of `fmt` over the IM/DD chain at `rop_dbm` with noise floor
/// `x · (R·P)²`, i.e. `x` is the inverse electrical SNR at that ROP.
fn imdd_ber(cfg: &LinkConfig, fmt: ModFormat, rop_dbm: f64, x: f64) -> Result<f64> {
    let bits = random_bits(CALIBRATION_SYMBOLS * fmt.bits_per_symbol());
    let symbols = modulate(&bits, fmt)?;
    let tx = imdd_transmit(cfg, symbols.raw(), fmt)?;
    let real = ChannelRealization::at_rop(rop_dbm);
    let signal = cfg.noise.imdd.responsivity * real.rop_mw();
    let rx = run_imdd(
        cfg,
        &tx.intensity,
        &real,
        x * signal * signal,
        &mut seeded_rng(CALIBRATION_SEED, "calibration-noise"),
    )?;
    let out = imdd_receive(cfg, &rx, &tx, Some(fmt))?;
    bit_errors(
        &SymbolStream::from_real(out.symbols)?,
        fmt,
        out.noise_var,
        &bits,
    )
}

/// QPSK-style pre-FEC BER over the full coherent chain (configured rotation
/// and linewidth) at symbol SNR `snr_db`.
fn coherent_ber(cfg: &LinkConfig, fmt: ModFormat, snr_db: f64) -> Result<f64> {
    let bits = random_bits(CALIBRATION_SYMBOLS * fmt.bits_per_symbol());
    let symbols = modulate(&bits, fmt)?.to_complex();
    let tx = coherent_transmit(cfg, &split_pols(&symbols))?;
    let real = ChannelRealization::at_rop(0.0);
    let n0 = 10f64.powf(-snr_db / 10.0);
    let rx = run_coherent(
        cfg,
        &tx,
        &real,
        n0,
        &CoherentImpairments::from_config(cfg),
        &mut seeded_rng(CALIBRATION_SEED, "calibration-noise"),
        &mut seeded_rng(CALIBRATION_SEED, "calibration-phase"),
    )?;
    let out = coherent_receive(cfg, &rx, &tx, true)?;
    let merged = merge_pols(&out.pols, symbols.len());
    bit_errors(
        &SymbolStream::from_complex(&merged)?,
        fmt,
        out.noise_var,
        &bits,
    )
}

fn check_anchor(ber: f64) -> Result<()> {
    if !(ber > BER_RANGE.0 && ber < BER_RANGE.1) {
        return Err(Error::AnchorUnreachable(format!(
            "anchor BER {ber} outside ({}, {})",
            BER_RANGE.0, BER_RANGE.1
        )));
    }
    Ok(())
}

/// Bisects `db` in `[lo, hi]` where `ber(lo) < target < ber(hi)`; returns
/// the midpoint of the final 0.1 dB bracket.
fn bisect_db(
    mut lo: f64,
    mut hi: f64,
    target: f64,
    ber: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let (b_lo, b_hi) = (ber(lo)?, ber(hi)?);
    if !(b_lo < target && target < b_hi) {
        return Err(Error::AnchorUnreachable(format!(
            "BER {target} not bracketed: {b_lo:.3e} at {lo} dB, {b_hi:.3e} at {hi} dB"
        )));
    }
    while hi - lo > TOLERANCE_DB {
        let mid = 0.5 * (lo + hi);
        if ber(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Electrical noise variance per sample (mA²) that puts `fmt`'s pre-FEC BER
/// at `anchor_ber` when the ROP is `anchor_rop_dbm`.
pub fn calibrate_imdd_noise(
    cfg: &LinkConfig,
    anchor_rop_dbm: f64,
    anchor_ber: f64,
    fmt: ModFormat,
) -> Result<f64> {
    check_anchor(anchor_ber)?;
    if fmt.layout() != crate::stream::Layout::Real {
        return Err(Error::Config(format!("{fmt} is not an IM/DD format")));
    }
    // search variable: 10·log10 of the inverse electrical SNR
    let db = bisect_db(-30.0, 10.0, anchor_ber, |d| {
        imdd_ber(cfg, fmt, anchor_rop_dbm, 10f64.powf(d / 10.0))
    })?;
    let signal = cfg.noise.imdd.responsivity * 10f64.powf(anchor_rop_dbm / 10.0);
    Ok(10f64.powf(db / 10.0) * signal * signal)
}

/// Symbol SNR (dB) at the anchor ROP that puts `fmt`'s pre-FEC BER at
/// `anchor_ber` through the coherent chain.
pub fn calibrate_coherent_snr(cfg: &LinkConfig, anchor_ber: f64, fmt: ModFormat) -> Result<f64> {
    check_anchor(anchor_ber)?;
    if fmt.layout() != crate::stream::Layout::Complex {
        return Err(Error::Config(format!("{fmt} is not a coherent format")));
    }
    bisect_db(-10.0, 25.0, anchor_ber, |d| coherent_ber(cfg, fmt, -d)).map(|d| -d)
}

/// Copy of `cfg` with the selected system's missing noise parameter filled
/// in from its anchor (OOK for IM/DD, QPSK for coherent).
pub fn resolve_noise(cfg: &LinkConfig, system: System) -> Result<LinkConfig> {
    let mut out = cfg.clone();
    match system {
        System::Imdd if out.noise.imdd.noise_floor.is_none() => {
            let a = out.noise.imdd.anchor;
            out.noise.imdd.noise_floor =
                Some(calibrate_imdd_noise(cfg, a.rop_dbm, a.ber, ModFormat::Ook)?);
        }
        System::Coherent if out.noise.coherent.snr_ref_db.is_none() => {
            let a = out.noise.coherent.anchor;
            out.noise.coherent.snr_ref_db =
                Some(calibrate_coherent_snr(cfg, a.ber, ModFormat::Qpsk)?);
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_outside_range_are_unreachable() {
        let cfg = LinkConfig::imdd();
        assert!(matches!(
            calibrate_imdd_noise(&cfg, -13.0, 0.5, ModFormat::Ook),
            Err(Error::AnchorUnreachable(_))
        ));
        assert!(matches!(
            calibrate_coherent_snr(&cfg, 1e-6, ModFormat::Qpsk),
            Err(Error::AnchorUnreachable(_))
        ));
    }

    #[test]
    fn bisection_lands_within_tolerance() {
        // monotone synthetic BER curve crossing 2e-2 at 3.7 dB
        let d = bisect_db(
            -10.0,
            10.0,
            2e-2,
            |d| Ok(2e-2 * 10f64.powf((d - 3.7) / 5.0)),
        )
        .unwrap();
        assert!((d - 3.7).abs() <= TOLERANCE_DB, "{d}");
    }
}
