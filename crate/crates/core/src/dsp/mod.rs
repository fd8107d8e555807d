//! Transmit and receive DSP blocks.

mod cpr;
mod ffe;
mod fir;
mod mimo;
mod resample;
mod srrc;

pub use cpr::{cpr_pilot, interpolate_phases, phase_estimates};
pub use ffe::{ffe_equalize, EqMode, FfeState, Guide};
pub use fir::{convolve, downsample, matched_filter, pulse_shape, Sample};
pub use mimo::{mimo_equalize, MimoGuide, MimoState};
pub use resample::{resample, Resampler};
pub use srrc::{srrc_taps, FilterTaps};
