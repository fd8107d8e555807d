//! Free-space optical link simulator comparing a separated digital chain
//! (source codec, LDPC, OOK/PAM4/QPSK/16QAM) against discrete-time analog
//! transmission over a gamma-gamma turbulence channel, for both
//! intensity-modulation/direct-detection and dual-polarization coherent
//! transceivers.

pub mod channel;
pub mod config;
pub mod digital;
pub mod dsp;
pub mod error;
pub mod image;
pub mod link;
pub mod metrics;
pub mod quad;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod stream;
pub mod symfile;
pub mod transform;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::Real;

/// Pipelines run in double precision; kernels are generic over [`Real`].
pub type SymbolStreamF64 = stream::SymbolStream<f64>;
/// Single-precision streams, as stored in symbol files.
pub type SymbolStreamF32 = stream::SymbolStream<f32>;
pub type FilterTapsF64 = dsp::FilterTaps<f64>;
pub type GammaGammaParamsF64 = channel::GammaGammaParams<f64>;
