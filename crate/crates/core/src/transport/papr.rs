use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lin_to_db, Real};
use crate::stream::SymbolStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaprReport {
    pub papr_linear: f64,
    pub papr_db: f64,
}

/// Peak-to-average power ratio, `max|s|² / mean|s|²`.
pub fn papr<T: Real>(stream: &SymbolStream<T>) -> Result<PaprReport> {
    let mean = stream.mean_power().as_f64();
    if !(mean > 0.0) {
        return Err(Error::DegenerateStream);
    }
    let peak = stream.powers().fold(T::zero(), |a, p| a.max(p)).as_f64();
    let papr_linear = (peak / mean).max(1.0);
    Ok(PaprReport {
        papr_linear,
        papr_db: lin_to_db(papr_linear),
    })
}
