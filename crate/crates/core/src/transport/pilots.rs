//! Uniform pilot insertion: one known symbol at every `spacing`-th position,
//! starting at index 0.

use crate::error::{Error, Result};

/// Pilots needed to carry `n_data` symbols.
pub fn pilot_count(n_data: usize, spacing: usize) -> usize {
    n_data.div_ceil(spacing - 1)
}

/// Pilot indices in a stream of `total` symbols.
pub fn pilot_positions(total: usize, spacing: usize) -> Vec<usize> {
    (0..total).step_by(spacing).collect()
}

pub fn insert_pilots<S: Copy>(data: &[S], spacing: usize, pilot: S) -> Result<Vec<S>> {
    if spacing < 2 {
        return Err(Error::PilotLayout(format!(
            "pilot spacing must be at least 2 (got {spacing})"
        )));
    }
    let mut out = Vec::with_capacity(data.len() + pilot_count(data.len(), spacing));
    for chunk in data.chunks(spacing - 1) {
        out.push(pilot);
        out.extend_from_slice(chunk);
    }
    Ok(out)
}

/// Removes the symbols at pilot positions.
pub fn strip_pilots<S: Copy>(stream: &[S], spacing: usize) -> Result<Vec<S>> {
    if spacing < 2 {
        return Err(Error::PilotLayout(format!(
            "pilot spacing must be at least 2 (got {spacing})"
        )));
    }
    if stream.len() % spacing == 1 {
        return Err(Error::PilotLayout(
            "stream ends on a pilot with no data after it".into(),
        ));
    }
    Ok(stream
        .iter()
        .enumerate()
        .filter(|(i, _)| i % spacing != 0)
        .map(|(_, &s)| s)
        .collect())
}
