//! Pilot-aided carrier phase recovery.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unwrapped phase estimate `arg(y · conj(p))` at each pilot.
pub fn phase_estimates<T: Real>(
    received: &[Complex<T>],
    pilot_positions: &[usize],
    pilot_values: &[Complex<T>],
) -> Result<Vec<T>> {
    if pilot_positions.len() != pilot_values.len() {
        return Err(Error::LengthMismatch {
            expected: pilot_positions.len(),
            got: pilot_values.len(),
        });
    }
    if pilot_positions.is_empty() {
        return Err(Error::PilotLayout("no pilots".into()));
    }
    if pilot_positions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::PilotLayout(
            "pilot positions must be strictly increasing".into(),
        ));
    }
    if let Some(&last) = pilot_positions.last() {
        if last >= received.len() {
            return Err(Error::PilotLayout(format!(
                "pilot at {last} beyond {} symbols",
                received.len()
            )));
        }
    }
    let two_pi = T::TAU();
    let mut out: Vec<T> = Vec::with_capacity(pilot_positions.len());
    for (&pos, &p) in pilot_positions.iter().zip(pilot_values) {
        let mut phi = (received[pos] * p.conj()).arg();
        if let Some(&prev) = out.last() {
            phi += two_pi * ((prev - phi) / two_pi).round();
        }
        out.push(phi);
    }
    Ok(out)
}

/// Per-symbol phase for a stream of `len` symbols, linearly interpolated
/// between pilot estimates and held constant outside the pilot span.
pub fn interpolate_phases<T: Real>(pilot_positions: &[usize], phases: &[T], len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    let mut seg = 0;
    for k in 0..len {
        while seg + 1 < pilot_positions.len() && pilot_positions[seg + 1] <= k {
            seg += 1;
        }
        let phi = if k <= pilot_positions[0] {
            phases[0]
        } else if seg + 1 == pilot_positions.len() {
            phases[seg]
        } else {
            let (a, b) = (pilot_positions[seg], pilot_positions[seg + 1]);
            let f = T::from_count(k - a) / T::from_count(b - a);
            phases[seg] + (phases[seg + 1] - phases[seg]) * f
        };
        out.push(phi);
    }
    out
}

/// De-rotates every symbol by the phase linearly interpolated between pilots;
/// the first and last estimates are held outside the pilot span. Pilots
/// themselves remain in the output.
pub fn cpr_pilot<T: Real>(
    received: &[Complex<T>],
    pilot_positions: &[usize],
    pilot_values: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let phases = phase_estimates(received, pilot_positions, pilot_values)?;
    let track = interpolate_phases(pilot_positions, &phases, received.len());
    Ok(received
        .iter()
        .zip(track)
        .map(|(&r, phi)| r * Complex::from_polar(T::one(), -phi))
        .collect())
}
