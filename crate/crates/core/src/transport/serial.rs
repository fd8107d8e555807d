//! Serial ↔ four-tributary conversion for dual-polarization IQ modulation.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stream::{Layout, SymbolStream};

/// The XI, XQ, YI and YQ drive signals plus the zero padding appended to
/// reach a multiple of four real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tributaries {
    pub lanes: [Vec<f64>; 4],
    pub pad: usize,
}

impl Tributaries {
    pub fn len(&self) -> usize {
        self.lanes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.lanes[0].is_empty()
    }
}

/// Deals the stream's real components round-robin onto XI, XQ, YI, YQ.
pub fn serial_to_parallel(stream: &SymbolStream) -> Tributaries {
    let raw = stream.raw();
    let pad = (4 - raw.len() % 4) % 4;
    let mut lanes: [Vec<f64>; 4] =
        std::array::from_fn(|_| Vec::with_capacity(raw.len().div_ceil(4)));
    for (i, &v) in raw.iter().chain(std::iter::repeat_n(&0.0, pad)).enumerate() {
        lanes[i % 4].push(v);
    }
    Tributaries { lanes, pad }
}

pub fn parallel_to_serial(t: &Tributaries, layout: Layout) -> Result<SymbolStream> {
    let mut raw: Vec<f64> = (0..t.len())
        .flat_map(|k| t.lanes.iter().map(move |l| l[k]))
        .collect();
    raw.truncate(raw.len() - t.pad);
    SymbolStream::from_raw(raw, layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitional_order() {
        let s = SymbolStream::from_real((1..=8).map(f64::from).collect()).unwrap();
        let t = serial_to_parallel(&s);
        assert_eq!(
            t.lanes,
            [
                vec![1.0, 5.0],
                vec![2.0, 6.0],
                vec![3.0, 7.0],
                vec![4.0, 8.0]
            ]
        );
        assert_eq!(t.pad, 0);
        assert_eq!(parallel_to_serial(&t, Layout::Real).unwrap(), s);
    }

    #[test]
    fn padding_is_recorded_and_stripped() {
        let s = SymbolStream::from_real((1..=6).map(f64::from).collect()).unwrap();
        let t = serial_to_parallel(&s);
        assert_eq!(t.pad, 2);
        assert_eq!(t.len(), 2);
        assert_eq!(parallel_to_serial(&t, Layout::Real).unwrap(), s);
    }

    #[test]
    fn complex_stream_split() {
        let c = vec![num_complex::Complex::new(1.0, -1.0); 147_456];
        let t = serial_to_parallel(&SymbolStream::from_complex(&c).unwrap());
        assert_eq!(t.len(), 73_728);
        let back = parallel_to_serial(&t, Layout::Complex).unwrap();
        assert_eq!(back.to_complex(), c);
    }
}
