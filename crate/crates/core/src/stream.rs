//! Continuous-amplitude symbol streams exchanged between pipeline stages.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Real,
    Complex,
}

impl Layout {
    /// Scalars stored per symbol.
    pub fn width(self) -> usize {
        match self {
            Layout::Real => 1,
            Layout::Complex => 2,
        }
    }
}

/// A sequence of channel symbols. Complex symbols are stored interleaved
/// (I, Q), which is also the on-disk order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream<T: Real = f64> {
    data: Vec<T>,
    layout: Layout,
}

impl<T: Real> SymbolStream<T> {
    pub fn from_real(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyStream);
        }
        Ok(Self {
            data: values,
            layout: Layout::Real,
        })
    }

    pub fn from_complex(values: &[Complex<T>]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyStream);
        }
        let data = values.iter().flat_map(|c| [c.re, c.im]).collect();
        Ok(Self {
            data,
            layout: Layout::Complex,
        })
    }

    /// Builds a stream from raw interleaved scalars.
    pub fn from_raw(data: Vec<T>, layout: Layout) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyStream);
        }
        if data.len() % layout.width() != 0 {
            return Err(Error::LengthMismatch {
                expected: data.len() + 1,
                got: data.len(),
            });
        }
        Ok(Self { data, layout })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.data.len() / self.layout.width()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Interleaved scalar view.
    pub fn raw(&self) -> &[T] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<T> {
        self.data
    }

    /// Symbols as complex values; real streams get a zero imaginary part.
    pub fn to_complex(&self) -> Vec<Complex<T>> {
        match self.layout {
            Layout::Real => self
                .data
                .iter()
                .map(|&r| Complex::new(r, T::zero()))
                .collect(),
            Layout::Complex => self
                .data
                .chunks_exact(2)
                .map(|c| Complex::new(c[0], c[1]))
                .collect(),
        }
    }

    /// |s|² per symbol.
    pub fn powers(&self) -> impl Iterator<Item = T> + '_ {
        self.data
            .chunks_exact(self.layout.width())
            .map(|c| c.iter().map(|&v| v * v).sum::<T>())
    }

    /// Mean |s|² over the stream.
    pub fn mean_power(&self) -> T {
        self.powers().sum::<T>() / T::from_count(self.len())
    }

    pub fn scaled(&self, gain: T) -> Self {
        Self {
            data: self.data.iter().map(|&v| v * gain).collect(),
            layout: self.layout,
        }
    }

    pub fn cast<U: Real>(&self) -> SymbolStream<U> {
        SymbolStream {
            data: self.data.iter().map(|&v| U::lit(v.as_f64())).collect(),
            layout: self.layout,
        }
    }
}

/// Scales the stream so that its mean |s|² is one. The output is the input
/// times a single positive constant.
pub fn normalize_power<T: Real>(stream: &SymbolStream<T>) -> Result<SymbolStream<T>> {
    let p = stream.mean_power();
    if p <= T::zero() {
        return Err(Error::DegenerateStream);
    }
    if p == T::one() {
        return Ok(stream.clone());
    }
    Ok(stream.scaled(T::one() / p.sqrt()))
}
