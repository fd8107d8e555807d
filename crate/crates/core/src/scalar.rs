//! Scalar abstraction shared by the numeric kernels.
//!
//! Closed-form channel math, filter design, equalizers and quality
//! conversions are written against [`Real`] so they run in `f32` or `f64`.
//! The end-to-end pipelines pin `f64` through the aliases in the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by the generic kernels: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts decibels to a linear power ratio.
#[inline]
pub fn db_to_lin<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Converts a linear power ratio to decibels.
#[inline]
pub fn lin_to_db<T: Real>(lin: T) -> T {
    T::lit(10.0) * lin.log10()
}

/// dBm to milliwatts.
#[inline]
pub fn dbm_to_mw<T: Real>(dbm: T) -> T {
    db_to_lin(dbm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip_both_precisions() {
        assert!((lin_to_db(db_to_lin(3.0_f64)) - 3.0).abs() < 1e-12);
        assert!((lin_to_db(db_to_lin(3.0_f32)) - 3.0).abs() < 1e-5);
        assert_eq!(dbm_to_mw(0.0_f64), 1.0);
    }
}
