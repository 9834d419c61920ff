//! Numeric abstraction for capacities, flows and utilizations.
//!
//! Flow and throughput code is written against [`Scalar`] so the same
//! algorithms run on `f64` (the default), `f32`, or exact rationals. Exact
//! arithmetic is what the brute-force oracles in the test suites lean on.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Exact rational capacity type.
pub type Exact = Ratio<i64>;

/// A field-like number usable as a link capacity.
pub trait Scalar:
    Num
    + Copy
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Magnitude at or below which a residual counts as exhausted.
    fn tolerance() -> Self;

    /// Lossy conversion from a configuration value.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::zero)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `true` when `self` exceeds the tolerance.
    fn is_positive(self) -> bool {
        self > Self::tolerance()
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for Exact {
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}
