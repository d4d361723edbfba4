//! Scalar traits the geometry is generic over.
//!
//! The σ-algebra (Γ products, Gram determinants, tubes, reconstruction) only
//! needs an ordered field, so it runs on `f32`, `f64` and exact rationals such
//! as `num_rational::Rational64`. Anything involving square roots (lengths,
//! envelopes, direction sampling) additionally needs [`Real`].

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field scalar.
pub trait Scalar:
    Num + Signed + PartialOrd + Copy + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Larger of two values; `other` wins ties and incomparable pairs.
    fn max_of(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }

    /// Lossy conversion from `f64`, falling back to zero when the value is
    /// not representable (e.g. `1e-30` in a bounded rational).
    fn from_f64_or_zero(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::zero)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + PartialOrd
        + Copy
        + Debug
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Scalar + Float + FloatConst {}

impl<T> Real for T where T: Scalar + Float + FloatConst {}
