//! Scalar abstractions for amplitudes and probabilities.
//!
//! Field arithmetic is always exact. Everything that leaves the field (character
//! values, amplitudes, outcome probabilities) is generic over one of the two
//! traits below so the same code runs in `f32`, `f64` or exact rationals.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Real floating point type used for complex amplitudes.
pub trait Real: Float + FloatConst + FromPrimitive + Sum + Debug + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Sum + Debug + Send + Sync + 'static {}

/// A probability value: floating point or an exact rational.
pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + Send
    + Sync
{
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self;

    fn to_f64(&self) -> f64;
}

macro_rules! float_probability {
    ($t:ty) => {
        impl Probability for $t {
            fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
                let r = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
                ToPrimitive::to_f64(&r).unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_probability!(f32);
float_probability!(f64);

impl Probability for BigRational {
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Convert a small integer count into a real scalar.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("representable constant")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conversions_agree() {
        let num = BigUint::from(8u32);
        let den = BigUint::from(27u32);
        let exact = BigRational::from_ratio(&num, &den);
        let f = f64::from_ratio(&num, &den);
        let g = f32::from_ratio(&num, &den);
        assert!((Probability::to_f64(&exact) - 8.0 / 27.0).abs() < 1e-15);
        assert!((f - 8.0 / 27.0).abs() < 1e-15);
        assert!((g as f64 - 8.0 / 27.0).abs() < 1e-6);
    }
}
