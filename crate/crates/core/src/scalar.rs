//! Scalar fields used by the exterior-algebra kernel: `f64` for numerical
//! work and [`Rational`] for exact certificates.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// A field in which determinants and eliminations can be carried out.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Magnitude used to choose elimination pivots.
    fn pivot_weight(&self) -> f64;

    /// Lossy conversion to `f64`.
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Rational {
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // nonzero rationals must never look like zero pivots
            ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::MAX).max(f64::MIN_POSITIVE)
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

/// `a / b` as a rational; `b` must be nonzero.
pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn int(a: i64) -> Rational {
    Rational::from_integer(BigInt::from(a))
}
