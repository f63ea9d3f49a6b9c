//! Numeric modes for weights and gains.
//!
//! Simulation runs on `f64`. Verification paths run on exact rationals so that
//! identities such as "arc gain = improvement vector · weights" can be checked
//! with zero tolerance.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

pub type Exact = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Smallest gain that counts as a strict improvement.
    fn improvement_threshold() -> Self;

    fn is_improving(&self) -> bool {
        *self > Self::improvement_threshold()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn improvement_threshold() -> Self {
        1e-12
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn improvement_threshold() -> Self {
        <BigRational as Zero>::zero()
    }
}

/// Exact rational with the same binary value as `x`.
pub fn exact_from_f64(x: f64) -> Exact {
    BigRational::from_f64(x).expect("finite weight")
}

pub fn ratio(num: i64, den: i64) -> Exact {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
