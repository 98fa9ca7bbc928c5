//! Probability scalars: `f64` for simulation, exact rationals for oracles.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sum tolerance applied to floating-point distributions.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn to_f64(&self) -> f64;
    /// `num / den`.
    fn ratio(num: i64, den: i64) -> Self;
    /// Equality up to the scalar's tolerance (exact for rationals).
    fn approx_eq(&self, other: &Self) -> bool;
    /// `a ≤ b` up to the scalar's tolerance.
    fn le_tol(&self, other: &Self) -> bool;
    fn magnitude(&self) -> Self;
    /// Nearest value to a double (exact for rationals, since doubles are dyadic).
    fn from_f64(x: f64) -> Self;

    fn pow_n(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn half(&self) -> Self {
        self.clone() * Self::ratio(1, 2)
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Probability for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL * (1.0 + self.abs().max(other.abs()))
    }
    fn le_tol(&self, other: &Self) -> bool {
        *self <= *other + FLOAT_TOL * (1.0 + other.abs())
    }
    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn pow_n(&self, k: usize) -> Self {
        f64::powi(*self, k as i32)
    }
}

impl Probability for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }
    fn from_f64(x: f64) -> Self {
        rational_from_f64(x)
    }
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite probability")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_exact() {
        let a = BigRational::ratio(1, 3);
        let s = a.clone() + a.clone() + a;
        assert!(s.approx_eq(&<BigRational as Probability>::one()));
        assert_eq!(BigRational::ratio(1, 10).pow_n(2), BigRational::ratio(1, 100));
    }

    #[test]
    fn float_tolerance() {
        assert!((0.1f64 + 0.2).approx_eq(&0.3));
        assert!(0.3000000000001f64.le_tol(&0.3));
        assert!(!0.31f64.le_tol(&0.3));
    }
}
