//! Scalar abstraction shared by the counting and dependence code.
//!
//! Every statistic in this crate starts from integer counts. [`Scalar`] turns
//! a count ratio into a value of the working type exactly once, so `f64`,
//! `f32` and exact rationals all see the same numerator and denominator.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Num, ToPrimitive};

/// Numeric type the probability and contingency tables are computed in.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// `numerator / denominator`, with a single rounding step for float types.
    ///
    /// `denominator` must be non-zero.
    fn from_ratio(numerator: u64, denominator: u64) -> Self;

    fn from_count(count: u64) -> Self {
        Self::from_ratio(count, 1)
    }

    /// Lossy conversion used for reporting and tolerance checks.
    fn to_f64_lossy(&self) -> f64;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            Self::zero() - self.clone()
        } else {
            self.clone()
        }
    }
}

/// Scalar types that also support square roots (needed for C and w).
pub trait RealScalar: Scalar + Float {}

impl Scalar for f64 {
    fn from_ratio(numerator: u64, denominator: u64) -> Self {
        numerator as f64 / denominator as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(numerator: u64, denominator: u64) -> Self {
        // go through f64 so large counts only round once more
        (numerator as f64 / denominator as f64) as f32
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_ratio(numerator: u64, denominator: u64) -> Self {
        BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl RealScalar for f64 {}
impl RealScalar for f32 {}

/// Parse a decimal literal such as `0.35` into an exact rational.
///
/// Returns `None` for anything that is not a plain finite decimal.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(mantissa, scale);
    Some(if negative { -value } else { value })
}
