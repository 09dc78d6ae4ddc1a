//! Scalar abstraction shared by the game model and the optimization kernel.
//!
//! Everything numeric in the crate is written against [`Scalar`], which is
//! implemented for `f32`, `f64` and the exact [`Rational`] type. Exact types
//! report a zero tolerance, so the same simplex code runs as an exact
//! rational solver or as a tolerance-based floating point solver.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + FromPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    /// Magnitude below which a value is treated as zero.
    fn zero_tolerance() -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest representable value; exact types convert the binary value
    /// of `v` without rounding.
    fn from_f64(v: f64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_tolerance()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Converts from an exact rational, rounding for inexact types.
    fn from_rational(r: &Rational) -> Self;

    /// Exact rational view of `self`.
    fn to_rational(&self) -> Rational;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero_tolerance() -> Self {
        1e-9
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn zero_tolerance() -> Self {
        1e-5
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        (numer as f64 / denom as f64) as f32
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero_tolerance() -> Self {
        Rational::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("finite float")
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// Shorthand for an integer-valued scalar.
pub fn int<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("integer fits scalar")
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

/// Default absolute tolerance used where floating values cross module
/// boundaries (one millionth).
pub fn default_tolerance<T: Scalar>() -> T {
    T::from_ratio(1, 1_000_000)
}

/// Parses `"p/q"`, integers, and decimals with an optional exponent
/// (`"0.25"`, `"1e-6"`) into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
