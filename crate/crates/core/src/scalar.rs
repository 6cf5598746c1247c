//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! A computation runs entirely in one scalar mode: either exact rational
//! arithmetic ([`Rational`]) or binary floating point (`f64`, `f32`). Exact
//! types compare against zero exactly; float types carry the tolerance policy
//! in [`Tolerances`](crate::Tolerances).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PsdSplit};

/// Arbitrary-precision rational number used in exact mode.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;

    /// Machine epsilon; zero for exact types.
    const EPSILON: f64;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Conversion from `f64`. Exact types convert the binary value exactly.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `"3/8"`, `"-2"`, `"0.125"` or `"1.5e-3"`.
    fn parse_str(s: &str) -> Result<Self>;

    /// `Some("p/q")` for exact types, `None` for floats.
    fn exact_string(&self) -> Option<String>;

    /// Splits a symmetric positive semidefinite matrix into positive and null
    /// directions. Floats use a symmetric eigendecomposition; exact types use
    /// congruence (symmetric Gaussian elimination).
    fn psd_split(g: &Matrix<Self>, tol: &RankTolerance) -> Result<PsdSplit<Self>>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Threshold policy for deciding which Gram eigenvalues count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    /// Absolute floor for the zero threshold.
    pub absolute: f64,
    /// Relative slack below zero tolerated before data is declared non-PSD.
    pub psd_relative: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            absolute: 1e-10,
            psd_relative: 1e-9,
        }
    }
}

/// `true` when `x` is zero (exact types) or within `tol` of zero (floats).
pub fn is_negligible<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.to_f64().abs() <= tol
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const EPSILON: f64 = <$t>::EPSILON as f64;

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn from_f64(v: f64) -> Self {
                v as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn parse_str(s: &str) -> Result<Self> {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: f64 = n.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
                    let d: f64 = d.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
                    if d == 0.0 {
                        return Err(Error::Parse(s.to_string()));
                    }
                    Ok((n / d) as $t)
                } else {
                    s.parse::<$t>().map_err(|_| Error::Parse(s.to_string()))
                }
            }

            fn exact_string(&self) -> Option<String> {
                None
            }

            fn psd_split(g: &Matrix<Self>, tol: &RankTolerance) -> Result<PsdSplit<Self>> {
                linalg::float_psd_split(g, tol)
            }

            fn abs(&self) -> Self {
                Float::abs(*self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

impl Scalar for BigRational {
    const EXACT: bool = true;
    const EPSILON: f64 = 0.0;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }

    fn psd_split(g: &Matrix<Self>, tol: &RankTolerance) -> Result<PsdSplit<Self>> {
        let _ = tol;
        linalg::exact_psd_split(g)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Parses a rational (`p/q`) or decimal string exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| err())?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Closest rational with denominator at most `max_den`, if within `tol` of `x`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol).then_some((p as i64, q))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/8").unwrap(), BigRational::from_ratio(3, 8));
        assert_eq!(parse_rational("-0.125").unwrap(), BigRational::from_ratio(-1, 8));
        assert_eq!(parse_rational("1.5e-3").unwrap(), BigRational::from_ratio(3, 2000));
        assert_eq!(parse_rational("2e2").unwrap(), BigRational::from_i64(200));
        assert_eq!(parse_rational(" 7 ").unwrap(), BigRational::from_i64(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn parses_floats() {
        assert_eq!(f64::parse_str("3/8").unwrap(), 0.375);
        assert_eq!(f64::parse_str("0.5").unwrap(), 0.5);
        assert!(f64::parse_str("x").is_err());
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(0.3333333333, 64, 1e-8), Some((1, 3)));
        assert_eq!(snap_rational(-1.0, 64, 1e-8), Some((-1, 1)));
        assert_eq!(snap_rational(std::f64::consts::PI, 64, 1e-8), None);
    }
}
