//! Arithmetic backends.
//!
//! Structural decisions (signs of slope differences, collinearity, knot
//! locations) are made in a [`Scalar`]. Two backends exist: [`f64`] and the
//! exact [`Rational`]. Regularization costs involve `|c|^p`, which is
//! irrational in general, so costs are always evaluated in `f64`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// Relative tolerance used for sign decisions in floating point mode.
pub const FLOAT_SIGN_TOL: f64 = 1e-12;

/// Relative threshold below which a float slope change is treated as zero.
pub const FLOAT_ELISION_TOL: f64 = 1e-14;

/// Field operations plus the handful of predicates the solvers need.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Converts a finite float. Rationals take the exact binary value.
    fn from_f64(v: f64) -> Result<Self>;

    /// Parses a decimal literal such as `-1.25e-3`. Rationals parse it exactly.
    fn parse_decimal(s: &str) -> Result<Self>;

    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Sign of `self` judged against the magnitude `scale` of the quantities
    /// it was computed from. Exact backends ignore `scale`.
    fn sign_rel(&self, scale: &Self) -> i8;

    /// `num/den` rendering for exact values.
    fn exact_string(&self) -> Option<String>;

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// `(self)_+`
    fn relu(&self) -> Self {
        if *self > Self::zero() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Format(format!("non-finite value {v}")))
        }
    }
    fn parse_decimal(s: &str) -> Result<Self> {
        if s.contains('/') {
            return Self::from_f64(Scalar::to_f64(&parse_decimal_exact(s)?));
        }
        let v: f64 = s.trim().parse().map_err(|_| Error::Format(format!("not a number: {s:?}")))?;
        Self::from_f64(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sign_rel(&self, scale: &Self) -> i8 {
        let tol = FLOAT_SIGN_TOL * f64::abs(*scale).max(f64::MIN_POSITIVE);
        if *self > tol {
            1
        } else if *self < -tol {
            -1
        } else {
            0
        }
    }
    fn exact_string(&self) -> Option<String> {
        None
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Result<Self> {
        Rational::from_float(v).ok_or_else(|| Error::Format(format!("non-finite value {v}")))
    }
    fn parse_decimal(s: &str) -> Result<Self> {
        parse_decimal_exact(s)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign_rel(&self, _scale: &Self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn exact_string(&self) -> Option<String> {
        Some(format!("{}/{}", self.numer(), self.denom()))
    }
}

/// Parses `[+-]digits[.digits][e[+-]digits]` into an exact rational. Also
/// accepts `num/den`.
pub fn parse_decimal_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a decimal number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Converts between backends, going through the exact binary value of
/// floats or the nearest float of rationals.
pub fn convert<S: Scalar, T: Scalar>(v: &S) -> T {
    if S::EXACT && T::EXACT {
        // Rational -> Rational: the only exact type we have.
        T::parse_decimal(&v.exact_string().expect("exact scalar")).expect("rational roundtrip")
    } else {
        T::from_f64(v.to_f64()).expect("finite value")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        let v = parse_decimal_exact("0.05").unwrap();
        assert_eq!(v, Rational::new(BigInt::from(1), BigInt::from(20)));
        let v = parse_decimal_exact("-24.95").unwrap();
        assert_eq!(v, Rational::new(BigInt::from(-499), BigInt::from(20)));
        let v = parse_decimal_exact("1.5e2").unwrap();
        assert_eq!(v, Rational::from_i64(150));
        let v = parse_decimal_exact("25e-2").unwrap();
        assert_eq!(v, Rational::new(BigInt::from(1), BigInt::from(4)));
        let v = parse_decimal_exact(".5").unwrap();
        assert_eq!(v, Rational::new(BigInt::from(1), BigInt::from(2)));
        let v = parse_decimal_exact("3/6").unwrap();
        assert_eq!(v, Rational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn decimal_parsing_rejects_garbage() {
        for s in ["", "-", "1.2.3", "abc", "1e", "1/0", "0x10"] {
            assert!(parse_decimal_exact(s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn float_sign_uses_relative_tolerance() {
        assert_eq!(1e-20f64.sign_rel(&1.0), 0);
        assert_eq!(1e-20f64.sign_rel(&1e-15), 1);
        assert_eq!((-0.5f64).sign_rel(&1.0), -1);
    }

    #[test]
    fn conversions() {
        let r: Rational = convert(&0.5f64);
        assert_eq!(r, Rational::new(BigInt::from(1), BigInt::from(2)));
        let f: f64 = convert(&parse_decimal_exact("0.1").unwrap());
        assert_eq!(f, 0.1);
        let r2: Rational = convert(&r);
        assert_eq!(r, r2);
    }
}
