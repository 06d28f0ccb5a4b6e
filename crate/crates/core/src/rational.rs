//! Exact scalars and their extension by `±∞`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Build a rational from a small numerator and denominator.
///
/// Panics if `den == 0`; intended for literals.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"`, `"p"` or `"-p/q"`. Rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("malformed rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Domain(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// Render as `p/q` (or `p` when integral).
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering for human consumption only.
pub fn to_f64(r: &Rational) -> f64 {
    // BigInt -> f64 through strings keeps huge numerators from overflowing
    // prematurely; precision is irrelevant here.
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

pub fn floor(r: &Rational) -> Rational {
    Rational::from_integer(r.numer().div_floor(r.denom()))
}

pub fn ceil(r: &Rational) -> Rational {
    Rational::from_integer(r.numer().div_ceil(r.denom()))
}

/// Integral part of an integral rational as `i64`, `None` if it does not fit
/// or the value is not an integer.
pub fn to_i64(r: &Rational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    i64::try_from(r.numer().clone()).ok()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// `Rational ∪ {−∞, +∞}`. The derived order is the natural one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn into_finite(self) -> Option<Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn zero() -> Self {
        Extended::Finite(Rational::zero())
    }

    /// Sign of a nonzero slope as an infinity.
    pub fn infinity_with_sign(r: &Rational) -> Self {
        if r.is_positive() {
            Extended::PosInf
        } else {
            Extended::NegInf
        }
    }
}

impl From<Rational> for Extended {
    fn from(r: Rational) -> Self {
        Extended::Finite(r)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::PosInf => f.write_str("+inf"),
            Extended::Finite(r) => f.write_str(&fmt_rational(r)),
        }
    }
}
