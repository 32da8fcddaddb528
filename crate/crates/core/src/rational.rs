//! Exact rational numbers.
//!
//! Every probability computed by this crate has a power-of-two denominator,
//! so most internal routes accumulate integer numerators over `2^e` and only
//! build an [`ExactRational`] at the end.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision fraction kept in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self(BigRational::new(num.into(), den.into()))
    }

    /// `num / 2^exp`, reduced by stripping common factors of two.
    pub fn from_dyadic(num: BigInt, exp: u64) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(exp);
        let num = num >> shift;
        let den = BigInt::one() << (exp - shift);
        Self(BigRational::new_raw(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Nearest `f64`; exact for dyadic values that fit.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Whether the denominator is a power of two dividing `2^exp`.
    pub fn denominator_divides_pow2(&self, exp: u64) -> bool {
        let d = self.denom();
        let bits = d.bits();
        d.magnitude().count_ones() == 1 && bits <= exp + 1
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigUint> for ExactRational {
    fn from(v: BigUint) -> Self {
        Self::from_integer(BigInt::from_biguint(Sign::Plus, v))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl PartialEq<u64> for ExactRational {
    fn eq(&self, other: &u64) -> bool {
        self.0.is_integer() && self.0.numer() == &BigInt::from(*other)
    }
}

impl PartialOrd<u64> for ExactRational {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

impl fmt::Display for ExactRational {
    /// `p/q`, or just `p` when the denominator is one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(String);

impl FromStr for ExactRational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRationalError(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Self::new(n, d))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer numerator over `2^exp`. Used for exact accumulation without
/// per-step gcd reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dyadic {
    pub num: BigInt,
    pub exp: u64,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u64) -> Self {
        Self { num, exp }
    }

    /// Rescales to denominator `2^exp` (`exp` must not shrink it).
    pub fn rescaled(&self, exp: u64) -> BigInt {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp)
    }

    pub fn add_assign(&mut self, other: &Dyadic) {
        if other.exp > self.exp {
            self.num = self.rescaled(other.exp) + &other.num;
            self.exp = other.exp;
        } else {
            self.num += other.rescaled(self.exp);
        }
    }

    pub fn to_rational(&self) -> ExactRational {
        ExactRational::from_dyadic(self.num.clone(), self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_reduces() {
        let r = ExactRational::from_dyadic(BigInt::from(12), 4);
        assert_eq!(r, ExactRational::new(3, 4));
        assert!(r.denominator_divides_pow2(2));
        assert!(!r.denominator_divides_pow2(1));
        assert_eq!(ExactRational::from_dyadic(BigInt::from(8), 2), 2u64);
    }

    #[test]
    fn display_and_parse() {
        let r = ExactRational::new(10, 8);
        assert_eq!(r.to_string(), "5/4");
        assert_eq!("5/4".parse::<ExactRational>().unwrap(), r);
        assert_eq!("2".parse::<ExactRational>().unwrap(), 2u64);
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x".parse::<ExactRational>().is_err());
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"5/4\"");
        let back: ExactRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn dyadic_accumulates() {
        let mut acc = Dyadic::new(BigInt::from(0), 0);
        acc.add_assign(&Dyadic::new(BigInt::from(1), 1));
        acc.add_assign(&Dyadic::new(BigInt::from(1), 3));
        assert_eq!(acc.to_rational(), ExactRational::new(5, 8));
        assert!((acc.to_rational().to_f64() - 0.625).abs() < 1e-15);
    }
}
