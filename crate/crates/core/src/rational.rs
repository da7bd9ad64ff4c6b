use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number kept in lowest terms, rendered as `num/den`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_int(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i64) -> Self {
        let base = if exp < 0 { self.0.recip() } else { self.0.clone() };
        let mut acc = BigRational::one();
        let mut b = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc *= &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Rational(acc)
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Ceiling as `u64`, failing on negative or oversized values.
    pub fn ceil_u64(&self) -> Result<u64> {
        self.ceil()
            .to_u64()
            .ok_or_else(|| Error::capacity("arithmetic", format!("{self} does not fit in u64")))
    }

    pub fn floor_u64(&self) -> Result<u64> {
        self.floor()
            .to_u64()
            .ok_or_else(|| Error::capacity("arithmetic", format!("{self} does not fit in u64")))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Decimal rendering with `digits` significant digits, rounded half away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}", "0".repeat(digits - 1));
        }
        let negative = self.0.is_negative();
        let abs = self.0.abs();
        // Decimal exponent e with 10^e <= abs < 10^(e+1).
        let ten = BigRational::from_integer(BigInt::from(10));
        let mut e: i64 = (abs.numer().bits() as i64 - abs.denom().bits() as i64) * 30103 / 100000;
        loop {
            let lo = Rational(ten.clone()).pow(e).0;
            if lo > abs {
                e -= 1;
                continue;
            }
            if Rational(ten.clone()).pow(e + 1).0 <= abs {
                e += 1;
                continue;
            }
            break;
        }
        let shift = digits as i64 - 1 - e;
        let scaled = abs * Rational(ten).pow(shift).0;
        let two = BigInt::from(2);
        let (q, r) = scaled.numer().div_rem(scaled.denom());
        let mut mantissa = if &r * &two >= *scaled.denom() { q + 1 } else { q };
        let mut shift = shift;
        if mantissa.to_string().len() > digits {
            mantissa /= 10;
            shift -= 1;
        }
        let text = mantissa.to_string();
        let body = if shift <= 0 {
            format!("{}{}", text, "0".repeat((-shift) as usize))
        } else if (shift as usize) < text.len() {
            let split = text.len() - shift as usize;
            format!("{}.{}", &text[..split], &text[split..])
        } else {
            format!("0.{}{}", "0".repeat(shift as usize - text.len()), text)
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("rational", format!("cannot parse {s:?}"));
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.sign() == Sign::NoSign {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::from_int(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational::from_int(v as u64)
    }
}

/// Unit fraction ε = 1/k with integer k ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Epsilon {
    inverse: u32,
}

impl Epsilon {
    pub fn new(inverse: u32) -> Result<Self> {
        if inverse < 2 {
            return Err(Error::Domain(format!(
                "epsilon must be 1/k with k >= 2, got 1/{inverse}"
            )));
        }
        Ok(Epsilon { inverse })
    }

    /// The integer 1/ε.
    pub fn inverse(self) -> u32 {
        self.inverse
    }

    pub fn value(self) -> Rational {
        Rational::new(1, self.inverse)
    }

    /// 1 + ε as an exact rational.
    pub fn growth(self) -> Rational {
        Rational::new(self.inverse + 1, self.inverse)
    }

    /// (1+ε)^exp.
    pub fn growth_pow(self, exp: i64) -> Rational {
        self.growth().pow(exp)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.inverse)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("epsilon", format!("expected \"1/k\", got {s:?}"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        if n.trim() != "1" {
            return Err(bad());
        }
        let k: u32 = d.trim().parse().map_err(|_| bad())?;
        Epsilon::new(k).map_err(|_| bad())
    }
}
