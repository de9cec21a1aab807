//! Fixed-point coefficients in thousandths.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of milliunits in one unit.
pub const SCALE: i64 = 1000;

/// A coefficient or energy stored as an integer number of thousandths.
///
/// Serialized as a decimal string with exactly three fractional digits,
/// e.g. `"-1.000"` or `"0.010"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Milli(pub i64);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecimalError {
    #[error("empty decimal")]
    Empty,
    #[error("invalid decimal {0:?}")]
    Invalid(String),
    #[error("decimal {0:?} has more than three significant fractional digits")]
    TooPrecise(String),
    #[error("decimal {0:?} out of range")]
    Overflow(String),
}

impl Milli {
    pub const ZERO: Milli = Milli(0);
    pub const ONE: Milli = Milli(SCALE);

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub fn from_units(units: i64) -> Self {
        Milli(units * SCALE)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn abs(self) -> Self {
        Milli(self.0.abs())
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `self * factor`, where both are fixed-point. `None` unless the product
    /// lands exactly on a thousandth.
    pub fn scale_exact(self, factor: Milli) -> Option<Milli> {
        let p = self.0.checked_mul(factor.0)?;
        (p % SCALE == 0).then_some(Milli(p / SCALE))
    }
}

impl fmt::Display for Milli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        let s = SCALE as u64;
        write!(f, "{sign}{}.{:03}", a / s, a % s)
    }
}

impl FromStr for Milli {
    type Err = DecimalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if t.is_empty() {
            return Err(DecimalError::Empty);
        }
        let (neg, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty()) || !digits(int_part) || !digits(frac_part) {
            return Err(DecimalError::Invalid(text.to_string()));
        }
        let significant = frac_part.trim_end_matches('0');
        if significant.len() > 3 {
            return Err(DecimalError::TooPrecise(text.to_string()));
        }
        let overflow = || DecimalError::Overflow(text.to_string());
        let whole: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| overflow())? };
        let mut frac: i64 = 0;
        for (k, b) in significant.bytes().enumerate() {
            frac += i64::from(b - b'0') * 10i64.pow(2 - k as u32);
        }
        let v = whole.checked_mul(SCALE).and_then(|w| w.checked_add(frac)).ok_or_else(overflow)?;
        Ok(Milli(if neg { -v } else { v }))
    }
}

impl Serialize for Milli {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Milli {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for Milli {
    type Output = Milli;
    fn add(self, rhs: Milli) -> Milli {
        Milli(self.0 + rhs.0)
    }
}

impl AddAssign for Milli {
    fn add_assign(&mut self, rhs: Milli) {
        self.0 += rhs.0;
    }
}

impl Sub for Milli {
    type Output = Milli;
    fn sub(self, rhs: Milli) -> Milli {
        Milli(self.0 - rhs.0)
    }
}

impl SubAssign for Milli {
    fn sub_assign(&mut self, rhs: Milli) {
        self.0 -= rhs.0;
    }
}

impl Neg for Milli {
    type Output = Milli;
    fn neg(self) -> Milli {
        Milli(-self.0)
    }
}

impl Mul<i64> for Milli {
    type Output = Milli;
    fn mul(self, rhs: i64) -> Milli {
        Milli(self.0 * rhs)
    }
}

impl Sum for Milli {
    fn sum<I: Iterator<Item = Milli>>(iter: I) -> Milli {
        Milli(iter.map(|m| m.0).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_three_digits() {
        assert_eq!(Milli(-1000).to_string(), "-1.000");
        assert_eq!(Milli(10).to_string(), "0.010");
        assert_eq!(Milli(-5).to_string(), "-0.005");
        assert_eq!(Milli(0).to_string(), "0.000");
        assert_eq!(Milli(5300).to_string(), "5.300");
    }

    #[test]
    fn parses_loose_decimals() {
        assert_eq!("0.1".parse::<Milli>(), Ok(Milli(100)));
        assert_eq!("-.25".parse::<Milli>(), Ok(Milli(-250)));
        assert_eq!("3".parse::<Milli>(), Ok(Milli(3000)));
        assert_eq!("1.2500".parse::<Milli>(), Ok(Milli(1250)));
        assert!(matches!("0.0001".parse::<Milli>(), Err(DecimalError::TooPrecise(_))));
        assert!(matches!("1e3".parse::<Milli>(), Err(DecimalError::Invalid(_))));
        assert!(matches!("-".parse::<Milli>(), Err(DecimalError::Invalid(_))));
        assert!(matches!("".parse::<Milli>(), Err(DecimalError::Empty)));
    }

    #[test]
    fn exact_scaling() {
        assert_eq!(Milli(1000).scale_exact(Milli(100)), Some(Milli(100)));
        assert_eq!(Milli(-1000).scale_exact(Milli(10)), Some(Milli(-10)));
        assert_eq!(Milli(300).scale_exact(Milli(10)), Some(Milli(3)));
        assert_eq!(Milli(1).scale_exact(Milli(100)), None);
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(v in -10_000_000_000i64..10_000_000_000) {
            prop_assert_eq!(Milli(v).to_string().parse::<Milli>(), Ok(Milli(v)));
        }
    }
}
