//! Exact nonnegative rationals with a `+∞` sentinel.
//!
//! Every boundary/size quotient in the crate is a [`Ratio`]; floating point
//! only appears in the spectral layer. Values are kept in lowest terms, so
//! structural equality coincides with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative rational `num/den` in lowest terms, or `+∞`.
///
/// `den == 0` encodes infinity internally; the representation is private.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };
    pub const INFINITY: Ratio = Ratio { num: 1, den: 0 };

    /// Builds `num/den` reduced to lowest terms.
    ///
    /// # Panics
    /// Panics when `den == 0`; use [`Ratio::INFINITY`] for the sentinel.
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "Ratio denominator must be positive");
        if num == 0 {
            return Ratio::ZERO;
        }
        let g = num.gcd(&den);
        Ratio { num: num / g, den: den / g }
    }

    pub fn integer(value: u64) -> Ratio {
        Ratio { num: value, den: 1 }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn is_zero(&self) -> bool {
        self.den != 0 && self.num == 0
    }

    /// Numerator and denominator, or `None` for infinity.
    pub fn parts(&self) -> Option<(u64, u64)> {
        (!self.is_infinite()).then_some((self.num, self.den))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// Multiplies by a nonnegative integer. `∞ · 0` is taken to be `0`.
    pub fn mul_int(&self, factor: u64) -> Ratio {
        if factor == 0 {
            return Ratio::ZERO;
        }
        if self.is_infinite() {
            return Ratio::INFINITY;
        }
        let g = factor.gcd(&self.den);
        let num = (self.num as u128) * ((factor / g) as u128);
        Ratio::from_u128(num, (self.den / g) as u128)
    }

    /// Divides by a positive integer.
    pub fn div_int(&self, divisor: u64) -> Ratio {
        assert!(divisor != 0, "division by zero");
        if self.is_infinite() {
            return Ratio::INFINITY;
        }
        Ratio::from_u128(self.num as u128, self.den as u128 * divisor as u128)
    }

    fn from_u128(num: u128, den: u128) -> Ratio {
        if num == 0 {
            return Ratio::ZERO;
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Ratio {
            num: u64::try_from(num).expect("Ratio numerator overflow"),
            den: u64::try_from(den).expect("Ratio denominator overflow"),
        }
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::ZERO
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                let lhs = self.num as u128 * other.den as u128;
                let rhs = other.num as u128 * self.den as u128;
                lhs.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Ratio {
    type Output = Ratio;

    fn add(self, rhs: Ratio) -> Ratio {
        if self.is_infinite() || rhs.is_infinite() {
            return Ratio::INFINITY;
        }
        let num = self.num as u128 * rhs.den as u128 + rhs.num as u128 * self.den as u128;
        let den = self.den as u128 * rhs.den as u128;
        Ratio::from_u128(num, den)
    }
}

impl From<u64> for Ratio {
    fn from(value: u64) -> Self {
        Ratio::integer(value)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    /// Accepts `"p/q"`, a bare integer `"p"`, or `"inf"`.
    fn from_str(s: &str) -> Result<Ratio> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Ratio::INFINITY);
        }
        let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {s:?}") };
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: u64 = num.parse().map_err(|_| bad("bad numerator"))?;
        let den: u64 = den.parse().map_err(|_| bad("bad denominator"))?;
        if den == 0 {
            return Err(bad("zero denominator"));
        }
        Ok(Ratio::new(num, den))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Ratio, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
