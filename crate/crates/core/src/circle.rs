//! Exact arithmetic on the rational circle ℚ/ℤ.
//!
//! Every character value of a finite abelian group is torsion, so the
//! torsion subgroup ℚ/ℤ of the circle ℝ/ℤ is enough for every computation
//! in this crate. Elements are kept in canonical form `p/q` with
//! `gcd(p, q) = 1` and `0 <= p < q`, so structural equality is equality
//! in the group.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseCircleError {
    #[error("expected a rational of the form \"p/q\", got {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// An element of ℚ/ℤ in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircleElement {
    num: u64,
    den: u64,
}

impl CircleElement {
    pub const ZERO: CircleElement = CircleElement { num: 0, den: 1 };

    /// Reduces `num/den mod 1`. Panics if `den == 0` or if the reduced
    /// denominator does not fit in a `u64`.
    pub fn new(num: i128, den: u128) -> Self {
        assert!(den != 0, "circle element with zero denominator");
        let den_i = i128::try_from(den).expect("circle denominator overflow");
        let r = num.rem_euclid(den_i);
        let g = r.gcd(&den_i);
        let (p, q) = ((r / g) as u128, (den_i / g) as u128);
        CircleElement {
            num: u64::try_from(p).expect("circle numerator overflow"),
            den: u64::try_from(q).expect("circle denominator overflow"),
        }
    }

    pub fn from_ratio(num: i64, den: u64) -> Self {
        Self::new(num as i128, den as u128)
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// The additive order of the element, which is its reduced denominator.
    pub fn order(&self) -> u64 {
        self.den
    }

    /// `n · x` for any integer `n`.
    pub fn int_scale(&self, n: i64) -> Self {
        Self::new(n as i128 * self.num as i128, self.den as u128)
    }

    /// The root `g_n(x) = x/n mod 1` computed from the representative of
    /// `x` in `[0, 1)`. It satisfies `n · g_n(x) = x`, but `g_n` is not a
    /// homomorphism: `g_2(1/2) + g_2(1/2) = 1/2` while `g_2(0) = 0`.
    pub fn divisible_root(&self, n: u64) -> Self {
        assert!(n >= 1, "divisible_root needs n >= 1");
        Self::new(self.num as i128, self.den as u128 * n as u128)
    }
}

/// Operations accepted by [`circle_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleOp {
    Add(CircleElement, CircleElement),
    Neg(CircleElement),
    IntScale(i64, CircleElement),
}

pub fn circle_arith(op: CircleOp) -> CircleElement {
    match op {
        CircleOp::Add(a, b) => a + b,
        CircleOp::Neg(a) => -a,
        CircleOp::IntScale(n, a) => a.int_scale(n),
    }
}

pub fn divisible_root(n: u64, x: CircleElement) -> CircleElement {
    x.divisible_root(n)
}

impl Default for CircleElement {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Add for CircleElement {
    type Output = CircleElement;

    fn add(self, rhs: CircleElement) -> CircleElement {
        let l = (self.den as u128).lcm(&(rhs.den as u128));
        let a = self.num as u128 * (l / self.den as u128);
        let b = rhs.num as u128 * (l / rhs.den as u128);
        CircleElement::new((a + b) as i128, l)
    }
}

impl Neg for CircleElement {
    type Output = CircleElement;

    fn neg(self) -> CircleElement {
        if self.num == 0 {
            self
        } else {
            CircleElement {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }
}

impl Sub for CircleElement {
    type Output = CircleElement;

    fn sub(self, rhs: CircleElement) -> CircleElement {
        self + (-rhs)
    }
}

impl std::iter::Sum for CircleElement {
    fn sum<I: Iterator<Item = CircleElement>>(iter: I) -> Self {
        iter.fold(CircleElement::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for CircleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CircleElement {
    type Err = ParseCircleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: i128 = p
            .parse()
            .map_err(|_| ParseCircleError::Malformed(s.to_string()))?;
        let q: u128 = q
            .parse()
            .map_err(|_| ParseCircleError::Malformed(s.to_string()))?;
        if q == 0 {
            return Err(ParseCircleError::ZeroDenominator(s.to_string()));
        }
        if q > u64::MAX as u128 {
            return Err(ParseCircleError::Malformed(s.to_string()));
        }
        Ok(CircleElement::new(p, q))
    }
}

impl Serialize for CircleElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CircleElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
