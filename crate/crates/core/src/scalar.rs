//! Exact scalar domains.
//!
//! Everything in the workbench is generic over [`Scalar`], a commutative
//! field with exact equality. Two implementations ship: [`Rational`]
//! (arbitrary-precision rationals) and [`RationalFunction`](crate::RationalFunction)
//! (ratios of polynomials in `q`).

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// An exact commutative field.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Short tag written into serialized series.
    const DOMAIN: &'static str;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn from_rational(r: &Rational) -> Self;

    fn from_int(i: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(i)))
    }

    /// Canonical exact text form; `parse_text(to_text(x)) == x`.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self>;
}

impl Scalar for Rational {
    const DOMAIN: &'static str = "rational";

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_text(s: &str) -> Result<Self> {
        s.trim()
            .parse::<Rational>()
            .map_err(|_| Error::Parse(format!("not an exact rational: {s:?}")))
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `binom(n, k)` for non-negative `n`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial `binom(x, k) = x (x-1) ... (x-k+1) / k!` for any integer `x`.
pub fn binomial_poly(x: &BigInt, k: u32) -> Rational {
    let mut num = BigInt::one();
    for i in 0..k {
        num *= x - BigInt::from(i);
    }
    Rational::new(num, factorial(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for r in [ratio(-3, 7), rat(0), rat(12), ratio(1, 2)] {
            assert_eq!(Rational::parse_text(&r.to_text()).unwrap(), r);
        }
        assert!(Rational::parse_text("x/2").is_err());
    }

    #[test]
    fn normalized_on_construction() {
        let r = ratio(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(ratio(0, 5).denom(), &BigInt::one());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(binomial_poly(&BigInt::from(1), 2), rat(0));
        assert_eq!(binomial_poly(&BigInt::from(-1), 2), rat(1));
        assert_eq!(binomial_poly(&BigInt::from(7), 3), rat(35));
    }
}
