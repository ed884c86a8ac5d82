//! Dense univariate polynomials in `q` over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rat, Rational};

/// Coefficients in ascending degree; no trailing zeros, so zero is `[]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c q^deg`.
    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs)
    }

    pub fn q() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: `self = quot * divisor + rem`, `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dlead = divisor.leading().ok_or(Error::ZeroDenominator)?.clone();
        let ddeg = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - ddeg];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + ddeg] / &dlead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(ddeg);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    ///
    /// Runs a primitive remainder sequence on integer multiples of the
    /// inputs, which keeps coefficient growth in check.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.coeffs.len() == 1 || b.coeffs.len() == 1 {
            return Self::one();
        }
        let (mut x, mut y) = (primitive_int(a), primitive_int(b));
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            let r = pseudo_rem(&x, &y);
            x = y;
            y = primitive(r);
        }
        Self::new(x.into_iter().map(Rational::from_integer).collect()).monic()
    }

    /// Taylor coefficients of `self` through `q^order`.
    pub fn truncated(&self, order: usize) -> Vec<Rational> {
        (0..=order).map(|i| self.coeff(i)).collect()
    }
}

/// Integer coefficients with unit content, proportional to `p`.
fn primitive_int(p: &Polynomial) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    primitive(p.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let content = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !content.is_zero() && !content.is_one() {
        for c in &mut v {
            *c /= &content;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b`: `lc(b)^k a mod b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let lr = r.last().expect("non-empty").clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, c) in b.iter().enumerate() {
            r[shift + j] -= &lr * c;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        r = primitive(r);
    }
    r
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn division_identity() {
        let a = Polynomial::from_ints(&[1, 0, -3, 2, 5]);
        let b = Polynomial::from_ints(&[2, 1, 1]);
        let (qt, r) = a.div_rem(&b).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(&(&qt * &b) + &r, a);
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (1 - q)(1 + q) and (1 - q)^2
        let a = Polynomial::from_ints(&[1, 0, -1]);
        let b = Polynomial::from_ints(&[1, -2, 1]);
        assert_eq!(Polynomial::gcd(&a, &b), Polynomial::from_ints(&[-1, 1]));
        assert!(Polynomial::gcd(&a, &Polynomial::from_ints(&[2])).is_one());
    }

    #[test]
    fn display_and_eval() {
        let p = Polynomial::new(vec![rat(1), rat(-1), ratio(1, 2)]);
        assert_eq!(p.to_string(), "1 - q + 1/2*q^2");
        assert_eq!(p.eval(&rat(2)), rat(1));
    }

    #[test]
    fn zero_divisor_rejected() {
        assert_eq!(
            Polynomial::q().div_rem(&Polynomial::zero()),
            Err(Error::ZeroDenominator)
        );
    }
}
