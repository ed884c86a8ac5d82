//! Rational functions in the formal variable `q`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{Rational, Scalar};

/// `numerator / denominator`, gcd-reduced with a monic denominator, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = Polynomial::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).unwrap().0, den.div_rem(&g).unwrap().0)
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        Self {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self::normalize(p, Polynomial::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn q() -> Self {
        Self::from_poly(Polynomial::q())
    }

    /// `1 - q^k`
    pub fn one_minus_q_pow(k: usize) -> Self {
        Self::from_poly(&Polynomial::one() - &Polynomial::monomial(Rational::one(), k))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * &base;
        }
        acc
    }

    /// Substitute a rational value for `q`.
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Taylor coefficients at `q = 0` through `q^order`.
    pub fn expand(&self, order: usize) -> Result<Vec<Rational>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::PoleAtZero);
        }
        let inv0 = d0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(self.den.coeffs().len().saturating_sub(1)) {
                acc -= self.den.coeff(j) * &out[k - j];
            }
            out.push(acc * &inv0);
        }
        Ok(out)
    }
}

/// Taylor coefficients of `rf` at `q = 0` through `q^order`.
pub fn expand_ratfun(rf: &RationalFunction, order: usize) -> Result<Vec<Rational>> {
    rf.expand(order)
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self {
            num: Polynomial::one(),
            den: Polynomial::one(),
        }
    }
}

impl Add<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return Self::normalize(&self.num + &rhs.num, self.den);
        }
        Self::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs.clone())
    }
}

impl Mul<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        // both factors are reduced, so cancelling across is enough
        let g1 = Polynomial::gcd(&self.num, &rhs.den);
        let g2 = Polynomial::gcd(&rhs.num, &self.den);
        let cut = |p: &Polynomial, g: &Polynomial| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_rem(g).expect("nonzero gcd").0
            }
        };
        let num = &cut(&self.num, &g1) * &cut(&rhs.num, &g2);
        let den = &cut(&self.den, &g2) * &cut(&rhs.den, &g1);
        let lead = den.leading().expect("nonzero denominator").recip();
        Self {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }
}

impl Div<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        Self {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl Scalar for RationalFunction {
    const DOMAIN: &'static str = "ratfun_q";

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::normalize(self.den.clone(), self.num.clone()))
        }
    }

    fn from_rational(r: &Rational) -> Self {
        Self::constant(r.clone())
    }

    fn to_text(&self) -> String {
        let list = |p: &Polynomial| {
            let parts: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        };
        format!("{}/{}", list(&self.num), list(&self.den))
    }

    fn parse_text(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a rational function: {s:?}"));
        let s = s.trim();
        let split = s.find("]/[").ok_or_else(bad)?;
        let parse_list = |body: &str| -> Result<Polynomial> {
            let body = body.trim();
            if body.is_empty() {
                return Ok(Polynomial::zero());
            }
            body.split(',')
                .map(Rational::parse_text)
                .collect::<Result<Vec<_>>>()
                .map(Polynomial::new)
        };
        let num = parse_list(s[..split].strip_prefix('[').ok_or_else(bad)?)?;
        let den = parse_list(s[split + 3..].strip_suffix(']').ok_or_else(bad)?)?;
        Self::new(num, den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            if self.num.coeffs().len() > 1 {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn one_minus_q() -> RationalFunction {
        RationalFunction::one_minus_q_pow(1)
    }

    #[test]
    fn normalization_is_structural() {
        let a = RationalFunction::new(
            Polynomial::from_ints(&[2, -2]),
            Polynomial::from_ints(&[1, 0, -1]),
        )
        .unwrap();
        let b = RationalFunction::new(Polynomial::from_ints(&[2]), Polynomial::from_ints(&[1, 1]))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.denominator().leading(), Some(&rat(1)));
    }

    #[test]
    fn inverse_square_expansion() {
        let rf = one_minus_q().pow(-2);
        let got = expand_ratfun(&rf, 3).unwrap();
        assert_eq!(got, vec![rat(1), rat(2), rat(3), rat(4)]);
    }

    #[test]
    fn self_ratio_is_one() {
        let rf = one_minus_q() / one_minus_q();
        assert_eq!(expand_ratfun(&rf, 4).unwrap(), vec![rat(1), rat(0), rat(0), rat(0), rat(0)]);
    }

    #[test]
    fn partitions_into_parts_at_most_two() {
        // oracle: count partitions of k into parts of size 1 and 2
        let oracle: Vec<Rational> = (0..=4i64).map(|k| rat(k / 2 + 1)).collect();
        let rf = (one_minus_q() * RationalFunction::one_minus_q_pow(2)).inv().unwrap();
        assert_eq!(expand_ratfun(&rf, 4).unwrap(), oracle);
        assert_eq!(oracle, vec![rat(1), rat(1), rat(2), rat(2), rat(3)]);
    }

    #[test]
    fn pole_at_zero_rejected() {
        let rf = RationalFunction::q().inv().unwrap();
        assert_eq!(expand_ratfun(&rf, 2), Err(Error::PoleAtZero));
    }

    #[test]
    fn text_round_trip() {
        let rf = (one_minus_q().pow(-3) + RationalFunction::q()) * RationalFunction::constant(rat(-5));
        assert_eq!(RationalFunction::parse_text(&rf.to_text()).unwrap(), rf);
        assert_eq!(
            RationalFunction::parse_text(&RationalFunction::zero().to_text()).unwrap(),
            RationalFunction::zero()
        );
    }

    #[test]
    fn eval_at_point() {
        let rf = one_minus_q().pow(-1);
        assert_eq!(rf.eval(&rat(-1)).unwrap(), crate::scalar::ratio(1, 2));
        assert!(rf.eval(&rat(1)).is_err());
    }
}
