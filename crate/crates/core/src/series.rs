//! Truncated multivariate formal power series.
//!
//! A [`MultiSeries`] lives in `r` t-variables and `m` Novikov variables.
//! Its [`Truncation`] records the order through which the stored
//! coefficients are reliable: total t-degree at most `t_order`, and the
//! degree in Novikov variable `j` at most `q_caps[j]`. Binary operations
//! take the componentwise minimum, and differentiation lowers `t_order`
//! by one, so callers never have to track reliability by hand.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    pub t_order: usize,
    pub q_caps: Vec<usize>,
}

impl Truncation {
    pub fn new(t_order: usize, q_caps: Vec<usize>) -> Self {
        Self { t_order, q_caps }
    }

    /// No Novikov variables.
    pub fn t_only(t_order: usize) -> Self {
        Self::new(t_order, Vec::new())
    }

    pub fn n_q(&self) -> usize {
        self.q_caps.len()
    }

    pub fn meet(&self, other: &Self) -> Self {
        debug_assert_eq!(self.q_caps.len(), other.q_caps.len());
        Self {
            t_order: self.t_order.min(other.t_order),
            q_caps: self
                .q_caps
                .iter()
                .zip(&other.q_caps)
                .map(|(a, b)| *a.min(b))
                .collect(),
        }
    }

    pub fn with_t_order(&self, t_order: usize) -> Self {
        Self {
            t_order,
            q_caps: self.q_caps.clone(),
        }
    }

    /// Whether the exponent vector (t-part first, then Novikov part) lies inside.
    pub fn admits(&self, n_t: usize, exp: &[u32]) -> bool {
        let t_deg: u64 = exp[..n_t].iter().map(|&e| e as u64).sum();
        t_deg <= self.t_order as u64
            && exp[n_t..]
                .iter()
                .zip(&self.q_caps)
                .all(|(&e, &cap)| e as usize <= cap)
    }

    pub fn is_within(&self, other: &Self) -> bool {
        self.t_order <= other.t_order
            && self.q_caps.len() == other.q_caps.len()
            && self.q_caps.iter().zip(&other.q_caps).all(|(a, b)| a <= b)
    }
}

/// Exponent multi-index: all t-variables, then all Novikov variables.
pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq)]
pub struct MultiSeries<S> {
    n_t: usize,
    trunc: Truncation,
    terms: BTreeMap<Exponent, S>,
}

impl<S: Scalar> MultiSeries<S> {
    pub fn zero(n_t: usize, trunc: Truncation) -> Self {
        Self {
            n_t,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_t: usize, trunc: Truncation, c: S) -> Self {
        let exp = vec![0; n_t + trunc.n_q()];
        Self::monomial(n_t, trunc, exp, c)
    }

    pub fn one(n_t: usize, trunc: Truncation) -> Self {
        Self::constant(n_t, trunc, S::one())
    }

    /// `c * t^exp`; dropped if outside the truncation.
    pub fn monomial(n_t: usize, trunc: Truncation, exp: Exponent, c: S) -> Self {
        let mut s = Self::zero(n_t, trunc);
        s.add_term(exp, c);
        s
    }

    /// The coordinate `t_i`.
    pub fn t_var(n_t: usize, trunc: Truncation, i: usize) -> Self {
        let mut exp = vec![0; n_t + trunc.n_q()];
        exp[i] = 1;
        Self::monomial(n_t, trunc, exp, S::one())
    }

    /// The Novikov variable `Q_j`.
    pub fn novikov_var(n_t: usize, trunc: Truncation, j: usize) -> Self {
        let mut exp = vec![0; n_t + trunc.n_q()];
        exp[n_t + j] = 1;
        Self::monomial(n_t, trunc, exp, S::one())
    }

    pub fn from_terms(
        n_t: usize,
        trunc: Truncation,
        terms: impl IntoIterator<Item = (Exponent, S)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_t, trunc);
        for (exp, c) in terms {
            if exp.len() != s.n_vars() {
                return Err(Error::Length {
                    expected: s.n_vars(),
                    found: exp.len(),
                });
            }
            s.add_term(exp, c);
        }
        Ok(s)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_q(&self) -> usize {
        self.trunc.n_q()
    }

    pub fn n_vars(&self) -> usize {
        self.n_t + self.n_q()
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn t_order(&self) -> usize {
        self.trunc.t_order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> S {
        self.terms.get(exp).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&vec![0; self.n_vars()])
    }

    pub fn t_degree(&self, exp: &[u32]) -> usize {
        exp[..self.n_t].iter().map(|&e| e as usize).sum()
    }

    /// Smallest total t-degree among stored terms.
    pub fn min_t_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| self.t_degree(e)).min()
    }

    /// Adds `c * t^exp` in place, respecting truncation and dropping zeros.
    pub fn add_term(&mut self, exp: Exponent, c: S) {
        if c.is_zero() || !self.trunc.admits(self.n_t, &exp) {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_t != other.n_t || self.n_q() != other.n_q() {
            return Err(Error::Arity(format!(
                "({}, {}) vs ({}, {})",
                self.n_t,
                self.n_q(),
                other.n_t,
                other.n_q()
            )));
        }
        Ok(())
    }

    /// Restrict to a (componentwise smaller) truncation.
    pub fn truncate(&self, trunc: &Truncation) -> Self {
        let trunc = self.trunc.meet(trunc);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| trunc.admits(self.n_t, e))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self {
            n_t: self.n_t,
            trunc,
            terms,
        }
    }

    pub fn truncate_t(&self, t_order: usize) -> Self {
        self.truncate(&self.trunc.with_t_order(t_order))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let trunc = self.trunc.meet(&other.trunc);
        let mut out = self.truncate(&trunc);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        Self {
            n_t: self.n_t,
            trunc: self.trunc.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n_t, self.trunc.clone());
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c);
        }
        out
    }

    /// Truncated product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let trunc = self.trunc.meet(&other.trunc);
        let mut acc: BTreeMap<Exponent, S> = BTreeMap::new();
        let n = self.n_vars();
        let mut exp = vec![0u32; n];
        for (ea, ca) in &self.terms {
            if !trunc.admits(self.n_t, ea) {
                continue;
            }
            for (eb, cb) in &other.terms {
                for i in 0..n {
                    exp[i] = ea[i] + eb[i];
                }
                if !trunc.admits(self.n_t, &exp) {
                    continue;
                }
                let prod = ca.clone() * cb;
                match acc.get_mut(&exp) {
                    Some(v) => *v = v.clone() + &prod,
                    None => {
                        acc.insert(exp.clone(), prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Self {
            n_t: self.n_t,
            trunc,
            terms: acc,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n_t, self.trunc.clone());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse through the truncation, by expanding
    /// `c^{-1} (1 - h + h^2 - ...)` around the constant term `c`.
    pub fn invert(&self) -> Result<Self> {
        let c = self.constant_term();
        let c_inv = c.inv().ok_or(Error::NotInvertible)?;
        let mut h = self.scale(&c_inv);
        h.add_term(vec![0; self.n_vars()], -S::one());
        let neg_h = -h;
        let mut term = Self::one(self.n_t, self.trunc.clone());
        let mut sum = term.clone();
        loop {
            term = &term * &neg_h;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(&c_inv))
    }

    /// Formal partial derivative in t-variable `var`. The result is
    /// reliable through one less t-order than the input.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if var >= self.n_vars() {
            return Err(Error::VariableOutOfRange {
                index: var,
                count: self.n_vars(),
            });
        }
        if var >= self.n_t {
            return Err(Error::NovikovDerivative(var - self.n_t));
        }
        if self.trunc.t_order == 0 {
            return Err(Error::TruncationTooSmall { needed: 1, have: 0 });
        }
        let mut out = Self::zero(self.n_t, self.trunc.with_t_order(self.trunc.t_order - 1));
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut de = e.clone();
            de[var] -= 1;
            out.add_term(de, c.clone() * &S::from_int(e[var] as i64));
        }
        Ok(out)
    }

    /// Apply `f` coefficientwise into another scalar domain.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiSeries<T> {
        let mut out = MultiSeries::zero(self.n_t, self.trunc.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// First monomial (in canonical order) where the two series differ
    /// inside their common truncation.
    pub fn first_difference(&self, other: &Self) -> Option<(Exponent, S, S)> {
        let trunc = self.trunc.meet(&other.trunc);
        let a = self.truncate(&trunc);
        let b = other.truncate(&trunc);
        let keys: std::collections::BTreeSet<Exponent> =
            a.terms.keys().chain(b.terms.keys()).cloned().collect();
        keys.into_iter().find_map(|k| {
            let (ca, cb) = (a.coeff(&k), b.coeff(&k));
            (ca != cb).then_some((k, ca, cb))
        })
    }

    /// Equal within the common truncation.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// The part of t-degree exactly `d`.
    pub fn t_homogeneous(&self, d: usize) -> Self {
        let mut out = Self::zero(self.n_t, self.trunc.clone());
        for (e, c) in &self.terms {
            if self.t_degree(e) == d {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    fn var_name(&self, i: usize) -> String {
        if i < self.n_t {
            format!("t{i}")
        } else {
            format!("Q{}", i - self.n_t)
        }
    }
}

impl<S: Scalar> MultiSeries<S> {
    /// Set every Novikov variable to zero.
    pub fn at_q_zero(&self) -> Self {
        let mut trunc = self.trunc.clone();
        trunc.q_caps.iter_mut().for_each(|c| *c = 0);
        self.truncate(&trunc)
    }
}

impl<S: Scalar> fmt::Debug for MultiSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiSeries[{}]({self})", S::DOMAIN)
    }
}

impl<S: Scalar> fmt::Display for MultiSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        self.var_name(i)
                    } else {
                        format!("{}^{p}", self.var_name(i))
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{c}*{}", mono.join("*"))?;
            }
        }
        write!(f, " + O(t^{}", self.trunc.t_order + 1)?;
        for (j, cap) in self.trunc.q_caps.iter().enumerate() {
            write!(f, ", Q{j}^{}", cap + 1)?;
        }
        write!(f, ")")
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<S: Scalar> $tr for &MultiSeries<S> {
            type Output = MultiSeries<S>;
            fn $m(self, rhs: &MultiSeries<S>) -> MultiSeries<S> {
                self.$try(rhs).expect("series arity mismatch")
            }
        }
        impl<S: Scalar> $tr for MultiSeries<S> {
            type Output = MultiSeries<S>;
            fn $m(self, rhs: MultiSeries<S>) -> MultiSeries<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

impl<S: Scalar> Neg for MultiSeries<S> {
    type Output = MultiSeries<S>;
    fn neg(self) -> MultiSeries<S> {
        self.neg_ref()
    }
}

impl<S: Scalar> Neg for &MultiSeries<S> {
    type Output = MultiSeries<S>;
    fn neg(self) -> MultiSeries<S> {
        self.neg_ref()
    }
}

/// `f * g` with arity checking.
pub fn mul<S: Scalar>(f: &MultiSeries<S>, g: &MultiSeries<S>) -> Result<MultiSeries<S>> {
    f.try_mul(g)
}

/// Truncated `exp(t_var)` in a single direction, starting at t-degree `start`.
pub fn exp_tail<S: Scalar>(n_t: usize, trunc: Truncation, var: usize, start: usize) -> MultiSeries<S> {
    let mut out = MultiSeries::zero(n_t, trunc.clone());
    let mut fact = Rational::from_integer(1.into());
    for k in 0..=trunc.t_order {
        if k > 0 {
            fact *= Rational::from_integer((k as i64).into());
        }
        if k < start {
            continue;
        }
        let mut e = vec![0; n_t + trunc.n_q()];
        e[var] = k as u32;
        out.add_term(e, S::from_rational(&fact.recip()));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    domain: String,
    n_t: usize,
    n_q: usize,
    truncation: Truncation,
    terms: Vec<TermJson>,
}

impl<S: Scalar> Serialize for MultiSeries<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        SeriesJson {
            domain: S::DOMAIN.to_string(),
            n_t: self.n_t,
            n_q: self.n_q(),
            truncation: self.trunc.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coef: c.to_text(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for MultiSeries<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SeriesJson::deserialize(de)?;
        if raw.domain != S::DOMAIN {
            return Err(D::Error::custom(Error::Domain {
                expected: S::DOMAIN.into(),
                found: raw.domain,
            }));
        }
        if raw.n_q != raw.truncation.n_q() {
            return Err(D::Error::custom("n_q disagrees with truncation caps"));
        }
        let mut s = MultiSeries::zero(raw.n_t, raw.truncation);
        for t in raw.terms {
            if t.exp.len() != s.n_vars() {
                return Err(D::Error::custom("exponent length disagrees with arity"));
            }
            if !s.trunc.admits(s.n_t, &t.exp) {
                return Err(D::Error::custom("term outside the recorded truncation"));
            }
            let c = S::parse_text(&t.coef).map_err(D::Error::custom)?;
            if c.is_zero() {
                return Err(D::Error::custom("stored coefficient is zero"));
            }
            s.add_term(t.exp, c);
        }
        Ok(s)
    }
}
