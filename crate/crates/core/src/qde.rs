//! The q-difference equation `D^{n+1} S = Q S` for projective space.
//!
//! `(D S)(Q) = S(Q) - S(qQ)` acts on the coefficient of `Q^d` as
//! multiplication by `1 - q^d`. The twisted operator
//! `(D_P J)(Q) = J(Q) - P J(qQ)` acts as `1 - P q^d` on coefficients in
//! `K(CP^n) = Q(q)[x]/(x^{n+1})`, `x = 1 - P`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;
use crate::report::{CheckReport, ReportBuilder, VerifiedThrough};
use crate::scalar::Scalar;
use crate::series::{MultiSeries, Truncation};

/// Where the coefficients of a [`QSeries`] live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QTarget {
    Scalar,
    /// `K(CP^n)` in the basis `1, x, ..., x^n`.
    KValued { n: u32 },
}

/// `sum_d S_d Q^d` with `S_0 = 1`. Each coefficient is a vector of
/// components: one for a scalar target, `n + 1` for a K-valued one.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    target: QTarget,
    coeffs: Vec<Vec<RationalFunction>>,
}

type RingElt = MultiSeries<RationalFunction>;

fn ring_trunc(n: u32) -> Truncation {
    Truncation::t_only(n as usize)
}

fn to_ring(n: u32, comps: &[RationalFunction]) -> RingElt {
    let mut e = MultiSeries::zero(1, ring_trunc(n));
    for (i, c) in comps.iter().enumerate() {
        e.add_term(vec![i as u32], c.clone());
    }
    e
}

fn from_ring(n: u32, e: &RingElt) -> Vec<RationalFunction> {
    (0..=n).map(|i| e.coeff(&[i])).collect()
}

impl QSeries {
    pub fn new(target: QTarget, coeffs: Vec<Vec<RationalFunction>>) -> Result<Self> {
        let width = match target {
            QTarget::Scalar => 1,
            QTarget::KValued { n } => n as usize + 1,
        };
        if coeffs.is_empty() {
            return Err(Error::Invalid("a q-series needs at least S_0".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.len() != width) {
            return Err(Error::Length {
                expected: width,
                found: bad.len(),
            });
        }
        let unit: Vec<RationalFunction> = (0..width)
            .map(|i| if i == 0 { RationalFunction::one() } else { RationalFunction::zero() })
            .collect();
        if coeffs[0] != unit {
            return Err(Error::Invalid("S_0 must be 1".into()));
        }
        Ok(Self { target, coeffs })
    }

    pub fn scalar(coeffs: Vec<RationalFunction>) -> Result<Self> {
        Self::new(QTarget::Scalar, coeffs.into_iter().map(|c| vec![c]).collect())
    }

    pub fn target(&self) -> QTarget {
        self.target
    }

    pub fn dmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Components of `S_d`.
    pub fn coeff(&self, d: usize) -> &[RationalFunction] {
        &self.coeffs[d]
    }

    /// `S_d` for a scalar target.
    pub fn scalar_coeff(&self, d: usize) -> Result<&RationalFunction> {
        match self.target {
            QTarget::Scalar => Ok(&self.coeffs[d][0]),
            QTarget::KValued { .. } => Err(Error::Domain {
                expected: "scalar q-series".into(),
                found: "K-valued q-series".into(),
            }),
        }
    }

    /// Replace `S_d` without re-checking the unit normalization.
    pub fn with_coeff(&self, d: usize, comps: Vec<RationalFunction>) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        if comps.len() != coeffs[d].len() {
            return Err(Error::Length {
                expected: coeffs[d].len(),
                found: comps.len(),
            });
        }
        coeffs[d] = comps;
        Self::new(self.target, coeffs)
    }

    /// Coefficients in exact text form, one row per power of `Q`.
    pub fn to_text_rows(&self) -> Vec<Vec<String>> {
        self.coeffs
            .iter()
            .map(|c| c.iter().map(Scalar::to_text).collect())
            .collect()
    }
}

fn require_scalar(s: &QSeries) -> Result<()> {
    s.scalar_coeff(0).map(|_| ())
}

fn require_k(s: &QSeries) -> Result<u32> {
    match s.target {
        QTarget::KValued { n } => Ok(n),
        QTarget::Scalar => Err(Error::Domain {
            expected: "K-valued q-series".into(),
            found: "scalar q-series".into(),
        }),
    }
}

/// `(D S)_d = S_d (1 - q^d)`; the result has a zero constant term, so it
/// is returned as plain coefficients rather than a normalized [`QSeries`].
pub fn apply_d(s: &QSeries) -> Result<Vec<RationalFunction>> {
    require_scalar(s)?;
    Ok(s.coeffs
        .iter()
        .enumerate()
        .map(|(d, c)| c[0].clone() * &RationalFunction::one_minus_q_pow(d))
        .collect())
}

/// `1 - P q^d = (1 - q^d) + q^d x` in `Q(q)[x]/(x^{n+1})`.
fn one_minus_p_q_pow(n: u32, d: usize) -> RingElt {
    let qd = RationalFunction::q().pow(d as i32);
    to_ring(n, &[RationalFunction::one_minus_q_pow(d), qd])
}

/// `(D_P J)_d = J_d (1 - P q^d)`, componentwise in `K(CP^n)`.
pub fn apply_d_twisted(j: &QSeries) -> Result<Vec<Vec<RationalFunction>>> {
    let n = require_k(j)?;
    Ok(j.coeffs
        .iter()
        .enumerate()
        .map(|(d, c)| from_ring(n, &(&to_ring(n, c) * &one_minus_p_q_pow(n, d))))
        .collect())
}

/// `S_d = prod_{m <= d} (1 - q^m)^{-(n+1)}`, from `S_d (1 - q^d)^{n+1} = S_{d-1}`.
pub fn scalar_solution(n: u32, dmax: usize) -> QSeries {
    let mut coeffs = vec![RationalFunction::one()];
    for d in 1..=dmax {
        let step = RationalFunction::one_minus_q_pow(d).pow(-(n as i32 + 1));
        coeffs.push(coeffs[d - 1].clone() * &step);
    }
    QSeries::scalar(coeffs).expect("S_0 = 1")
}

fn through(dmax: usize) -> VerifiedThrough {
    VerifiedThrough {
        t_order: 0,
        q_caps: vec![dmax],
    }
}

/// `S_d (1 - q^d)^{n+1} = S_{d-1}` for `1 <= d <= dmax`, as exact rational functions.
pub fn verify_qde(n: u32, s: &QSeries) -> Result<CheckReport> {
    require_scalar(s)?;
    let mut rep = ReportBuilder::new("qde", through(s.dmax()));
    for d in 1..=s.dmax() {
        let lhs = s.coeffs[d][0].clone() * &RationalFunction::one_minus_q_pow(d).pow(n as i32 + 1);
        rep.expect_eq(vec![d], &lhs, &s.coeffs[d - 1][0]);
    }
    Ok(rep.finish())
}

/// `J_d = prod_{m <= d} (1 - P q^m)^{-(n+1)}` in `K(CP^n)`.
pub fn twisted_solution(n: u32, dmax: usize) -> QSeries {
    let mut coeffs = vec![from_ring(n, &MultiSeries::one(1, ring_trunc(n)))];
    for d in 1..=dmax {
        let step = one_minus_p_q_pow(n, d)
            .invert()
            .expect("constant term 1 - q^d is nonzero")
            .pow(n + 1);
        let prev = to_ring(n, &coeffs[d - 1]);
        coeffs.push(from_ring(n, &(&prev * &step)));
    }
    QSeries::new(QTarget::KValued { n }, coeffs).expect("J_0 = 1")
}

/// `J_d (1 - P q^d)^{n+1} = J_{d-1}` in the ring, for `1 <= d <= dmax`.
pub fn verify_twisted_qde(n: u32, j: &QSeries) -> Result<CheckReport> {
    let jn = require_k(j)?;
    if jn != n {
        return Err(Error::Arity(format!("K(CP^{jn})-valued series checked against n = {n}")));
    }
    let mut rep = ReportBuilder::new("twisted_qde", through(j.dmax()));
    for d in 1..=j.dmax() {
        let lhs = from_ring(n, &(&to_ring(n, &j.coeffs[d]) * &one_minus_p_q_pow(n, d).pow(n + 1)));
        if lhs != j.coeffs[d - 1] {
            rep.witness(vec![d], render_k_element(&lhs), render_k_element(&j.coeffs[d - 1]));
        }
    }
    Ok(rep.finish())
}

/// Set `P = 1`, i.e. `x = 0`: keep the `x^0` component.
pub fn specialize_p_one(j: &QSeries) -> Result<QSeries> {
    require_k(j)?;
    QSeries::scalar(j.coeffs.iter().map(|c| c[0].clone()).collect())
}

/// Scalar and twisted solutions agree after `P -> 1`, for `d <= dmax`.
pub fn check_specialization(n: u32, dmax: usize) -> Result<CheckReport> {
    let scalar = scalar_solution(n, dmax);
    let twisted = specialize_p_one(&twisted_solution(n, dmax))?;
    let mut rep = ReportBuilder::new("qde_specialization", through(dmax));
    for d in 0..=dmax {
        rep.expect_eq(vec![d], &twisted.coeffs[d][0], &scalar.coeffs[d][0]);
    }
    Ok(rep.finish())
}

/// The denominator of each `S_d` divides `prod_{m <= d} (1 - q^m)^{n+1}`.
pub fn check_denominators(n: u32, s: &QSeries) -> Result<CheckReport> {
    require_scalar(s)?;
    let mut rep = ReportBuilder::new("qde_denominators", through(s.dmax()));
    let mut bound = RationalFunction::one();
    for d in 0..=s.dmax() {
        if d > 0 {
            bound = bound * &RationalFunction::one_minus_q_pow(d).pow(n as i32 + 1);
        }
        let cleared = s.coeffs[d][0].clone() * &bound;
        if !cleared.denominator().is_one() {
            rep.witness(vec![d], cleared.denominator(), 1);
        }
    }
    Ok(rep.finish())
}

/// Renders `sum c_i x^i` with each `c_i` parenthesized.
pub fn render_k_element(comps: &[RationalFunction]) -> String {
    let terms: Vec<String> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("({c})"),
            1 => format!("({c})*x"),
            _ => format!("({c})*x^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
