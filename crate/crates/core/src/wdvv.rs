//! Verification suites. Each check returns a [`CheckReport`] whose
//! witnesses carry both sides exactly.
//!
//! Checks that test several identities at once tag each witness with a
//! leading index naming the identity; the tags are listed on the check.

use crate::engine::{
    christoffel, curvature, metric, quantum_product, symmetry_residuals, third_derivs, wdvv_tensor,
    ConnectionForm, ProductOperators, SeriesTensor, Tensor3,
};
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::matrix::SeriesMatrix;
use crate::potential::Potential;
use crate::ratfun::RationalFunction;
use crate::report::{CheckReport, ReportBuilder, VerifiedThrough};
use crate::scalar::{rat, Rational, Scalar};
use crate::series::{MultiSeries, Truncation};
use crate::RatSeries;

fn through(t: &Truncation) -> VerifiedThrough {
    VerifiedThrough::from(t)
}

/// Records every non-sorted tuple whose entry differs from the sorted one.
fn symmetry_report<S: Scalar>(name: &str, t: &SeriesTensor<S>) -> CheckReport {
    let trunc = t.truncation().expect("non-empty tensor");
    let mut rep = ReportBuilder::new(name, through(&trunc));
    for (idx, res) in symmetry_residuals(t) {
        if !res.is_zero() {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            rep.witness(idx.clone(), t.get(&idx), t.get(&sorted));
        }
    }
    rep.finish()
}

/// Total symmetry of `T_{abcd} = sum G_{abe} G^{ee'} G_{e'cd}`.
pub fn check_total_symmetry(pot: impl AsRef<RatSeries>) -> Result<CheckReport> {
    let g = pot.as_ref();
    let third = third_derivs(g)?;
    let m = metric(g)?;
    Ok(symmetry_report("total_symmetry", &wdvv_tensor(&third, &m.upper)))
}

fn constant_matrix(m: &DenseMatrix<Rational>, n_t: usize, trunc: &Truncation) -> SeriesMatrix<Rational> {
    SeriesMatrix::from_dense(m, n_t, trunc)
}

/// Total symmetry of `sum F_{abe} g^{ee'} F_{e'cd}` with constant `g`.
pub fn check_classical_wdvv(f: impl AsRef<RatSeries>, g: &DenseMatrix<Rational>) -> Result<CheckReport> {
    let f = f.as_ref();
    let ginv = linalg::inverse(g)?;
    let third = third_derivs(f)?;
    let trunc = third.truncation().expect("non-empty tensor");
    let upper = constant_matrix(&ginv, f.n_t(), &trunc);
    Ok(symmetry_report("classical_wdvv", &wdvv_tensor(&third, &upper)))
}

/// `sum F_{abe} (g + F_..)^{ee'} F_{e'cd}` against the truncated Neumann
/// expansion `sum_{m <= depth} (-1)^m F_{ab.} (g^-1 F_..)^m g^-1 F_{.cd}`.
pub fn check_matrix_identity(g: &DenseMatrix<Rational>, f: impl AsRef<RatSeries>, depth: usize) -> Result<CheckReport> {
    let f = f.as_ref();
    if f.min_t_degree().is_some_and(|d| d < 3) {
        return Err(Error::Invalid("F must have t-degree >= 3".into()));
    }
    let ginv = linalg::inverse(g)?;
    let r = f.n_t();
    let third = third_derivs(f)?;
    let first: Vec<RatSeries> = (0..r).map(|a| f.partial(a)).collect::<Result<_>>()?;
    let f2 = SeriesMatrix::from_fn(r, |a, b| first[a].partial(b).expect("t-variable"));
    let trunc2 = f2.truncation().expect("rank >= 1");

    let big = constant_matrix(g, r, &trunc2).try_add(&f2)?;
    let lhs = wdvv_tensor(&third, &big.inverse()?);

    let m = constant_matrix(&ginv, r, &trunc2);
    let x = m.try_mul(&f2)?;
    let mut power = SeriesMatrix::identity(r, r, &trunc2);
    let mut sum = m.clone();
    for k in 1..=depth {
        power = power.try_mul(&x)?;
        let term = power.try_mul(&m)?;
        sum = if k % 2 == 1 { sum.try_sub(&term)? } else { sum.try_add(&term)? };
    }
    let rhs = wdvv_tensor(&third, &sum);

    let trunc = lhs.truncation().expect("non-empty").meet(&rhs.truncation().expect("non-empty"));
    let mut rep = ReportBuilder::new("matrix_identity", through(&trunc));
    for idx in lhs.indices() {
        let (l, rr) = (lhs.get(&idx).truncate(&trunc), rhs.get(&idx).truncate(&trunc));
        if l != rr {
            rep.witness(idx, l, rr);
        }
    }
    Ok(rep.finish())
}

fn ops_truncation<S: Scalar>(ops: &ProductOperators<S>) -> Truncation {
    ops.ops
        .iter()
        .filter_map(SeriesMatrix::truncation)
        .reduce(|a, b| a.meet(&b))
        .expect("rank >= 1")
}

/// Product `sum_e (A_a)_b^e (A_e)_c^f`, i.e. the components of `(a*b)*c`.
fn triple_product<S: Scalar>(ops: &ProductOperators<S>, a: usize, b: usize, c: usize, f: usize) -> MultiSeries<S> {
    let r = ops.rank();
    let mut acc = ops.get(a).get(b, 0) * ops.get(0).get(c, f);
    for e in 1..r {
        acc = &acc + &(ops.get(a).get(b, e) * ops.get(e).get(c, f));
    }
    acc
}

/// Frobenius algebra axioms of the quantum product. Witness tags:
/// 0 commutativity, 1 associativity, 2 unit, 3 Frobenius compatibility,
/// 4 classical limit at `t = 0, Q = 0`.
pub fn check_frobenius(pot: &Potential) -> Result<CheckReport> {
    let g = pot.series();
    let r = pot.rank();
    let ops = quantum_product(g)?;
    let third = third_derivs(g)?;
    let m = metric(g)?;
    let trunc = ops_truncation(&ops);
    let mut rep = ReportBuilder::new("frobenius", through(&trunc));

    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                rep.expect_eq(vec![0, a, b, c], ops.get(a).get(b, c), ops.get(b).get(a, c));
                for f in 0..r {
                    let left = triple_product(&ops, a, b, c, f);
                    let right = triple_product(&ops, b, c, a, f);
                    rep.expect_eq(vec![1, a, b, c, f], &left, &right);
                }
                // (a*b, c) against (a, b*c)
                let mut left = MultiSeries::zero(g.n_t(), trunc.clone());
                let mut right = MultiSeries::zero(g.n_t(), trunc.clone());
                for e in 0..r {
                    left = &left + &(ops.get(a).get(b, e) * m.lower.get(e, c));
                    right = &right + &(m.lower.get(a, e) * ops.get(b).get(c, e));
                }
                rep.expect_eq(vec![3, a, b, c], &left.truncate(&trunc), &right.truncate(&trunc));
            }
            let unit = third.get(&[a, 0, b]);
            let lower = m.lower.get(a, b).truncate(unit.truncation());
            rep.expect_eq(vec![2, a, b], unit, &lower);
            for c in 0..r {
                let at_zero = ops.get(a).get(b, c).at_q_zero().constant_term();
                let sc = pot.ring().structure_constant(a, b, c);
                rep.expect_eq(vec![4, a, b, c], &at_zero, sc);
            }
        }
    }
    Ok(rep.finish())
}

/// The two conditions that make `(1 - q) d - sum A_a dt_a` flat for every
/// `q != 1`. Witness tags: 0 for `d_a A_b = d_b A_a`, 1 for `[A_a, A_b] = 0`.
pub fn check_connection_flat(pot: impl AsRef<RatSeries>) -> Result<CheckReport> {
    let g = pot.as_ref();
    let ops = quantum_product(g)?;
    let r = ops.rank();
    let base = ops_truncation(&ops);
    if base.t_order == 0 {
        return Err(Error::TruncationTooSmall {
            needed: 4,
            have: g.t_order(),
        });
    }
    let trunc = base.with_t_order(base.t_order - 1);
    let mut rep = ReportBuilder::new("connection_flat", through(&trunc));
    for a in 0..r {
        for b in (a + 1)..r {
            for i in 0..r {
                for j in 0..r {
                    let dab = ops.get(b).get(i, j).partial(a)?;
                    let dba = ops.get(a).get(i, j).partial(b)?;
                    rep.expect_eq(vec![0, a, b, i, j], &dab, &dba);
                }
            }
            let ab = ops.get(a).try_mul(ops.get(b))?;
            let ba = ops.get(b).try_mul(ops.get(a))?;
            for i in 0..r {
                for j in 0..r {
                    rep.expect_eq(vec![1, a, b, i, j], ab.get(i, j), ba.get(i, j));
                }
            }
        }
    }
    Ok(rep.finish())
}

/// `2 Gamma_{ab}^c` from the metric derivatives against `(A_b)_a^c`.
pub fn compare_levi_civita(levi_civita: &Tensor3<Rational>, ops: &ProductOperators<Rational>) -> CheckReport {
    let trunc = levi_civita.truncation().expect("non-empty").meet(&ops_truncation(ops));
    let mut rep = ReportBuilder::new("levi_civita", through(&trunc));
    for idx in levi_civita.indices() {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let twice = levi_civita.get(&idx).scale(&rat(2)).truncate(&trunc);
        let prod = ops.get(b).get(a, c).truncate(&trunc);
        rep.expect_eq(idx, &twice, &prod);
    }
    rep.finish()
}

pub fn check_levi_civita(pot: impl AsRef<RatSeries>) -> Result<CheckReport> {
    let g = pot.as_ref();
    let gamma = christoffel(g)?;
    let ops = quantum_product(g)?;
    Ok(compare_levi_civita(&gamma.levi_civita, &ops))
}

/// Vanishing of the Riemann tensor of `Gamma = 1/2 G_{..e} G^{e.}`.
pub fn check_metric_flat(pot: impl AsRef<RatSeries>) -> Result<CheckReport> {
    let g = pot.as_ref();
    if g.t_order() < 5 {
        return Err(Error::TruncationTooSmall {
            needed: 5,
            have: g.t_order(),
        });
    }
    let riemann = curvature(g)?;
    let trunc = riemann.truncation().expect("non-empty");
    let mut rep = ReportBuilder::new("metric_flat", through(&trunc));
    for idx in riemann.indices() {
        let entry = riemann.get(&idx);
        if !entry.is_zero() {
            rep.witness(idx, entry, 0);
        }
    }
    Ok(rep.finish())
}

/// Residual of `(1 - q) d_a S = A_a S` for every direction `a`, with
/// `q` kept symbolic.
pub fn check_s_matrix_pde(pot: impl AsRef<RatSeries>, s: &SeriesMatrix<RationalFunction>) -> Result<CheckReport> {
    let g = pot.as_ref();
    let r = g.n_t();
    if s.dim() != r {
        return Err(Error::Length {
            expected: r,
            found: s.dim(),
        });
    }
    let products = quantum_product(g)?.map_scalar(|c| RationalFunction::constant(c.clone()));
    let conn = ConnectionForm {
        one_minus_q: RationalFunction::one_minus_q_pow(1),
        products,
    };
    let mut residuals = Vec::with_capacity(r);
    for a in 0..r {
        residuals.push(conn.apply(a, s)?);
    }
    let trunc = residuals
        .iter()
        .filter_map(SeriesMatrix::truncation)
        .reduce(|x, y| x.meet(&y))
        .expect("rank >= 1");
    let mut rep = ReportBuilder::new("s_matrix_pde", through(&trunc));
    for (a, res) in residuals.iter().enumerate() {
        for i in 0..r {
            for j in 0..r {
                let entry = res.get(i, j);
                if !entry.is_zero() {
                    let lhs = s.get(i, j).partial(a)?.scale(&conn.one_minus_q);
                    let rhs = lhs_minus(&lhs, entry);
                    rep.witness(vec![a, i, j], lhs, rhs);
                }
            }
        }
    }
    Ok(rep.finish())
}

fn lhs_minus(lhs: &MultiSeries<RationalFunction>, residual: &MultiSeries<RationalFunction>) -> MultiSeries<RationalFunction> {
    let trunc = lhs.truncation().meet(residual.truncation());
    &lhs.truncate(&trunc) - &residual.truncate(&trunc)
}

/// The derivative form of the `e^tau` translation law: `d_0 G_{abc} = G_{abc}`.
pub fn check_unit_translation(pot: impl AsRef<RatSeries>) -> Result<CheckReport> {
    let g = pot.as_ref();
    if g.t_order() < 4 {
        return Err(Error::TruncationTooSmall {
            needed: 4,
            have: g.t_order(),
        });
    }
    let third = third_derivs(g)?;
    let trunc = third.truncation().expect("non-empty");
    let trunc = trunc.with_t_order(trunc.t_order - 1);
    let mut rep = ReportBuilder::new("unit_translation", through(&trunc));
    for idx in third.indices() {
        if idx.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let d0 = third.get(&idx).partial(0)?;
        let same = third.get(&idx).truncate(&trunc);
        rep.expect_eq(idx, &d0, &same);
    }
    Ok(rep.finish())
}

/// Every check that applies to a K-theoretic potential, in a fixed order.
pub fn k_theory_suite(pot: &Potential) -> Result<Vec<CheckReport>> {
    let mut out = vec![check_total_symmetry(pot)?];
    out.extend(corollary_suite(pot)?);
    out.push(check_unit_translation(pot)?);
    Ok(out)
}

/// Frobenius, connection flatness, Levi-Civita and metric flatness.
pub fn corollary_suite(pot: &Potential) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_frobenius(pot)?,
        check_connection_flat(pot)?,
        check_levi_civita(pot)?,
        check_metric_flat(pot)?,
    ])
}

/// True iff every report passes.
pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
