//! Derivative tensors, metric, quantum product, Christoffel symbols,
//! curvature and the `q`-connection of a potential.
//!
//! Every routine is generic over the scalar domain and accepts anything
//! that exposes the potential's series (`&Potential`, `&MultiSeries<S>`).
//! Reliability is carried by the series truncations: a third derivative
//! of an order-`N` potential is reliable through `N - 3`, and so on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::ratfun::RationalFunction;
use crate::scalar::{Rational, Scalar};
use crate::series::{MultiSeries, Truncation};
use num_traits::One;

impl<S: Scalar> AsRef<MultiSeries<S>> for MultiSeries<S> {
    fn as_ref(&self) -> &MultiSeries<S> {
        self
    }
}

/// Dense `r^K` array of series, row-major in its indices.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SeriesTensor<S: Scalar> {
    rank: usize,
    arity: usize,
    entries: Vec<MultiSeries<S>>,
}

pub type Tensor3<S> = SeriesTensor<S>;
pub type Tensor4<S> = SeriesTensor<S>;

impl<S: Scalar> SeriesTensor<S> {
    pub fn from_fn(rank: usize, arity: usize, mut f: impl FnMut(&[usize]) -> MultiSeries<S>) -> Self {
        let entries = (0..rank.pow(arity as u32))
            .map(|flat| f(&unflatten(flat, rank, arity)))
            .collect();
        Self { rank, arity, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, idx: &[usize]) -> &MultiSeries<S> {
        debug_assert_eq!(idx.len(), self.arity);
        let flat = idx.iter().fold(0, |acc, &i| acc * self.rank + i);
        &self.entries[flat]
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.entries.len()).map(|flat| unflatten(flat, self.rank, self.arity))
    }

    pub fn truncation(&self) -> Option<Truncation> {
        let mut it = self.entries.iter();
        let first = it.next()?.truncation().clone();
        Some(it.fold(first, |acc, e| acc.meet(e.truncation())))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiSeries::is_zero)
    }
}

impl<S: Scalar> std::fmt::Debug for SeriesTensor<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.indices().zip(self.entries.iter()))
            .finish()
    }
}

fn unflatten(mut flat: usize, rank: usize, arity: usize) -> Vec<usize> {
    let mut idx = vec![0; arity];
    for slot in idx.iter_mut().rev() {
        *slot = flat % rank;
        flat /= rank;
    }
    idx
}

fn rank_of<S: Scalar>(g: &MultiSeries<S>) -> usize {
    g.n_t()
}

fn require_order<S: Scalar>(g: &MultiSeries<S>, needed: usize) -> Result<()> {
    if g.t_order() < needed {
        return Err(Error::TruncationTooSmall {
            needed,
            have: g.t_order(),
        });
    }
    Ok(())
}

/// `G_{abc}`, reliable through `t_order - 3`.
pub fn third_derivs<S: Scalar>(pot: impl AsRef<MultiSeries<S>>) -> Result<Tensor3<S>> {
    let g = pot.as_ref();
    require_order(g, 3)?;
    let r = rank_of(g);
    let first: Vec<MultiSeries<S>> = (0..r).map(|a| g.partial(a)).collect::<Result<_>>()?;
    let mut second: Vec<Vec<Option<MultiSeries<S>>>> = vec![vec![None; r]; r];
    for a in 0..r {
        for b in a..r {
            second[a][b] = Some(first[a].partial(b)?);
        }
    }
    let mut cache = std::collections::HashMap::new();
    for a in 0..r {
        for b in a..r {
            for c in b..r {
                let d2 = second[a][b].as_ref().expect("filled");
                cache.insert((a, b, c), d2.partial(c)?);
            }
        }
    }
    Ok(SeriesTensor::from_fn(r, 3, |idx| {
        let mut s = [idx[0], idx[1], idx[2]];
        s.sort_unstable();
        cache[&(s[0], s[1], s[2])].clone()
    }))
}

/// `(G_ab, G^ab)`: the second-derivative matrix and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S: Scalar> {
    pub lower: SeriesMatrix<S>,
    pub upper: SeriesMatrix<S>,
}

pub fn metric<S: Scalar>(pot: impl AsRef<MultiSeries<S>>) -> Result<Metric<S>> {
    let g = pot.as_ref();
    require_order(g, 2)?;
    let r = rank_of(g);
    let first: Vec<MultiSeries<S>> = (0..r).map(|a| g.partial(a)).collect::<Result<_>>()?;
    let mut entries = vec![];
    for a in 0..r {
        let mut row = vec![];
        for b in 0..r {
            row.push(first[a].partial(b)?);
        }
        entries.push(row);
    }
    let lower = SeriesMatrix::from_rows(entries)?;
    let upper = lower.inverse()?;
    Ok(Metric { lower, upper })
}

/// Operators `A_a = (phi_a *)`: `ops[a]` has entry `[b][c]` equal to the
/// coefficient of `phi_c` in `phi_a * phi_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperators<S: Scalar> {
    pub ops: Vec<SeriesMatrix<S>>,
}

impl<S: Scalar> ProductOperators<S> {
    pub fn get(&self, a: usize) -> &SeriesMatrix<S> {
        &self.ops[a]
    }

    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> ProductOperators<T> {
        ProductOperators {
            ops: self.ops.iter().map(|m| m.map_scalar(f)).collect(),
        }
    }
}

/// `(A_a)_b^c = sum_e G_{abe} G^{ec}` from precomputed pieces.
pub fn product_from_parts<S: Scalar>(third: &Tensor3<S>, upper: &SeriesMatrix<S>) -> ProductOperators<S> {
    let r = third.rank();
    let ops = (0..r)
        .map(|a| {
            SeriesMatrix::from_fn(r, |b, c| {
                let mut acc = third.get(&[a, b, 0]) * upper.get(0, c);
                for e in 1..r {
                    acc = &acc + &(third.get(&[a, b, e]) * upper.get(e, c));
                }
                acc
            })
        })
        .collect();
    ProductOperators { ops }
}

pub fn quantum_product<S: Scalar>(pot: impl AsRef<MultiSeries<S>>) -> Result<ProductOperators<S>> {
    let g = pot.as_ref();
    let third = third_derivs(g)?;
    let m = metric(g)?;
    Ok(product_from_parts(&third, &m.upper))
}

/// `T_{abcd} = sum G_{abe} G^{ee'} G_{e'cd}`, the tensor whose total
/// symmetry is the associativity equation.
pub fn wdvv_tensor<S: Scalar>(third: &Tensor3<S>, upper: &SeriesMatrix<S>) -> Tensor4<S> {
    let ops = product_from_parts(third, upper);
    let r = third.rank();
    SeriesTensor::from_fn(r, 4, |i| {
        let a = ops.get(i[0]);
        let mut acc = a.get(i[1], 0) * third.get(&[0, i[2], i[3]]);
        for e in 1..r {
            acc = &acc + &(a.get(i[1], e) * third.get(&[e, i[2], i[3]]));
        }
        acc
    })
}

/// `T[idx] - T[sorted idx]` for every index tuple that is not already sorted.
pub fn symmetry_residuals<S: Scalar>(t: &SeriesTensor<S>) -> Vec<(Vec<usize>, MultiSeries<S>)> {
    t.indices()
        .filter_map(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            (sorted != idx).then(|| {
                let diff = t.get(&idx) - t.get(&sorted);
                (idx, diff)
            })
        })
        .collect()
}

/// Christoffel symbols `Gamma_{ab}^c`, stored as `[a][b][c]`, by two routes.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<S: Scalar> {
    /// `1/2 G_{abe} G^{ec}`.
    pub from_third: Tensor3<S>,
    /// `1/2 (d_b G_{ae} + d_a G_{be} - d_e G_{ab}) G^{ec}`.
    pub levi_civita: Tensor3<S>,
}

pub fn christoffel<S: Scalar>(pot: impl AsRef<MultiSeries<S>>) -> Result<Christoffel<S>> {
    let g = pot.as_ref();
    let third = third_derivs(g)?;
    let m = metric(g)?;
    let r = rank_of(g);
    let half = S::from_rational(&Rational::new(1.into(), 2.into()));
    let ops = product_from_parts(&third, &m.upper);
    let from_third = SeriesTensor::from_fn(r, 3, |i| ops.get(i[0]).get(i[1], i[2]).scale(&half));

    // metric derivatives d_c G_{ab}
    let mut dmetric = vec![];
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                dmetric.push(m.lower.get(a, b).partial(c)?);
            }
        }
    }
    let dg = |a: usize, b: usize, c: usize| &dmetric[(a * r + b) * r + c];
    let levi_civita = SeriesTensor::from_fn(r, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let mut acc = MultiSeries::zero(g.n_t(), dg(0, 0, 0).truncation().clone());
        for e in 0..r {
            let bracket = &(dg(a, e, b) + dg(b, e, a)) - dg(a, b, e);
            acc = &acc + &(&bracket * m.upper.get(e, c));
        }
        acc.scale(&half)
    });
    Ok(Christoffel {
        from_third,
        levi_civita,
    })
}

/// Riemann tensor `R^d_{abc}` stored as `[a][b][c][d]`, built from the
/// `1/2 G_{..e} G^{e.}` Christoffel symbols; reliable through `t_order - 4`.
pub fn curvature<S: Scalar>(pot: impl AsRef<MultiSeries<S>>) -> Result<Tensor4<S>> {
    let g = pot.as_ref();
    require_order(g, 4)?;
    let gamma = christoffel(g)?.from_third;
    curvature_of(&gamma)
}

/// Riemann tensor of a given set of Christoffel symbols `[a][b][c] = Gamma_{ab}^c`.
pub fn curvature_of<S: Scalar>(gamma: &Tensor3<S>) -> Result<Tensor4<S>> {
    let r = gamma.rank();
    let mut dgamma = vec![];
    for idx in gamma.indices() {
        for v in 0..r {
            dgamma.push(gamma.get(&idx).partial(v)?);
        }
    }
    // d_v Gamma_{ab}^c
    let dg = |v: usize, a: usize, b: usize, c: usize| &dgamma[((a * r + b) * r + c) * r + v];
    Ok(SeriesTensor::from_fn(r, 4, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut acc = dg(a, b, c, d) - dg(b, a, c, d);
        for e in 0..r {
            acc = &acc + &(gamma.get(&[a, e, d]) * gamma.get(&[b, c, e]));
            acc = &acc - &(gamma.get(&[b, e, d]) * gamma.get(&[a, c, e]));
        }
        acc
    }))
}

/// Value of `q` in the connection `(1 - q) d - sum_a A_a dt_a`.
#[derive(Clone, Debug, PartialEq)]
pub enum QValue {
    Symbolic,
    Numeric(Rational),
}

/// The connection `nabla_q` as per-direction data over rational functions of `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    pub one_minus_q: RationalFunction,
    pub products: ProductOperators<RationalFunction>,
}

impl ConnectionForm {
    /// `(1 - q) d_a S - A_a S` for a matrix of sections `S`.
    pub fn apply(&self, a: usize, section: &SeriesMatrix<RationalFunction>) -> Result<SeriesMatrix<RationalFunction>> {
        let deriv = section.map(|e| e.partial(a).expect("t-variable within rank"));
        let lhs = deriv.scale(&self.one_minus_q);
        lhs.try_sub(&self.products.get(a).try_mul(section)?)
    }
}

pub fn connection_matrices(pot: impl AsRef<MultiSeries<Rational>>, q: QValue) -> Result<ConnectionForm> {
    let q = match q {
        QValue::Symbolic => RationalFunction::q(),
        QValue::Numeric(v) => {
            if v == Rational::from_integer(1.into()) {
                return Err(Error::Invalid("the connection is only defined for q != 1".into()));
            }
            RationalFunction::constant(v)
        }
    };
    let products = quantum_product(pot)?.map_scalar(|c| RationalFunction::constant(c.clone()));
    Ok(ConnectionForm {
        one_minus_q: RationalFunction::constant(Rational::one()) - q,
        products,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{classical_k_potential, cp2_potential, pt_potential};
    use crate::ring::{h_ring_cpn, k_ring_cpn};
    use crate::scalar::{rat, ratio};
    use crate::series::exp_tail;

    #[test]
    fn point_derivatives_are_exponential() {
        let p = pt_potential(8).unwrap();
        let t3 = third_derivs(&p).unwrap();
        let e5 = exp_tail::<Rational>(1, Truncation::t_only(5), 0, 0);
        assert_eq!(t3.get(&[0, 0, 0]), &e5);
        let m = metric(&p).unwrap();
        let e6 = exp_tail::<Rational>(1, Truncation::t_only(6), 0, 0);
        assert_eq!(m.lower.get(0, 0), &e6);
        assert_eq!(m.upper.get(0, 0), &e6.invert().unwrap());
        let a = quantum_product(&p).unwrap();
        assert_eq!(a.get(0).get(0, 0), &MultiSeries::one(1, Truncation::t_only(5)));
        let gamma = christoffel(&p).unwrap();
        assert_eq!(gamma.from_third.get(&[0, 0, 0]), &MultiSeries::constant(1, Truncation::t_only(5), ratio(1, 2)));
        assert!(curvature(&p).unwrap().is_zero());
    }

    #[test]
    fn cp2_triple_intersection() {
        let p = cp2_potential(6, 1).unwrap();
        let t3 = third_derivs(&p).unwrap();
        assert_eq!(t3.get(&[0, 1, 2]).constant_term(), rat(0));
        assert_eq!(t3.get(&[0, 0, 2]).constant_term(), rat(1));
        assert_eq!(t3.get(&[0, 1, 1]).constant_term(), rat(1));
        for perm in [[0, 2, 0], [2, 0, 0]] {
            assert_eq!(t3.get(&perm), t3.get(&[0, 0, 2]));
        }
    }

    #[test]
    fn classical_metric_at_origin() {
        let ring = k_ring_cpn(2);
        let p = classical_k_potential(&ring, 5).unwrap();
        let m = metric(&p).unwrap();
        assert_eq!(&m.lower.constant_part(), ring.pairing());
        assert_eq!(m.upper.constant_part(), crate::linalg::inverse(ring.pairing()).unwrap());
    }

    #[test]
    fn cohomological_metric_is_g_plus_f2() {
        let p = cp2_potential(6, 2).unwrap();
        let m = metric(&p).unwrap();
        let f = p.correction();
        for a in 0..3 {
            for b in 0..3 {
                let f2 = f.partial(a).unwrap().partial(b).unwrap();
                let g = MultiSeries::constant(3, f2.truncation().clone(), h_ring_cpn(2).pairing()[a][b].clone());
                assert_eq!(m.lower.get(a, b), &(&g + &f2));
            }
        }
    }

    #[test]
    fn classical_product_is_ring_multiplication() {
        let ring = k_ring_cpn(1);
        let p = classical_k_potential(&ring, 6).unwrap();
        let a = quantum_product(&p).unwrap();
        let trunc = a.get(1).truncation().unwrap();
        let expected = SeriesMatrix::from_dense(&ring.mult_matrix(1), 2, &trunc);
        assert_eq!(a.get(1), &expected);
        assert_eq!(a.get(0), &SeriesMatrix::identity(2, 2, &trunc));
    }

    #[test]
    fn christoffel_routes_agree() {
        let p = classical_k_potential(&k_ring_cpn(2), 5).unwrap();
        let c = christoffel(&p).unwrap();
        for idx in c.from_third.indices() {
            assert!(c.from_third.get(&idx).agrees_with(c.levi_civita.get(&idx)));
            let swapped = [idx[1], idx[0], idx[2]];
            assert_eq!(c.from_third.get(&idx), c.from_third.get(&swapped));
        }
    }

    #[test]
    fn connection_at_special_q() {
        let p = classical_k_potential(&k_ring_cpn(1), 5).unwrap();
        assert!(connection_matrices(&p, QValue::Numeric(rat(1))).is_err());
        let sym = connection_matrices(&p, QValue::Symbolic).unwrap();
        assert_eq!(sym.one_minus_q, RationalFunction::one_minus_q_pow(1));
        let zero = connection_matrices(&p, QValue::Numeric(rat(0))).unwrap();
        assert!(zero.one_minus_q.is_one());
        let minus_one = connection_matrices(&p, QValue::Numeric(rat(-1))).unwrap();
        assert_eq!(minus_one.one_minus_q, RationalFunction::constant(rat(2)));
        // A_b = 2 Gamma_{.b}^.
        let gamma = christoffel(&p).unwrap();
        for b in 0..2 {
            for a in 0..2 {
                for c in 0..2 {
                    let lhs = minus_one.products.get(b).get(a, c);
                    let rhs = gamma.levi_civita.get(&[a, b, c]).scale(&rat(2));
                    assert!(lhs.agrees_with(&rhs.map_scalar(|x| RationalFunction::constant(x.clone()))));
                }
            }
        }
    }

    #[test]
    fn order_too_small() {
        let p = pt_potential(2).unwrap();
        assert!(matches!(third_derivs(&p), Err(Error::TruncationTooSmall { .. })));
        let p = pt_potential(3).unwrap();
        assert!(matches!(curvature(&p), Err(Error::TruncationTooSmall { .. })));
        let _ = Rational::one();
    }
}
