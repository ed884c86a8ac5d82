//! Generating potentials `G = 1/2 g t t + F` and a library of concrete ones.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dm::compositions;
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::ring::{h_ring_cpn, point_ring, FrobeniusRing, RingDescription};
use crate::scalar::{binomial, factorial, rat, ratio, Rational};
use crate::series::{exp_tail, MultiSeries, Truncation};

type RatSeries = MultiSeries<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Pt,
    ClassicalK,
    Cp2Cohomology,
    Sampled,
    User,
}

/// Which associativity law the potential is meant to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theory {
    /// Inverse of the full second-derivative matrix.
    KTheory,
    /// Constant inverse pairing.
    Cohomology,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    ring: FrobeniusRing,
    kind: PotentialKind,
    theory: Theory,
    series: RatSeries,
}

impl Potential {
    /// Validates arity, the absence of terms below t-degree 2, and that
    /// the `Q = 0` quadratic part is `1/2 sum g_ab t_a t_b`.
    pub fn new(ring: FrobeniusRing, kind: PotentialKind, theory: Theory, series: RatSeries) -> Result<Self> {
        if series.n_t() != ring.rank() {
            return Err(Error::Arity(format!(
                "potential in {} t-variables over a rank-{} ring",
                series.n_t(),
                ring.rank()
            )));
        }
        if series.t_order() < 2 {
            return Err(Error::TruncationTooSmall {
                needed: 2,
                have: series.t_order(),
            });
        }
        if series.min_t_degree().is_some_and(|d| d < 2) {
            return Err(Error::Invalid("potential has terms of t-degree < 2".into()));
        }
        let quad = quadratic_form(ring.pairing(), series.truncation());
        let actual = series.at_q_zero().t_homogeneous(2);
        if !actual.agrees_with(&quad.at_q_zero()) {
            return Err(Error::Invalid("quadratic part is not 1/2 g t t".into()));
        }
        Ok(Self {
            ring,
            kind,
            theory,
            series,
        })
    }

    pub fn ring(&self) -> &FrobeniusRing {
        &self.ring
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn series(&self) -> &RatSeries {
        &self.series
    }

    pub fn rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn truncation(&self) -> &Truncation {
        self.series.truncation()
    }

    /// `F = G - 1/2 g t t`.
    pub fn correction(&self) -> RatSeries {
        &self.series - &quadratic_form(self.ring.pairing(), self.series.truncation())
    }

    /// The same potential, reliable only through a lower t-order.
    pub fn truncate_t(&self, t_order: usize) -> Result<Self> {
        Self::new(
            self.ring.clone(),
            self.kind,
            self.theory,
            self.series.truncate_t(t_order),
        )
    }

    /// Replace the series (re-validating), keeping ring and theory.
    pub fn with_series(&self, kind: PotentialKind, series: RatSeries) -> Result<Self> {
        Self::new(self.ring.clone(), kind, self.theory, series)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PotentialFile {
            kind: self.kind,
            theory: self.theory,
            ring: self.ring.describe(),
            series: self.series.clone(),
        })
        .expect("potential serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PotentialFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let ring = FrobeniusRing::from_description(&file.ring)?;
        Self::new(ring, file.kind, file.theory, file.series)
    }
}

impl AsRef<RatSeries> for Potential {
    fn as_ref(&self) -> &RatSeries {
        &self.series
    }
}

#[derive(Serialize, Deserialize)]
struct PotentialFile {
    kind: PotentialKind,
    theory: Theory,
    ring: RingDescription,
    series: RatSeries,
}

/// `1/2 sum g_ab t_a t_b`.
pub fn quadratic_form(g: &DenseMatrix<Rational>, trunc: &Truncation) -> RatSeries {
    let r = g.len();
    let mut out = MultiSeries::zero(r, trunc.clone());
    for a in 0..r {
        for b in 0..r {
            let mut e = vec![0; r + trunc.n_q()];
            e[a] += 1;
            e[b] += 1;
            out.add_term(e, &g[a][b] * ratio(1, 2));
        }
    }
    out
}

/// `e^t - 1 - t` over the point.
pub fn pt_potential(t_order: usize) -> Result<Potential> {
    let trunc = Truncation::t_only(t_order);
    let series = exp_tail(1, trunc, 0, 2);
    Potential::new(point_ring(), PotentialKind::Pt, Theory::KTheory, series)
}

/// Ring-valued series: one series per basis element.
type RingSeries = Vec<RatSeries>;

fn ring_series_mul(ring: &FrobeniusRing, u: &RingSeries, v: &RingSeries) -> RingSeries {
    let r = ring.rank();
    let mut out: RingSeries = (0..r)
        .map(|_| MultiSeries::zero(u[0].n_t(), u[0].truncation().meet(v[0].truncation())))
        .collect();
    for a in 0..r {
        if u[a].is_zero() {
            continue;
        }
        for b in 0..r {
            if v[b].is_zero() {
                continue;
            }
            let prod = &u[a] * &v[b];
            for (c, slot) in out.iter_mut().enumerate() {
                let sc = ring.structure_constant(a, b, c);
                if !sc.is_zero() {
                    *slot = &*slot + &prod.scale(sc);
                }
            }
        }
    }
    out
}

/// Degree-`>= 2` part of `chi(e^{sum t_a phi_a})` where `chi` is the
/// pairing against the unit, optionally restricted to t-degrees `<= max_degree`.
fn classical_series(ring: &FrobeniusRing, trunc: &Truncation, max_degree: usize) -> RatSeries {
    let r = ring.rank();
    let coord: RingSeries = (0..r).map(|a| MultiSeries::t_var(r, trunc.clone(), a)).collect();
    let mut power = coord.clone();
    let mut total = MultiSeries::zero(r, trunc.clone());
    for n in 2..=trunc.t_order.min(max_degree) {
        power = ring_series_mul(ring, &power, &coord);
        let inv_fact = Rational::from_integer(factorial(n as u32)).recip();
        for (c, comp) in power.iter().enumerate() {
            let weight = &ring.pairing()[c][0] * &inv_fact;
            if !weight.is_zero() {
                total = &total + &comp.scale(&weight);
            }
        }
    }
    total
}

/// Degree-zero correlators: `G(t) = chi(e^{sum t_a phi_a} - 1 - sum t_a phi_a)`.
pub fn classical_k_potential(ring: &FrobeniusRing, t_order: usize) -> Result<Potential> {
    let trunc = Truncation::t_only(t_order);
    let series = classical_series(ring, &trunc, usize::MAX);
    Potential::new(ring.clone(), PotentialKind::ClassicalK, Theory::KTheory, series)
}

/// Numbers of rational plane curves through `3d - 1` general points.
pub fn kontsevich_nd(dmax: usize) -> Result<Vec<Rational>> {
    if dmax < 1 {
        return Err(Error::Invalid("dmax must be >= 1".into()));
    }
    let mut n: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for d in 2..=dmax {
        let mut acc = BigInt::zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let (b1, b2) = (BigInt::from(d1), BigInt::from(d2));
            let top = (3 * d - 4) as u64;
            let bracket = &b2 * binomial(top, (3 * d1 - 2) as u64) - &b1 * binomial(top, (3 * d1 - 1) as u64);
            acc += &n[d1] * &n[d2] * &b1 * &b1 * &b2 * bracket;
        }
        n.push(acc);
    }
    Ok(n[1..].iter().cloned().map(Rational::from_integer).collect())
}

/// Genus-0 Gromov-Witten potential of `CP^2`:
/// `t0 t2 + t1^2/2 + t0^2 t2/2 + t0 t1^2/2 + sum_d N_d Q^d e^{d t1} t2^{3d-1}/(3d-1)!`.
pub fn cp2_potential(t_order: usize, dmax: usize) -> Result<Potential> {
    let nd = kontsevich_nd(dmax.max(1))?;
    cp2_potential_from(&nd[..dmax], t_order)
}

/// As [`cp2_potential`] with caller-supplied `N_1, N_2, ...` (used to build
/// deliberately wrong fixtures).
pub fn cp2_potential_from(nd: &[Rational], t_order: usize) -> Result<Potential> {
    let ring = h_ring_cpn(2);
    let dmax = nd.len();
    let trunc = Truncation::new(t_order, vec![dmax]);
    let mut g = quadratic_form(ring.pairing(), &trunc);
    g.add_term(vec![2, 0, 1, 0], ratio(1, 2));
    g.add_term(vec![1, 2, 0, 0], ratio(1, 2));
    for (i, n_d) in nd.iter().enumerate() {
        let d = i + 1;
        let t2_pow = 3 * d - 1;
        let base = n_d / Rational::from_integer(factorial(t2_pow as u32));
        let mut dj = Rational::one();
        for j in 0..=t_order.saturating_sub(t2_pow) {
            if j > 0 {
                dj *= rat(d as i64);
            }
            let coeff = &base * &dj / Rational::from_integer(factorial(j as u32));
            g.add_term(vec![0, j as u32, t2_pow as u32, d as u32], coeff);
        }
    }
    Potential::new(ring, PotentialKind::Cp2Cohomology, Theory::Cohomology, g)
}

/// All exponent vectors of `n_vars` variables with total degree `degree`.
pub fn monomials(n_vars: usize, degree: usize) -> Vec<Vec<u32>> {
    compositions(degree as u32, n_vars)
}

fn random_small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-3..=3);
    let den: i64 = rng.gen_range(1..=3);
    ratio(num, den)
}

/// Random symmetric invertible pairing and a random `F` supported in
/// t-degrees `3..=t_order`; reproducible from `seed`.
pub fn random_quadratic_plus_f(rank: usize, t_order: usize, seed: u64) -> Result<(DenseMatrix<Rational>, RatSeries)> {
    if rank == 0 {
        return Err(Error::Invalid("rank must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = loop {
        let mut g = vec![vec![Rational::zero(); rank]; rank];
        for a in 0..rank {
            for b in a..rank {
                let v = rat(rng.gen_range(-3..=3));
                g[a][b] = v.clone();
                g[b][a] = v;
            }
        }
        if !linalg::determinant(&g).is_zero() {
            break g;
        }
    };
    let trunc = Truncation::t_only(t_order);
    let mut f = MultiSeries::zero(rank, trunc);
    for deg in 3..=t_order {
        for e in monomials(rank, deg) {
            if rng.gen_bool(0.6) {
                f.add_term(e, random_small_rational(&mut rng));
            }
        }
    }
    Ok((g, f))
}

/// A random commutative associative unital algebra with a nondegenerate
/// Frobenius form: either a split semisimple algebra `Q^r` in a random
/// basis containing the unit, or `Q[y]/(y^r)` with a random trace form.
pub fn random_frobenius_ring(rank: usize, rng: &mut ChaCha8Rng) -> FrobeniusRing {
    let labels: Vec<String> = (0..rank).map(|a| format!("e{a}")).collect();
    if rank > 1 && rng.gen_bool(0.5) {
        let mut trace: Vec<Rational> = (0..rank).map(|_| random_small_rational(rng)).collect();
        trace[0] = Rational::one();
        trace[rank - 1] = rat(rng.gen_range(1..=3));
        let structure = (0..rank)
            .map(|a| {
                (0..rank)
                    .map(|b| (0..rank).map(|c| if a + b == c { rat(1) } else { rat(0) }).collect())
                    .collect()
            })
            .collect();
        let pairing = (0..rank)
            .map(|a| {
                (0..rank)
                    .map(|b| trace.get(a + b).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            })
            .collect();
        return FrobeniusRing::new(labels, structure, pairing).expect("truncated polynomial ring");
    }
    // rows of `basis` are the basis vectors in idempotent coordinates
    let basis = loop {
        let mut rows = vec![vec![Rational::one(); rank]];
        for _ in 1..rank {
            rows.push((0..rank).map(|_| rat(rng.gen_range(-2..=2))).collect());
        }
        if !linalg::determinant(&rows).is_zero() {
            break rows;
        }
    };
    let weights: Vec<Rational> = (0..rank)
        .map(|_| {
            let w: i64 = rng.gen_range(1..=3);
            if rng.gen_bool(0.5) {
                rat(w)
            } else {
                rat(-w)
            }
        })
        .collect();
    let basis_inv = linalg::inverse(&basis).expect("invertible basis");
    let structure = (0..rank)
        .map(|a| {
            (0..rank)
                .map(|b| {
                    let prod: Vec<Rational> = (0..rank).map(|i| &basis[a][i] * &basis[b][i]).collect();
                    linalg::mat_mul(&vec![prod], &basis_inv).remove(0)
                })
                .collect()
        })
        .collect();
    let pairing = (0..rank)
        .map(|a| {
            (0..rank)
                .map(|b| {
                    (0..rank).fold(Rational::zero(), |acc, i| acc + &weights[i] * &basis[a][i] * &basis[b][i])
                })
                .collect()
        })
        .collect();
    FrobeniusRing::new(labels, structure, pairing).expect("split semisimple algebra")
}

pub(crate) fn cubic_seed(ring: &FrobeniusRing, t_order: usize) -> RatSeries {
    let trunc = Truncation::t_only(t_order);
    classical_series(ring, &trunc, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::k_ring_cpn;

    #[test]
    fn point_potential_coefficients() {
        let p = pt_potential(6).unwrap();
        assert_eq!(p.series().coeff(&[3]), ratio(1, 6));
        assert_eq!(p.series().coeff(&[2]), ratio(1, 2));
        assert_eq!(p.series().coeff(&[1]), rat(0));
        assert!(pt_potential(1).is_err());
    }

    #[test]
    fn classical_on_point_is_pt() {
        assert_eq!(
            classical_k_potential(&point_ring(), 7).unwrap().series(),
            pt_potential(7).unwrap().series()
        );
    }

    #[test]
    fn classical_quadratic_part_is_pairing() {
        for ring in [k_ring_cpn(1), k_ring_cpn(2), h_ring_cpn(2)] {
            let p = classical_k_potential(&ring, 4).unwrap();
            let r = ring.rank();
            for a in 0..r {
                for b in 0..r {
                    let mut e = vec![0; r];
                    e[a] += 1;
                    e[b] += 1;
                    let sym = if a == b { rat(2) } else { rat(1) };
                    assert_eq!(p.series().coeff(&e) * sym, ring.pairing()[a][b]);
                }
            }
        }
    }

    #[test]
    fn kontsevich_numbers() {
        let nd = kontsevich_nd(5).unwrap();
        let expected: Vec<Rational> = [1, 1, 12, 620, 87304].iter().map(|&x| rat(x)).collect();
        assert_eq!(nd, expected);
        assert!(kontsevich_nd(0).is_err());
    }

    #[test]
    fn cp2_coefficients() {
        let p = cp2_potential(8, 2).unwrap();
        assert_eq!(p.series().coeff(&[0, 0, 2, 1]), ratio(1, 2));
        assert_eq!(p.series().coeff(&[0, 1, 2, 1]), ratio(1, 2));
        assert_eq!(p.series().coeff(&[2, 0, 1, 0]), ratio(1, 2));
        assert_eq!(p.series().coeff(&[0, 0, 5, 2]), ratio(1, 120));
    }

    #[test]
    fn random_inputs_are_reproducible() {
        let a = random_quadratic_plus_f(3, 5, 11).unwrap();
        let b = random_quadratic_plus_f(3, 5, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.1.min_t_degree().unwrap_or(3) >= 3);
        for seed in 0..100 {
            let (g, _) = random_quadratic_plus_f(2, 4, seed).unwrap();
            assert!(!linalg::determinant(&g).is_zero());
        }
    }

    #[test]
    fn random_rings_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rank in 1..=4 {
            for _ in 0..8 {
                random_frobenius_ring(rank, &mut rng).validate().unwrap();
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = cp2_potential(6, 2).unwrap();
        assert_eq!(Potential::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn invalid_quadratic_part_rejected() {
        let p = pt_potential(4).unwrap();
        let bad = p.series() + &MultiSeries::monomial(1, Truncation::t_only(4), vec![2], rat(1));
        assert!(p.with_series(PotentialKind::User, bad).is_err());
    }
}
