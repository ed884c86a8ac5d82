//! Synthetic K-theoretic potentials built order by order.
//!
//! At t-degree `D` the unknowns are the coefficients of the degree-`D`
//! monomials. Both the unit constraint `d_0 G_ab = G_ab` and the symmetry
//! residual of `T_{abcd}` at degree `D - 3` depend affinely on them, so
//! each step is an exact linear solve.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{metric, symmetry_residuals, third_derivs, wdvv_tensor};
use crate::error::{Error, Result};
use crate::linalg::solve_affine;
use crate::potential::{cubic_seed, monomials, random_frobenius_ring, Potential, PotentialKind, Theory};
use crate::scalar::{rat, Rational};
use crate::RatSeries;

/// Degree-`d` coefficients of every constraint, flattened in a fixed order.
fn residual_vector(g: &RatSeries, d: usize) -> Result<Vec<Rational>> {
    let r = g.n_t();
    let mons = monomials(r, d);
    let mut out = Vec::new();
    let mut push = |s: &RatSeries| out.extend(mons.iter().map(|e| s.coeff(e)));

    let m = metric(g)?;
    for a in 0..r {
        for b in a..r {
            let entry = m.lower.get(a, b);
            push(&(&entry.partial(0)? - entry));
        }
    }
    if r > 1 {
        let third = third_derivs(g)?;
        let t = wdvv_tensor(&third, &m.upper);
        for (_, res) in symmetry_residuals(&t) {
            push(&res);
        }
    }
    Ok(out)
}

/// Random potential over a random Frobenius ring satisfying the unit
/// constraint and the symmetry of `T_{abcd}` through `t_order`.
pub fn sample_k_potential(rank: usize, t_order: usize, seed: u64) -> Result<Potential> {
    if rank == 0 {
        return Err(Error::Invalid("rank must be >= 1".into()));
    }
    if t_order < 3 {
        return Err(Error::TruncationTooSmall {
            needed: 3,
            have: t_order,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = random_frobenius_ring(rank, &mut rng);
    let mut g = cubic_seed(&ring, t_order);

    for d in 4..=t_order {
        let base = g.truncate_t(d);
        let mons = monomials(rank, d);
        let r0 = residual_vector(&base, d - 3)?;
        let mut columns = Vec::with_capacity(mons.len());
        for e in &mons {
            let mut probe = base.clone();
            probe.add_term(e.clone(), rat(1));
            let ri = residual_vector(&probe, d - 3)?;
            columns.push(ri.iter().zip(&r0).map(|(x, y)| x - y).collect::<Vec<_>>());
        }
        let rows = r0.len();
        let a: Vec<Vec<Rational>> = (0..rows)
            .map(|i| columns.iter().map(|col| col[i].clone()).collect())
            .collect();
        let b: Vec<Rational> = r0.iter().map(|x| -x).collect();
        let sol = solve_affine(&a, &b, mons.len()).ok_or(Error::Infeasible { order: d })?;
        let mut x = sol.particular;
        for basis in &sol.nullspace {
            let c = rat(rng.gen_range(-3..=3));
            if c.is_zero() {
                continue;
            }
            for (xi, bi) in x.iter_mut().zip(basis) {
                *xi += &c * bi;
            }
        }
        for (e, c) in mons.into_iter().zip(x) {
            g.add_term(e, c);
        }
    }
    Potential::new(ring, PotentialKind::Sampled, Theory::KTheory, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::quantum_product;
    use crate::matrix::SeriesMatrix;
    use crate::potential::classical_k_potential;

    fn symmetric(p: &Potential) -> bool {
        let third = third_derivs(p).unwrap();
        let m = metric(p).unwrap();
        symmetry_residuals(&wdvv_tensor(&third, &m.upper))
            .iter()
            .all(|(_, s)| s.is_zero())
    }

    #[test]
    fn rank_one_is_exponential_family() {
        let p = sample_k_potential(1, 7, 3).unwrap();
        let g00 = metric(&p).unwrap().lower.get(0, 0).clone();
        assert!(g00.partial(0).unwrap().agrees_with(&g00));
    }

    #[test]
    fn rank_two_seed_seven() {
        let p = sample_k_potential(2, 4, 7).unwrap();
        assert!(symmetric(&p));
        let a = quantum_product(&p).unwrap();
        let trunc = a.get(0).truncation().unwrap();
        assert_eq!(a.get(0), &SeriesMatrix::identity(2, 2, &trunc));
    }

    #[test]
    fn deterministic_in_seed() {
        let a = sample_k_potential(2, 5, 11).unwrap();
        assert_eq!(a.series().t_order(), 5);
        let b = sample_k_potential(2, 5, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn residual_of_classical_is_zero() {
        let ring = crate::ring::k_ring_cpn(2);
        let p = classical_k_potential(&ring, 5).unwrap();
        for d in 0..=2 {
            assert!(residual_vector(p.series(), d).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn samples_leave_the_classical_family() {
        let differs = (0..6).any(|seed| {
            let p = sample_k_potential(2, 6, seed).unwrap();
            let c = classical_k_potential(p.ring(), 6).unwrap();
            symmetric(&p) && p.series() != c.series()
        });
        assert!(differs);
    }

    #[test]
    fn rank_three_sampled() {
        for seed in 0..3 {
            let p = sample_k_potential(3, 5, seed).unwrap();
            assert!(symmetric(&p));
        }
    }
}

