//! Finite-rank coefficient rings with a pairing.
//!
//! The basis element with index 0 is always the unit. Pairings are never
//! typed in by hand: the K-theory pairings come from holomorphic Euler
//! characteristics of line bundles via [`euler_char_line`].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::{binomial, binomial_poly, rat, Rational, Scalar};

/// `chi(CP^n, O(k)) = binom(n + k, n)`, read as a polynomial in `k` so
/// negative twists are covered.
pub fn euler_char_line(n: u32, k: i64) -> Rational {
    binomial_poly(&BigInt::from(n as i64 + k), n)
}

/// `chi(CP^n, x^m)` for `x = 1 - O(-1)`, by expanding `(1 - O(-1))^m`.
pub fn k_euler_of_power(n: u32, m: u32) -> Rational {
    (0..=m).fold(Rational::zero(), |acc, j| {
        let term = Rational::from_integer(binomial(m as u64, j as u64)) * euler_char_line(n, -(j as i64));
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusRing {
    labels: Vec<String>,
    /// `structure[a][b][c]` is the coefficient of `phi_c` in `phi_a * phi_b`.
    structure: Vec<Vec<Vec<Rational>>>,
    pairing: DenseMatrix<Rational>,
}

impl FrobeniusRing {
    /// Build and validate every ring axiom.
    pub fn new(
        labels: Vec<String>,
        structure: Vec<Vec<Vec<Rational>>>,
        pairing: DenseMatrix<Rational>,
    ) -> Result<Self> {
        let ring = Self {
            labels,
            structure,
            pairing,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn pairing(&self) -> &DenseMatrix<Rational> {
        &self.pairing
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.structure[a][b][c]
    }

    pub fn basis_vector(&self, a: usize) -> Vec<Rational> {
        (0..self.rank())
            .map(|i| if i == a { Rational::one() } else { Rational::zero() })
            .collect()
    }

    pub fn multiply(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let r = self.rank();
        let mut out = vec![Rational::zero(); r];
        for a in 0..r {
            if u[a].is_zero() {
                continue;
            }
            for b in 0..r {
                if v[b].is_zero() {
                    continue;
                }
                let uv = &u[a] * &v[b];
                for (c, slot) in out.iter_mut().enumerate() {
                    let sc = &self.structure[a][b][c];
                    if !sc.is_zero() {
                        *slot += &uv * sc;
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `phi_a`: entry `[b][c]` is the
    /// coefficient of `phi_c` in `phi_a * phi_b`.
    pub fn mult_matrix(&self, a: usize) -> DenseMatrix<Rational> {
        self.structure[a].clone()
    }

    /// The linear functional `u -> (u, 1)`.
    pub fn counit(&self, u: &[Rational]) -> Rational {
        u.iter()
            .zip(&self.pairing)
            .fold(Rational::zero(), |acc, (x, row)| acc + x * &row[0])
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Result<Rational> {
        ring_element_pairing(self, u, v)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        let shape_ok = r > 0
            && self.structure.len() == r
            && self
                .structure
                .iter()
                .all(|m| m.len() == r && m.iter().all(|row| row.len() == r))
            && self.pairing.len() == r
            && self.pairing.iter().all(|row| row.len() == r);
        if !shape_ok {
            return Err(Error::Invalid("ring tables do not match the rank".into()));
        }
        for b in 0..r {
            for c in 0..r {
                let delta = if b == c { Rational::one() } else { Rational::zero() };
                if self.structure[0][b][c] != delta || self.structure[b][0][c] != delta {
                    return Err(Error::Invalid(format!("basis element 0 is not a unit on phi_{b}")));
                }
            }
        }
        for a in 0..r {
            for b in 0..r {
                if self.structure[a][b] != self.structure[b][a] {
                    return Err(Error::Invalid(format!("product not commutative on ({a}, {b})")));
                }
                if self.pairing[a][b] != self.pairing[b][a] {
                    return Err(Error::Invalid("pairing not symmetric".into()));
                }
                let ab = self.multiply(&self.basis_vector(a), &self.basis_vector(b));
                if self.counit(&ab) != self.pairing[a][b] {
                    return Err(Error::Invalid(format!(
                        "pairing ({a}, {b}) disagrees with the pairing of the product against 1"
                    )));
                }
                for c in 0..r {
                    let left = self.multiply(&ab, &self.basis_vector(c));
                    let bc = self.multiply(&self.basis_vector(b), &self.basis_vector(c));
                    let right = self.multiply(&self.basis_vector(a), &bc);
                    if left != right {
                        return Err(Error::Invalid(format!("product not associative on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        if linalg::determinant(&self.pairing).is_zero() {
            return Err(Error::Singular);
        }
        Ok(())
    }

    pub fn describe(&self) -> RingDescription {
        let text = |m: &DenseMatrix<Rational>| -> Vec<Vec<String>> {
            m.iter().map(|row| row.iter().map(Scalar::to_text).collect()).collect()
        };
        RingDescription {
            rank: self.rank(),
            basis: self.labels.clone(),
            structure_constants: self.structure.iter().map(text).collect(),
            pairing: text(&self.pairing),
        }
    }

    pub fn from_description(d: &RingDescription) -> Result<Self> {
        let parse = |m: &Vec<Vec<String>>| -> Result<DenseMatrix<Rational>> {
            m.iter()
                .map(|row| row.iter().map(|s| Rational::parse_text(s)).collect())
                .collect()
        };
        let structure = d.structure_constants.iter().map(parse).collect::<Result<_>>()?;
        let ring = Self::new(d.basis.clone(), structure, parse(&d.pairing)?)?;
        if ring.rank() != d.rank {
            return Err(Error::Length {
                expected: d.rank,
                found: ring.rank(),
            });
        }
        Ok(ring)
    }
}

/// JSON form used by `ring show` and inside serialized potentials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingDescription {
    pub rank: usize,
    pub basis: Vec<String>,
    pub structure_constants: Vec<Vec<Vec<String>>>,
    pub pairing: Vec<Vec<String>>,
}

/// Truncated polynomial ring `Q[y]/(y^{n+1})`, basis `y^a`.
fn nilpotent_structure(n: usize) -> Vec<Vec<Vec<Rational>>> {
    let r = n + 1;
    (0..r)
        .map(|a| {
            (0..r)
                .map(|b| (0..r).map(|c| if a + b == c { rat(1) } else { rat(0) }).collect())
                .collect()
        })
        .collect()
}

fn power_labels(var: &str, n: usize) -> Vec<String> {
    (0..=n)
        .map(|a| match a {
            0 => "1".to_string(),
            1 => var.to_string(),
            _ => format!("{var}^{a}"),
        })
        .collect()
}

/// `K(CP^n)` in the nilpotent basis `x^a`, `x = 1 - O(-1)`.
pub fn k_ring_cpn(n: u32) -> FrobeniusRing {
    let r = n as usize + 1;
    let pairing = (0..r)
        .map(|a| (0..r).map(|b| k_euler_of_power(n, (a + b) as u32)).collect())
        .collect();
    FrobeniusRing::new(power_labels("x", n as usize), nilpotent_structure(n as usize), pairing)
        .expect("K(CP^n) satisfies the ring axioms")
}

/// `H*(CP^n)` with hyperplane class `p`, Poincare pairing.
pub fn h_ring_cpn(n: u32) -> FrobeniusRing {
    let n = n as usize;
    let pairing = (0..=n)
        .map(|a| (0..=n).map(|b| if a + b == n { rat(1) } else { rat(0) }).collect())
        .collect();
    FrobeniusRing::new(power_labels("p", n), nilpotent_structure(n), pairing)
        .expect("H*(CP^n) satisfies the ring axioms")
}

pub fn point_ring() -> FrobeniusRing {
    FrobeniusRing::new(vec!["1".into()], vec![vec![vec![rat(1)]]], vec![vec![rat(1)]])
        .expect("point ring is valid")
}

/// `u^T g v`.
pub fn ring_element_pairing(ring: &FrobeniusRing, u: &[Rational], v: &[Rational]) -> Result<Rational> {
    let r = ring.rank();
    for len in [u.len(), v.len()] {
        if len != r {
            return Err(Error::Length {
                expected: r,
                found: len,
            });
        }
    }
    let gv = linalg::mat_vec(&ring.pairing, v);
    Ok(u.iter().zip(&gv).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
}

/// Named built-in rings: `pt`, `kcp<n>`, `hcp<n>`.
pub fn ring_by_name(name: &str) -> Result<FrobeniusRing> {
    let parse_n = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| Error::Invalid(format!("unknown ring {name:?}")))
    };
    if name == "pt" {
        Ok(point_ring())
    } else if let Some(n) = name.strip_prefix("kcp") {
        Ok(k_ring_cpn(parse_n(n)?))
    } else if let Some(n) = name.strip_prefix("hcp") {
        Ok(h_ring_cpn(parse_n(n)?))
    } else {
        Err(Error::Invalid(format!("unknown ring {name:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(m: &[&[i64]]) -> DenseMatrix<Rational> {
        m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn line_bundle_characteristics() {
        // oracle: degree-1 forms in two variables
        assert_eq!(euler_char_line(1, 1), rat(2));
        for n in 0..6 {
            assert_eq!(euler_char_line(n, 0), rat(1));
        }
        assert_eq!(euler_char_line(2, -1), rat(0));
        assert_eq!(euler_char_line(1, -2), rat(-1));
        assert_eq!(euler_char_line(2, -3), rat(1));
    }

    #[test]
    fn k_pairings_low_rank() {
        assert_eq!(k_ring_cpn(1).pairing(), &ints(&[&[1, 1], &[1, 0]]));
        assert_eq!(
            k_ring_cpn(2).pairing(),
            &ints(&[&[1, 1, 1], &[1, 1, 0], &[1, 0, 0]])
        );
    }

    #[test]
    fn k_pairings_unimodular() {
        for n in 0..=8 {
            let det = linalg::determinant(k_ring_cpn(n).pairing());
            assert!(det == rat(1) || det == rat(-1), "n={n} det={det}");
        }
    }

    #[test]
    fn k_euler_of_nilpotent_powers() {
        for n in 0..=6u32 {
            assert_eq!(k_euler_of_power(n, 0), rat(1));
            for m in 1..=n + 3 {
                let expected = if m <= n { rat(1) } else { rat(0) };
                assert_eq!(k_euler_of_power(n, m), expected, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn cohomology_pairing_is_antidiagonal() {
        assert_eq!(h_ring_cpn(1).pairing(), &ints(&[&[0, 1], &[1, 0]]));
        let h2 = h_ring_cpn(2);
        assert_eq!(h2.pairing(), &ints(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]));
        let n = 4;
        let h = h_ring_cpn(n);
        for b in 0..=n as usize {
            assert_eq!(h.pairing()[0][b], if b == n as usize { rat(1) } else { rat(0) });
        }
    }

    #[test]
    fn point() {
        let p = point_ring();
        assert_eq!(p.pairing(), &ints(&[&[1]]));
        assert_eq!(p.multiply(&[rat(1)], &[rat(1)]), vec![rat(1)]);
        assert_eq!(linalg::determinant(p.pairing()), rat(1));
    }

    #[test]
    fn pairings_of_elements() {
        let k1 = k_ring_cpn(1);
        let x = k1.basis_vector(1);
        let one = k1.basis_vector(0);
        assert_eq!(ring_element_pairing(&k1, &x, &x).unwrap(), rat(0));
        for n in 0..5 {
            let k = k_ring_cpn(n);
            let one = k.basis_vector(0);
            assert_eq!(k.pair(&one, &one).unwrap(), rat(1));
        }
        let u = vec![rat(3), rat(-1)];
        let two_u: Vec<_> = u.iter().map(|a| a * rat(2)).collect();
        assert_eq!(
            k1.pair(&two_u, &one).unwrap(),
            k1.pair(&u, &one).unwrap() * rat(2)
        );
        assert!(matches!(k1.pair(&[rat(1)], &one), Err(Error::Length { .. })));
    }

    #[test]
    fn frobenius_property_all_builtins() {
        for ring in [point_ring(), k_ring_cpn(1), k_ring_cpn(3), h_ring_cpn(2), h_ring_cpn(3)] {
            ring.validate().unwrap();
            let r = ring.rank();
            for a in 0..r {
                for b in 0..r {
                    for c in 0..r {
                        let (ea, eb, ec) = (ring.basis_vector(a), ring.basis_vector(b), ring.basis_vector(c));
                        let lhs = ring.pair(&ring.multiply(&ea, &eb), &ec).unwrap();
                        let rhs = ring.pair(&ea, &ring.multiply(&eb, &ec)).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn broken_rings_rejected() {
        let mut desc = k_ring_cpn(1).describe();
        desc.pairing[1][1] = "5".into();
        assert!(FrobeniusRing::from_description(&desc).is_err());
        let desc = k_ring_cpn(2).describe();
        assert_eq!(FrobeniusRing::from_description(&desc).unwrap(), k_ring_cpn(2));
    }

    #[test]
    fn named_rings() {
        assert_eq!(ring_by_name("kcp2").unwrap(), k_ring_cpn(2));
        assert_eq!(ring_by_name("hcp2").unwrap().rank(), 3);
        assert!(ring_by_name("grass").is_err());
    }
}
