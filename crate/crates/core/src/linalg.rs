//! Dense exact linear algebra over a [`Scalar`] field.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type DenseMatrix<S> = Vec<Vec<S>>;

pub fn identity<S: Scalar>(n: usize) -> DenseMatrix<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn mat_mul<S: Scalar>(a: &DenseMatrix<S>, b: &DenseMatrix<S>) -> DenseMatrix<S> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(S::zero(), |acc, k| acc + &(row[k].clone() * &b[k][j]))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &DenseMatrix<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(S::zero(), |acc, (x, y)| acc + &(x.clone() * y)))
        .collect()
}

pub fn transpose<S: Scalar>(a: &DenseMatrix<S>) -> DenseMatrix<S> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn determinant<S: Scalar>(a: &DenseMatrix<S>) -> S {
    let n = a.len();
    let mut m = a.clone();
    let mut det = S::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return S::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det = det * &m[col][col];
        let inv = m[col][col].inv().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() * &inv;
            for c in col..n {
                let d = f.clone() * &m[col][c];
                m[r][c] = m[r][c].clone() - &d;
            }
        }
    }
    det
}

pub fn inverse<S: Scalar>(a: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(identity::<S>(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::Singular)?;
        m.swap(piv, col);
        let inv = m[col][col].inv().expect("nonzero pivot");
        for c in 0..2 * n {
            m[col][c] = m[col][c].clone() * &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let d = f.clone() * &m[col][c];
                m[r][c] = m[r][c].clone() - &d;
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solution set of `a x = b`: a particular solution and a nullspace basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution<S> {
    pub particular: Vec<S>,
    pub nullspace: Vec<Vec<S>>,
}

/// Gauss-Jordan solve of `a x = b` with `a` of shape `rows x cols`.
/// Returns `None` when the system is inconsistent.
pub fn solve_affine<S: Scalar>(a: &DenseMatrix<S>, b: &[S], cols: usize) -> Option<AffineSolution<S>> {
    let rows = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(piv, r);
        let inv = m[r][col].inv().expect("nonzero pivot");
        for c in col..=cols {
            m[r][c] = m[r][c].clone() * &inv;
        }
        for i in 0..rows {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in col..=cols {
                let d = f.clone() * &m[r][c];
                m[i][c] = m[i][c].clone() - &d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut particular = vec![S::zero(); cols];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution {
        particular,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn m(rows: &[&[i64]]) -> DenseMatrix<Rational> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn inverse_of_unimodular() {
        let a = m(&[&[1, 1], &[1, 0]]);
        assert_eq!(inverse(&a).unwrap(), m(&[&[0, 1], &[1, -1]]));
        assert_eq!(determinant(&a), rat(-1));
        assert_eq!(inverse(&m(&[&[1, 2], &[2, 4]])), Err(Error::Singular));
    }

    #[test]
    fn affine_solutions() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let b = vec![rat(2), rat(3)];
        let sol = solve_affine(&a, &b, 3).unwrap();
        assert_eq!(mat_vec(&a, &sol.particular), b);
        assert_eq!(sol.nullspace.len(), 1);
        assert_eq!(mat_vec(&a, &sol.nullspace[0]), vec![rat(0), rat(0)]);

        let inconsistent = m(&[&[1, 1], &[2, 2]]);
        assert!(solve_affine(&inconsistent, &[rat(1), rat(3)], 2).is_none());
    }
}
