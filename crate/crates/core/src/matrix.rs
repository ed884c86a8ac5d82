//! Square matrices of series.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::scalar::Scalar;
use crate::series::{MultiSeries, Truncation};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SeriesMatrix<S> {
    n: usize,
    entries: Vec<MultiSeries<S>>,
}

impl<S: Scalar> SeriesMatrix<S> {
    /// Row-major entries; all must share arity.
    pub fn from_rows(rows: Vec<Vec<MultiSeries<S>>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Length {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        if let Some(first) = entries.first() {
            if entries
                .iter()
                .any(|e| e.n_t() != first.n_t() || e.n_q() != first.n_q())
            {
                return Err(Error::Arity("matrix entries disagree".into()));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> MultiSeries<S>) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, entries }
    }

    /// Embed a constant matrix.
    pub fn from_dense(m: &DenseMatrix<S>, n_t: usize, trunc: &Truncation) -> Self {
        Self::from_fn(m.len(), |i, j| {
            MultiSeries::constant(n_t, trunc.clone(), m[i][j].clone())
        })
    }

    pub fn identity(n: usize, n_t: usize, trunc: &Truncation) -> Self {
        Self::from_dense(&linalg::identity(n), n_t, trunc)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiSeries<S> {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &MultiSeries<S>> {
        self.entries.iter()
    }

    /// The common reliable truncation of all entries.
    pub fn truncation(&self) -> Option<Truncation> {
        let mut it = self.entries.iter();
        let first = it.next()?.truncation().clone();
        Some(it.fold(first, |acc, e| acc.meet(e.truncation())))
    }

    pub fn map(&self, f: impl Fn(&MultiSeries<S>) -> MultiSeries<S>) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SeriesMatrix<T> {
        SeriesMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.map_scalar(&f)).collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Length {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, entries })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(i, 0).try_mul(other.get(0, j))?;
                for k in 1..n {
                    acc = acc.try_add(&self.get(i, k).try_mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn constant_part(&self) -> DenseMatrix<S> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).constant_term()).collect())
            .collect()
    }

    /// Entrywise agreement within each pair's common truncation.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees_with(b))
    }

    /// Inverse through the truncation: with `M = M0 + H` and `M0` the
    /// constant-term matrix, `M^{-1} = sum_m (-M0^{-1} H)^m M0^{-1}`.
    pub fn inverse(&self) -> Result<Self> {
        let Some(first) = self.entries.first() else {
            return Ok(self.clone());
        };
        let n_t = first.n_t();
        let trunc = self.truncation().expect("nonempty");
        let m0 = self.constant_part();
        let m0_inv = linalg::inverse(&m0)?;
        let m0_inv_s = Self::from_dense(&m0_inv, n_t, &trunc);
        let h = self.try_sub(&Self::from_dense(&m0, n_t, &trunc))?;
        let step = m0_inv_s.try_mul(&h)?.scale(&-S::one());
        let mut term = Self::identity(self.n, n_t, &trunc);
        let mut sum = term.clone();
        loop {
            term = step.try_mul(&term)?;
            if term.entries.iter().all(MultiSeries::is_zero) {
                break;
            }
            sum = sum.try_add(&term)?;
        }
        sum.try_mul(&m0_inv_s)
    }
}

/// Inverse of a series matrix, expanded around its constant term.
pub fn mat_inverse<S: Scalar>(m: &SeriesMatrix<S>) -> Result<SeriesMatrix<S>> {
    m.inverse()
}

impl<S: Scalar> fmt::Debug for SeriesMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SeriesMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                writeln!(f, "  ({i},{j}): {}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
