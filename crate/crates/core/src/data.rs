//! Dense row-major observation matrix.

use crate::error::{Error, Result};

/// An `n × q` matrix of finite observations, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    q: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Every entry must be finite.
    pub fn new(n: usize, q: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::invalid(format!(
                "matrix must have at least one row and one column, got {n}x{q}"
            )));
        }
        if values.len() != n * q {
            return Err(Error::dims(format!(
                "expected {} values for a {n}x{q} matrix, got {}",
                n * q,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / q,
                col: pos % q,
            });
        }
        Ok(DataMatrix { values, n, q })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let q = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(n * q);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != q {
                return Err(Error::dims(format!(
                    "row {i} has {} columns, expected {q}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(n, q, values)
    }

    /// Constructor for values produced by finite arithmetic on finite inputs.
    pub(crate) fn from_raw(n: usize, q: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n * q);
        DataMatrix { values, n, q }
    }

    pub fn zeros(n: usize, q: usize) -> Result<Self> {
        Self::new(n, q, vec![0.0; n * q])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.q..(i + 1) * self.q]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.q + j]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.q)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Returns `c * self`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.n, self.q, self.values.iter().map(|v| c * v).collect())
    }

    /// Elementwise sum with another matrix of the same shape.
    pub fn add(&self, other: &DataMatrix) -> Result<Self> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::dims(format!(
                "cannot add {}x{} and {}x{}",
                self.n, self.q, other.n, other.q
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.n, self.q, values)
    }

    /// `x^T v` for a length-`n` vector `v`, accumulated row by row.
    pub fn transpose_times(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        let mut out = vec![0.0; self.q];
        for (row, &w) in self.rows().zip(v) {
            if w != 0.0 {
                for (o, x) in out.iter_mut().zip(row) {
                    *o += w * x;
                }
            }
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}
