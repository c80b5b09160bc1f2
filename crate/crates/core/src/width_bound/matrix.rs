//! Dense matrices over an exact field and reduced row echelon form.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::ExactField;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: ExactField> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!("matrix shape {rows}x{cols} is empty")));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{rows}x{cols} matrix given {} entries",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn scale(&self, alpha: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v.clone() * alpha.clone()).collect(),
        }
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
                context: "matrix-vector product".into(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Gauss-Jordan elimination. Returns the reduced row echelon form and the
    /// pivot column of each nonzero row, in row order.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = T::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn set(&mut self, r: usize, c: usize, v: T) {
        self.entries[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: ExactField> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn mat(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()).unwrap()
    }

    #[test]
    fn already_reduced() {
        let m = mat(&[&[(1, 1), (0, 1), (-2, 1)], &[(0, 1), (1, 1), (3, 1)]]);
        let (r, p) = m.rref();
        assert_eq!(r, m);
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn scales_single_row() {
        let (r, p) = mat(&[&[(2, 1), (4, 1)]]).rref();
        assert_eq!(r, mat(&[&[(1, 1), (2, 1)]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rank_deficient() {
        let (r, p) = mat(&[&[(1, 1), (1, 1), (1, 1)], &[(2, 1), (2, 1), (2, 1)]]).rref();
        assert_eq!(r, mat(&[&[(1, 1), (1, 1), (1, 1)], &[(0, 1), (0, 1), (0, 1)]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn needs_row_swap() {
        let (r, p) = mat(&[&[(0, 1), (3, 1)], &[(5, 1), (1, 1)]]).rref();
        assert_eq!(r, mat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]));
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn works_over_small_rationals() {
        use num_rational::Rational64;
        let m = Matrix::from_rows(vec![vec![Rational64::new(2, 3), Rational64::new(4, 3)]]).unwrap();
        let (r, _) = m.rref();
        assert_eq!(*r.get(0, 1), Rational64::from_integer(2));
    }
}
