use std::ops::{Index, IndexMut};

use crate::error::{check_len, Error, Result};

/// Row-major dense matrix, used only for desk-scale spectral work and checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            values: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = Self::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = 1.0;
        }
        d
    }

    pub fn from_row_major(nrows: usize, ncols: usize, values: Vec<f64>) -> Result<Self> {
        check_len("DenseMatrix::from_row_major", nrows * ncols, values.len())?;
        Ok(Self {
            nrows,
            ncols,
            values,
        })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut d = Self::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            check_len("DenseMatrix::from_columns", nrows, col.len())?;
            for (i, &v) in col.iter().enumerate() {
                d[(i, j)] = v;
            }
        }
        Ok(d)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("DenseMatrix::matvec", self.ncols, x.len())?;
        Ok((0..self.nrows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("DenseMatrix::matmul", self.ncols, other.nrows)?;
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.values[i * other.ncols..(i + 1) * other.ncols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> DenseMatrix {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("DenseMatrix::add_scaled", self.nrows, other.nrows)?;
        check_len("DenseMatrix::add_scaled", self.ncols, other.ncols)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            values,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Largest `|M_ij - M_ji|` relative to the largest entry.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> DenseMatrix {
        let mut s = self.clone();
        for i in 0..self.nrows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    /// Solves `M x = b` by LU with partial pivoting.
    pub fn lu_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        Lu::factor(self)?.solve(b)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.values[i * self.ncols + j]
    }
}

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with `InvalidSystem` when a pivot vanishes relative to the
    /// matrix scale.
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                nrows: m.nrows,
                ncols: m.ncols,
            });
        }
        let n = m.nrows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = 1e-14 * m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot <= floor {
                return Err(Error::InvalidSystem(format!(
                    "matrix is numerically singular at column {k}"
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.values.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / d;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= l * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.nrows;
        check_len("Lu::solve", n, b.len())?;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let m = DenseMatrix::from_row_major(2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let x = m.lu_solve(&[1.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lu_rejects_singular() {
        let m = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(Lu::factor(&m).is_err());
    }

    #[test]
    fn matmul_and_transpose() {
        let a = DenseMatrix::from_row_major(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let g = a.matmul(&a.transpose()).unwrap();
        assert_eq!(g.values(), &[14.0, 32.0, 32.0, 77.0]);
        assert_eq!(g.relative_asymmetry(), 0.0);
    }
}
