//! Envelope (skyline) Cholesky factorization in natural order.
//!
//! Row `i` of the factor is stored densely from the first nonzero column of
//! row `i` of the input up to the diagonal. Cholesky fill never leaves this
//! envelope, so no symbolic phase is needed. There is no fill-reducing
//! reordering: the cost is `O(sum of squared row envelopes)`, which degrades
//! to `O(n³)` for matrices with a full profile.

use crate::error::{check_len, Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};

/// Pivots at or below `PIVOT_FLOOR * max diagonal` mean "not SPD".
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Largest relative asymmetry accepted by [`cholesky`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Lower-triangular factor `L` with `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    first_col: Vec<usize>,
    row_start: Vec<usize>,
    lower: Vec<f64>,
    source_tag: String,
}

/// Factors a symmetric positive definite sparse matrix.
pub fn cholesky(m: &SparseMatrix) -> Result<CholeskyFactor> {
    cholesky_tagged(m, "")
}

/// As [`cholesky`], recording a label for diagnostics.
pub fn cholesky_tagged(m: &SparseMatrix, tag: &str) -> Result<CholeskyFactor> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    let asymmetry = m.relative_asymmetry()?;
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::Asymmetric { asymmetry });
    }

    let n = m.nrows();
    let mut first_col = Vec::with_capacity(n);
    let mut row_start = Vec::with_capacity(n + 1);
    row_start.push(0);
    for i in 0..n {
        let (cols, _) = m.row(i);
        let f = cols.first().map_or(i, |&c| c.min(i));
        first_col.push(f);
        row_start.push(row_start[i] + (i - f + 1));
    }

    let mut lower = vec![0.0; row_start[n]];
    for i in 0..n {
        let (cols, vals) = m.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j <= i {
                lower[row_start[i] + j - first_col[i]] = v;
            }
        }
    }

    let max_diag = m.diagonal().into_iter().fold(0.0f64, f64::max);
    let floor = PIVOT_FLOOR * max_diag;

    for i in 0..n {
        let fi = first_col[i];
        let base_i = row_start[i];
        for j in fi..i {
            let fj = first_col[j];
            let base_j = row_start[j];
            let k0 = fi.max(fj);
            let mut s = lower[base_i + j - fi];
            for k in k0..j {
                s -= lower[base_i + k - fi] * lower[base_j + k - fj];
            }
            lower[base_i + j - fi] = s / lower[base_j + j - fj];
        }
        let mut d = lower[base_i + i - fi];
        for k in fi..i {
            let l = lower[base_i + k - fi];
            d -= l * l;
        }
        if !(d > floor) {
            return Err(Error::NotSpd { row: i, pivot: d });
        }
        lower[base_i + i - fi] = d.sqrt();
    }

    Ok(CholeskyFactor {
        dim: n,
        first_col,
        row_start,
        lower,
        source_tag: tag.to_string(),
    })
}

/// Solves `M x = r` with a precomputed factor.
pub fn solve_chol(f: &CholeskyFactor, r: &[f64]) -> Result<Vec<f64>> {
    f.solve(r)
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    /// Number of stored entries of `L`.
    pub fn stored_entries(&self) -> usize {
        self.lower.len()
    }

    /// Entry `L_ij`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || j < self.first_col[i] {
            0.0
        } else {
            self.lower[self.row_start[i] + j - self.first_col[i]]
        }
    }

    pub fn lower_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in self.first_col[i]..=i {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// Solves `L y = r` in place.
    pub fn forward_in_place(&self, r: &mut [f64]) {
        for i in 0..self.dim {
            let fi = self.first_col[i];
            let row = &self.lower[self.row_start[i]..self.row_start[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            let s: f64 = off.iter().zip(&r[fi..i]).map(|(l, x)| l * x).sum();
            r[i] = (r[i] - s) / diag[0];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let fi = self.first_col[i];
            let row = &self.lower[self.row_start[i]..self.row_start[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            let xi = y[i] / diag[0];
            y[i] = xi;
            for (yk, l) in y[fi..i].iter_mut().zip(off) {
                *yk -= l * xi;
            }
        }
    }

    pub fn solve_lower(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("solve_lower", self.dim, r.len())?;
        let mut x = r.to_vec();
        self.forward_in_place(&mut x);
        Ok(x)
    }

    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("solve_chol", self.dim, r.len())?;
        let mut x = r.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        Ok(x)
    }
}

/// Dense Cholesky of a symmetric positive definite matrix, same pivot rule.
pub fn cholesky_dense(m: &DenseMatrix) -> Result<CholeskyFactor> {
    cholesky_tagged(&SparseMatrix::from_dense(m), "dense")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SparseMatrix {
        SparseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn scalar_factor() {
        let f = cholesky(&m(&[&[4.0]])).unwrap();
        assert_eq!(f.get(0, 0), 2.0);
        assert_eq!(solve_chol(&f, &[8.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn two_by_two_factor_reconstructs() {
        let a = m(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let f = cholesky(&a).unwrap();
        assert_eq!(f.get(0, 0), 2.0);
        assert_eq!(f.get(1, 0), 1.0);
        assert!((f.get(1, 1) - 2f64.sqrt()).abs() < 1e-15);
        let l = f.lower_dense();
        let rebuilt = l.matmul(&l.transpose()).unwrap();
        let err = rebuilt
            .add_scaled(-1.0, &a.to_dense())
            .unwrap()
            .frobenius_norm();
        assert!(err <= 1e-12 * a.to_dense().frobenius_norm());
        let x = solve_chol(&f, &[6.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_solve() {
        let f = cholesky(&SparseMatrix::identity(3)).unwrap();
        assert_eq!(
            solve_chol(&f, &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert!(matches!(
            solve_chol(&f, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn indefinite_is_rejected() {
        assert!(matches!(
            cholesky(&m(&[&[1.0, 2.0], &[2.0, 1.0]])),
            Err(Error::NotSpd { row: 1, .. })
        ));
    }

    #[test]
    fn asymmetric_is_rejected() {
        assert!(matches!(
            cholesky(&m(&[&[2.0, 1.0], &[0.0, 2.0]])),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn envelope_skips_leading_zeros() {
        // tridiagonal: row 2 starts at column 1
        let a = m(&[&[4.0, 1.0, 0.0], &[1.0, 4.0, 1.0], &[0.0, 1.0, 4.0]]);
        let f = cholesky(&a).unwrap();
        assert_eq!(f.stored_entries(), 5);
        let x = f.solve(&a.spmv(&[1.0, -2.0, 3.0]).unwrap()).unwrap();
        for (xi, ei) in x.iter().zip([1.0, -2.0, 3.0]) {
            assert!((xi - ei).abs() < 1e-14);
        }
    }
}
