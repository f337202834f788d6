//! Compressed sparse row matrices and the handful of kernels the solvers need.

use crate::error::{check_len, Error, Result};
use crate::linalg::DenseMatrix;

/// A real matrix in compressed sparse row layout.
///
/// Column indices are strictly increasing within each row; duplicates are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, validating every layout invariant.
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidMatrix("row_offsets[0] must be 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[nrows] != values.len() {
            return Err(Error::InvalidMatrix(
                "row_offsets, col_indices and values disagree on nnz".into(),
            ));
        }
        for i in 0..nrows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(Error::InvalidMatrix(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let cols = &col_indices[start..end];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "columns of row {i} are not strictly increasing"
                )));
            }
            if let Some(&c) = cols.last() {
                if c >= ncols {
                    return Err(Error::InvalidMatrix(format!(
                        "column {c} out of range in row {i}"
                    )));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles a matrix from `(row, col, value)` triplets, summing repeated
    /// coordinates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in &row {
                if col_indices.len() > row_offsets[i] && *col_indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Stores every nonzero of a dense matrix.
    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let v = dense[(i, j)];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(dense.nrows(), dense.ncols(), &triplets)
            .expect("dense indices are in range")
    }

    /// Row-major helper for small hand-written matrices.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let values: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Self::from_dense(&DenseMatrix::from_row_major(
            nrows, ncols, values,
        )?))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// `y = M x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("spmv", self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = M x` without allocation; lengths are the caller's responsibility.
    pub(crate) fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// `y = Mᵀ x`.
    pub fn spmv_t(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("spmv_t", self.nrows, x.len())?;
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_indices[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// The Gram matrix `M Mᵀ`.
    ///
    /// Entry `(i, j)` accumulates `m_ik m_jk` over the shared columns `k` in
    /// increasing order, so the result is bitwise symmetric.
    pub fn gram(&self) -> SparseMatrix {
        let t = self.transpose();
        let m = self.nrows;
        let mut acc = vec![0.0; m];
        let mut touched = vec![usize::MAX; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_offsets = Vec::with_capacity(m + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..m {
            pattern.clear();
            let (cols, vals) = self.row(i);
            for (&k, &bik) in cols.iter().zip(vals) {
                let (rows_k, vals_k) = t.row(k);
                for (&j, &bjk) in rows_k.iter().zip(vals_k) {
                    if touched[j] != i {
                        touched[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += bik * bjk;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                col_indices.push(j);
                values.push(acc[j]);
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix {
            nrows: m,
            ncols: m,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// `αI + M` for square `M`.
    pub fn shift_diag(&self, alpha: f64) -> Result<SparseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        let mut triplets: Vec<(usize, usize, f64)> = self.triplets().collect();
        triplets.extend((0..self.nrows).map(|i| (i, i, alpha)));
        SparseMatrix::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// `s M`.
    pub fn scaled(&self, s: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Removes the first `k` rows.
    pub fn drop_leading_rows(&self, k: usize) -> Result<SparseMatrix> {
        if k > self.nrows {
            return Err(Error::InvalidMatrix(format!(
                "cannot drop {k} rows from a matrix with {} rows",
                self.nrows
            )));
        }
        let base = self.row_offsets[k];
        Ok(SparseMatrix {
            nrows: self.nrows - k,
            ncols: self.ncols,
            row_offsets: self.row_offsets[k..].iter().map(|&o| o - base).collect(),
            col_indices: self.col_indices[base..].to_vec(),
            values: self.values[base..].to_vec(),
        })
    }

    /// Largest entrywise `|M_ij - M_ji|` relative to the largest `|M_ij|`.
    pub fn relative_asymmetry(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        let scale = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return Ok(0.0);
        }
        let t = self.transpose();
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = t.row(i);
            // merge two sorted rows
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let d = match (ca.get(p), cb.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        va[p - 1] - vb[q - 1]
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        va[p - 1]
                    }
                    (Some(_), None) => {
                        p += 1;
                        va[p - 1]
                    }
                    _ => {
                        q += 1;
                        vb[q - 1]
                    }
                };
                worst = worst.max(d.abs());
            }
        }
        Ok(worst / scale)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }
}
