//! The block saddle point system `[[A, Bᵀ], [-B, 0]] [x; y] = [f; g]`.

use crate::error::{check_len, Error, Result};
use crate::linalg::{cholesky, DenseMatrix, SparseMatrix, DENSE_LIMIT};

/// A pair of vectors `(x, y)` matching the velocity and pressure blocks.
///
/// Whenever a flat layout is needed (files, dense assembly) the order is
/// `x` followed by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BlockVector {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; m],
        }
    }

    pub fn ones(n: usize, m: usize) -> Self {
        Self {
            x: vec![1.0; n],
            y: vec![1.0; m],
        }
    }

    /// Splits a flat `[x; y]` vector after `n` entries.
    pub fn from_flat(flat: &[f64], n: usize) -> Self {
        Self {
            x: flat[..n].to_vec(),
            y: flat[n..].to_vec(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same_shape(&self, other: &BlockVector) -> bool {
        self.x.len() == other.x.len() && self.y.len() == other.y.len()
    }

    pub fn dot(&self, other: &BlockVector) -> f64 {
        let dx: f64 = self.x.iter().zip(&other.x).map(|(a, b)| a * b).sum();
        let dy: f64 = self.y.iter().zip(&other.y).map(|(a, b)| a * b).sum();
        dx + dy
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &BlockVector) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a += s * b;
        }
        for (a, b) in self.y.iter_mut().zip(&other.y) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.x
            .iter_mut()
            .chain(self.y.iter_mut())
            .for_each(|v| *v *= s);
    }

    pub fn scaled(&self, s: f64) -> BlockVector {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self - other`.
    pub fn sub(&self, other: &BlockVector) -> BlockVector {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }
}

/// A linear operator acting on block vectors.
pub trait BlockOperator {
    fn block_dims(&self) -> (usize, usize);
    fn apply(&self, u: &BlockVector) -> Result<BlockVector>;
}

/// `[[A, Bᵀ], [-B, 0]]` with right-hand side `(f, g)`.
#[derive(Debug, Clone)]
pub struct SaddlePointSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub label: String,
}

/// Result of one structural check run by [`SaddlePointSystem::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Per-check pass/fail of the system assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub shape: CheckOutcome,
    pub a_spd: CheckOutcome,
    pub b_full_rank: CheckOutcome,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> [&CheckOutcome; 3] {
        [&self.shape, &self.a_spd, &self.b_full_rank]
    }

    /// Converts a failed report into an error naming every failing check.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let msg = self
            .checks()
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidSystem(msg))
    }
}

impl SaddlePointSystem {
    /// Builds a system with a zero right-hand side.
    pub fn new(a: SparseMatrix, b: SparseMatrix, label: impl Into<String>) -> Self {
        let (n, m) = (a.nrows(), b.nrows());
        Self {
            a,
            b,
            f: vec![0.0; n],
            g: vec![0.0; m],
            label: label.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n() + self.m()
    }

    pub fn rhs(&self) -> BlockVector {
        BlockVector::new(self.f.clone(), self.g.clone())
    }

    fn check_shape(&self, u: &BlockVector) -> Result<()> {
        check_len("saddle x block", self.n(), u.x.len())?;
        check_len("saddle y block", self.m(), u.y.len())
    }

    /// `(A x + Bᵀ y, -B x)`.
    pub fn apply_saddle(&self, u: &BlockVector) -> Result<BlockVector> {
        self.check_shape(u)?;
        let mut top = self.a.spmv(&u.x)?;
        let bty = self.b.spmv_t(&u.y)?;
        for (t, v) in top.iter_mut().zip(bty) {
            *t += v;
        }
        let mut bottom = self.b.spmv(&u.x)?;
        bottom.iter_mut().for_each(|v| *v = -*v);
        Ok(BlockVector::new(top, bottom))
    }

    /// Runs the shape, SPD and full-rank checks without failing early.
    ///
    /// The shape check accepts `m == n` (square nonsingular `B`), which the
    /// 1×1 toy systems rely on.
    pub fn validate(&self) -> ValidationReport {
        let (n, m) = (self.n(), self.m());
        let shape_ok = self.a.is_square()
            && self.b.ncols() == n
            && m <= n
            && self.f.len() == n
            && self.g.len() == m;
        let shape = CheckOutcome {
            name: "shape",
            passed: shape_ok,
            detail: format!(
                "A is {}x{}, B is {}x{}, f has {}, g has {} entries",
                self.a.nrows(),
                self.a.ncols(),
                m,
                self.b.ncols(),
                self.f.len(),
                self.g.len()
            ),
        };
        let a_spd = match cholesky(&self.a) {
            Ok(_) => CheckOutcome {
                name: "A symmetric positive definite",
                passed: true,
                detail: "Cholesky of A succeeded".into(),
            },
            Err(e) => CheckOutcome {
                name: "A symmetric positive definite",
                passed: false,
                detail: e.to_string(),
            },
        };
        let b_full_rank = match cholesky(&self.b.gram()) {
            Ok(_) => CheckOutcome {
                name: "B full row rank",
                passed: true,
                detail: "Cholesky of B Bᵀ succeeded".into(),
            },
            Err(e) => CheckOutcome {
                name: "B full row rank",
                passed: false,
                detail: format!("B Bᵀ: {e}"),
            },
        };
        ValidationReport {
            shape,
            a_spd,
            b_full_rank,
        }
    }

    /// Sets `(f, g) = 𝒜 · 1` so the exact solution is the all-ones vector,
    /// and returns it.
    pub fn rhs_all_ones(&mut self) -> BlockVector {
        let ones = BlockVector::ones(self.n(), self.m());
        let b = self
            .apply_saddle(&ones)
            .expect("block sizes come from the system itself");
        self.f = b.x.clone();
        self.g = b.y.clone();
        b
    }

    /// The full `(n+m)×(n+m)` coefficient matrix, for desk-scale checks.
    pub fn assemble_dense(&self) -> Result<DenseMatrix> {
        let (n, dim) = (self.n(), self.dim());
        if dim > DENSE_LIMIT {
            return Err(Error::DenseLimitExceeded {
                size: dim,
                limit: DENSE_LIMIT,
            });
        }
        let mut d = DenseMatrix::zeros(dim, dim);
        for (i, j, v) in self.a.triplets() {
            d[(i, j)] = v;
        }
        for (i, j, v) in self.b.triplets() {
            d[(j, n + i)] = v;
            d[(n + i, j)] = -v;
        }
        Ok(d)
    }
}

impl BlockOperator for SaddlePointSystem {
    fn block_dims(&self) -> (usize, usize) {
        (self.n(), self.m())
    }

    fn apply(&self, u: &BlockVector) -> Result<BlockVector> {
        self.apply_saddle(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(rows: &[&[f64]]) -> SparseMatrix {
        SparseMatrix::from_rows(rows).unwrap()
    }

    fn toy() -> SaddlePointSystem {
        SaddlePointSystem::new(sp(&[&[2.0]]), sp(&[&[1.0]]), "toy")
    }

    #[test]
    fn apply_examples() {
        let u = BlockVector::new(vec![1.0], vec![1.0]);
        assert_eq!(
            toy().apply_saddle(&u).unwrap(),
            BlockVector::new(vec![3.0], vec![-1.0])
        );
        let zero = BlockVector::zeros(1, 1);
        assert_eq!(toy().apply_saddle(&zero).unwrap(), zero);

        let s = SaddlePointSystem::new(SparseMatrix::identity(2), sp(&[&[1.0, 0.0]]), "s");
        let u = BlockVector::new(vec![1.0, 2.0], vec![3.0]);
        assert_eq!(
            s.apply_saddle(&u).unwrap(),
            BlockVector::new(vec![4.0, 2.0], vec![-1.0])
        );
        assert!(s.apply_saddle(&BlockVector::zeros(1, 1)).is_err());
    }

    #[test]
    fn rhs_examples() {
        let mut s = toy();
        s.rhs_all_ones();
        assert_eq!((s.f.clone(), s.g.clone()), (vec![3.0], vec![-1.0]));

        let mut s = SaddlePointSystem::new(SparseMatrix::identity(2), sp(&[&[1.0, 1.0]]), "s");
        s.rhs_all_ones();
        assert_eq!((s.f.clone(), s.g.clone()), (vec![2.0, 2.0], vec![-2.0]));

        let mut s = SaddlePointSystem::new(
            SparseMatrix::from_diagonal(&[1.0, 3.0]),
            sp(&[&[0.0, 1.0]]),
            "s",
        );
        s.rhs_all_ones();
        assert_eq!((s.f.clone(), s.g.clone()), (vec![1.0, 4.0], vec![-1.0]));
    }

    #[test]
    fn validation_examples() {
        assert!(toy().validate().passed());

        let s = SaddlePointSystem::new(sp(&[&[2.0, 0.0], &[0.0, 2.0]]), sp(&[&[1.0, 0.0]]), "ok");
        assert!(s.validate().passed());

        let s = SaddlePointSystem::new(
            sp(&[&[1.0, 2.0], &[2.0, 1.0]]),
            sp(&[&[1.0, 0.0]]),
            "indefinite",
        );
        let r = s.validate();
        assert!(!r.a_spd.passed && r.shape.passed && r.b_full_rank.passed);

        let b = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0)]).unwrap();
        let s = SaddlePointSystem::new(SparseMatrix::identity(3), b, "zero row");
        let r = s.validate();
        assert!(!r.b_full_rank.passed);
        assert!(r.b_full_rank.detail.contains("not positive definite"));
        assert!(s.validate().into_result().is_err());
    }

    #[test]
    fn dense_assembly_layout() {
        let d = toy().assemble_dense().unwrap();
        assert_eq!(d.values(), &[2.0, 1.0, -1.0, 0.0]);
    }
}
