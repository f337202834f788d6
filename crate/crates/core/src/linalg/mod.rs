//! Sparse and dense kernels, SPD solvers and small eigenvalue routines.

pub mod cg;
pub mod cholesky;
pub mod dense;
pub mod eigen;
pub mod power;
pub mod sparse;

pub use cg::{cg_solve, CgOutcome};
pub use cholesky::{cholesky, cholesky_dense, cholesky_tagged, solve_chol, CholeskyFactor};
pub use dense::{DenseMatrix, Lu};
pub use eigen::{sym_eigen, sym_eigs, SymEigen};
pub use power::power_radius;
pub use sparse::SparseMatrix;

/// Dense verification paths refuse systems larger than this (`n + m`).
pub const DENSE_LIMIT: usize = 2000;
