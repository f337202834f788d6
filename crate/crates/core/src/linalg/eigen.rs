//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Sweeps are stopped once the off-diagonal Frobenius norm falls below
/// `OFF_DIAGONAL_TOL * ‖M‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigs(m: &DenseMatrix) -> Result<Vec<f64>> {
    jacobi(m, false).map(|e| e.values)
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
pub fn sym_eigen(m: &DenseMatrix) -> Result<SymEigen> {
    jacobi(m, true)
}

fn jacobi(m: &DenseMatrix, want_vectors: bool) -> Result<SymEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    let asymmetry = m.relative_asymmetry();
    if asymmetry > crate::linalg::cholesky::SYMMETRY_TOL {
        return Err(Error::Asymmetric { asymmetry });
    }
    let n = m.nrows();
    let mut a = m.symmetrized();
    let mut v = if want_vectors {
        DenseMatrix::identity(n)
    } else {
        DenseMatrix::zeros(0, 0)
    };
    let target = OFF_DIAGONAL_TOL * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[(k, p)] = new_p;
                    a[(p, k)] = new_p;
                    a[(k, q)] = new_q;
                    a[(q, k)] = new_q;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                if want_vectors {
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::MaxIterations {
            iterations: MAX_SWEEPS,
            residual: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = if want_vectors {
        let mut sorted = DenseMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, dst)] = v[(k, src)];
            }
        }
        sorted
    } else {
        v
    };
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}
