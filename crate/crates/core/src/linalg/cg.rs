use crate::error::{Error, Result};

/// Solution and iteration count of a conjugate gradient solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
}

/// Plain conjugate gradients from a zero initial guess.
///
/// Stops once `‖r - M x‖₂ ≤ tol ‖r‖₂` (recurrence residual). Fails with
/// `BreakdownNonSpd` as soon as a search direction has `pᵀMp ≤ 0`.
pub fn cg_solve<F>(mut apply_m: F, rhs: &[f64], tol: f64, maxit: usize) -> Result<CgOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "CG tolerance must be positive, got {tol}"
        )));
    }
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
        });
    }
    let target = tol * rhs_norm;
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);

    for it in 1..=maxit {
        let mp = apply_m(&p)?;
        let curvature = dot(&p, &mp);
        if curvature <= 0.0 {
            return Err(Error::BreakdownNonSpd { iteration: it });
        }
        let step = rr / curvature;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * mp[i];
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= target {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
            });
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::MaxIterations {
        iterations: maxit,
        residual: rr.sqrt() / rhs_norm,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    fn op(m: &SparseMatrix) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
        move |x| m.spmv(x)
    }

    #[test]
    fn identity_converges_in_one_step() {
        let id = SparseMatrix::identity(4);
        let r = [1.0, -2.0, 0.5, 3.0];
        let out = cg_solve(op(&id), &r, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.solution, r.to_vec());
    }

    #[test]
    fn diagonal_terminates_within_dimension() {
        let d = SparseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let out = cg_solve(op(&d), &[1.0, 2.0, 3.0], 1e-12, 10).unwrap();
        assert!(out.iterations <= 3);
        for v in out.solution {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_breaks_down() {
        let m = SparseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(matches!(
            cg_solve(op(&m), &[1.0, 0.0], 1e-12, 10),
            Err(Error::BreakdownNonSpd { .. })
        ));
    }

    #[test]
    fn maxit_is_reported() {
        let d = SparseMatrix::from_diagonal(&[1.0, 10.0, 100.0, 1000.0]);
        assert!(matches!(
            cg_solve(op(&d), &[1.0; 4], 1e-14, 1),
            Err(Error::MaxIterations { iterations: 1, .. })
        ));
    }

    #[test]
    fn zero_rhs() {
        let d = SparseMatrix::identity(2);
        let out = cg_solve(op(&d), &[0.0, 0.0], 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.solution, vec![0.0, 0.0]);
    }
}
