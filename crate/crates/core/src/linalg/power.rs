//! Power iteration for the spectral radius of a linear operator.

use crate::error::{Error, Result};
use crate::linalg::cg::norm;

/// Iterates whose norm falls below this are treated as annihilated.
pub const ZERO_ITERATE_FLOOR: f64 = 1e-14;
/// Consecutive steps whose estimates must agree to `tol` before stopping.
pub const CONFIRM_STEPS: usize = 10;

/// Estimates `ρ(T)` by power iteration on the action `apply_t`.
///
/// The start vector is fixed (all ones plus an index ramp of size 1e-3) so
/// runs are reproducible. Each step yields the norm ratio `‖T x_k‖` for a
/// unit `x_k`; the estimate is the geometric mean of two successive ratios,
/// which also settles when the dominant eigenvalues are a `±λ` pair.
/// Stops once [`CONFIRM_STEPS`] successive estimates agree to `tol` relative.
/// Returns `0` when the iterate collapses (nilpotent-dominant action).
pub fn power_radius<F>(mut apply_t: F, dim: usize, tol: f64, maxit: usize) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if dim == 0 {
        return Err(Error::InvalidConfig(
            "power iteration needs dim >= 1".into(),
        ));
    }
    let mut x: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 1e-3 * (i + 1) as f64 / dim as f64)
        .collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut prev_ratio: Option<f64> = None;
    let mut prev_estimate: Option<f64> = None;
    let mut agreed = 0;
    for _ in 0..maxit {
        let y = apply_t(&x)?;
        let ratio = norm(&y);
        if !(ratio > ZERO_ITERATE_FLOOR) {
            return Ok(0.0);
        }
        let estimate = match prev_ratio {
            Some(p) => (p * ratio).sqrt(),
            None => ratio,
        };
        if let Some(pe) = prev_estimate {
            if (estimate - pe).abs() <= tol * estimate {
                agreed += 1;
                if agreed >= CONFIRM_STEPS {
                    return Ok(estimate);
                }
            } else {
                agreed = 0;
            }
        }
        prev_ratio = Some(ratio);
        prev_estimate = Some(estimate);
        x = y.into_iter().map(|v| v / ratio).collect();
    }
    Err(Error::MaxIterations {
        iterations: maxit,
        residual: prev_estimate.unwrap_or(f64::NAN),
    })
}
