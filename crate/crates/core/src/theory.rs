//! The REHSS stationary iteration and the convergence bounds around it.
//!
//! Iterative paths only use the action of `Γ = I - P⁻¹𝒜`. Everything that
//! needs eigenvalues of `Q`, `A`, `BBᵀ` or `(BBᵀ)⁻¹BA⁻¹Bᵀ` assembles small
//! dense matrices and is guarded by [`DENSE_LIMIT`].

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::{
    cholesky, cholesky_tagged, power_radius, sym_eigs, CholeskyFactor, DenseMatrix, SparseMatrix,
    DENSE_LIMIT,
};
use crate::precond::{build_precond, InnerStrategy, PrecondContext, PrecondKind};
use crate::saddle::{BlockVector, SaddlePointSystem};

/// Residual growth (relative to the starting residual) treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Power-method settings used by [`rhss_radius`].
pub const RHSS_RADIUS_TOL: f64 = 1e-12;
pub const RHSS_RADIUS_MAXIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceBounds {
    /// `λ_max(Q)` with `Q = B(½A⁻¹ - I)Bᵀ`.
    pub delta: f64,
    /// `½σ_max(B)²/λ_min(A) - σ_min(B)²`.
    pub theta: f64,
    pub lambda_min_a: f64,
    pub lambda_max_a: f64,
    pub sigma_min_b: f64,
    pub sigma_max_b: f64,
    /// Extreme eigenvalues of `(BBᵀ)⁻¹BA⁻¹Bᵀ`.
    pub mu1: f64,
    pub mu_m: f64,
    pub alpha_opt_rhss: f64,
    /// `2/μ₁`, the end of the RHSS convergence interval.
    pub rhss_upper: f64,
    /// `λ_min(A) > ½κ(B)²`.
    pub corollary_holds: bool,
}

impl ConvergenceBounds {
    /// `σ_max(B)/σ_min(B)`.
    pub fn kappa_b(&self) -> f64 {
        self.sigma_max_b / self.sigma_min_b
    }

    /// REHSS stationary iteration converges for every `α` above this.
    pub fn rehss_alpha_floor(&self) -> f64 {
        self.delta.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub converged: bool,
    pub iterations: usize,
    /// `‖b - 𝒜u^k‖₂/‖b‖₂` for `k = 0..=iterations`.
    pub error_history: Vec<f64>,
    /// Ratio of the last two history entries.
    pub rho_estimate: f64,
}

/// `Γ_REHSS u = u - P⁻¹𝒜u` without forming `Γ`.
pub fn gamma_action(ctx: &PrecondContext<'_>, u: &BlockVector) -> Result<BlockVector> {
    let au = ctx.system().apply_saddle(u)?;
    let z = ctx.apply_rehss(&au)?;
    Ok(u.sub(&z))
}

/// Fixed-point iteration `u ← u + P_REHSS⁻¹(b - 𝒜u)` on the system's
/// right-hand side.
pub fn rehss_iterate(
    sys: &SaddlePointSystem,
    alpha: f64,
    u0: &BlockVector,
    tol: f64,
    maxit: usize,
) -> Result<(BlockVector, IterationReport)> {
    rehss_iterate_with_limit(sys, alpha, u0, tol, maxit, DIVERGENCE_FACTOR)
}

/// As [`rehss_iterate`] with a custom divergence threshold.
pub fn rehss_iterate_with_limit(
    sys: &SaddlePointSystem,
    alpha: f64,
    u0: &BlockVector,
    tol: f64,
    maxit: usize,
    divergence_factor: f64,
) -> Result<(BlockVector, IterationReport)> {
    if !(divergence_factor > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "divergence factor must exceed 1, got {divergence_factor}"
        )));
    }
    check_len("rehss_iterate x0", sys.n(), u0.x.len())?;
    check_len("rehss_iterate y0", sys.m(), u0.y.len())?;
    let ctx = build_precond(sys, PrecondKind::Rehss, alpha, InnerStrategy::direct())?;
    let b = sys.rhs();
    let b_norm = b.norm();
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };

    let mut u = u0.clone();
    let mut r = b.sub(&sys.apply_saddle(&u)?);
    let r0 = r.norm();
    let mut history = vec![r0 / scale];
    let mut iterations = 0;
    let mut converged = history[0] <= tol;

    while !converged && iterations < maxit {
        let z = ctx.apply_rehss(&r)?;
        u.axpy(1.0, &z);
        r = b.sub(&sys.apply_saddle(&u)?);
        iterations += 1;
        let rn = r.norm();
        history.push(rn / scale);
        if !rn.is_finite() || (r0 > 0.0 && rn > divergence_factor * r0) {
            return Err(Error::Diverged {
                iteration: iterations,
                growth: rn / r0,
            });
        }
        converged = rn / scale <= tol;
    }

    let rho_estimate = match history.as_slice() {
        [.., prev, last] if *prev > 0.0 => last / prev,
        _ => 0.0,
    };
    Ok((
        u,
        IterationReport {
            converged,
            iterations,
            error_history: history,
            rho_estimate,
        },
    ))
}

/// Power-method estimate of `ρ(Γ_REHSS)`.
pub fn spectral_radius_gamma(
    sys: &SaddlePointSystem,
    alpha: f64,
    tol: f64,
    maxit: usize,
) -> Result<f64> {
    let ctx = build_precond(sys, PrecondKind::Rehss, alpha, InnerStrategy::direct())?;
    let n = sys.n();
    power_radius(
        |v| gamma_action(&ctx, &BlockVector::from_flat(v, n)).map(|g| g.to_flat()),
        sys.dim(),
        tol,
        maxit,
    )
}

/// Power-method estimate of `ρ(I - P_RHSS⁻¹𝒜)`.
pub fn rhss_radius(sys: &SaddlePointSystem, alpha: f64) -> Result<f64> {
    rhss_radius_with(sys, alpha, RHSS_RADIUS_TOL, RHSS_RADIUS_MAXIT)
}

pub fn rhss_radius_with(
    sys: &SaddlePointSystem,
    alpha: f64,
    tol: f64,
    maxit: usize,
) -> Result<f64> {
    check_dense(sys)?;
    let ctx = build_precond(sys, PrecondKind::Rhss, alpha, InnerStrategy::direct())?;
    let n = sys.n();
    power_radius(
        |v| {
            let u = BlockVector::from_flat(v, n);
            let z = ctx.apply_rhss(&sys.apply_saddle(&u)?)?;
            Ok(u.sub(&z).to_flat())
        },
        sys.dim(),
        tol,
        maxit,
    )
}

/// Every quantity the stationary theory needs, from dense eigen-solves.
pub fn compute_bounds(sys: &SaddlePointSystem) -> Result<ConvergenceBounds> {
    check_dense(sys)?;
    let chol_a = cholesky_tagged(&sys.a, "A")?;
    let eig_a = sym_eigs(&sys.a.to_dense())?;
    let gram = sys.b.gram();
    let eig_bbt = sym_eigs(&gram.to_dense())?;

    let k = b_ainv_bt(sys, &chol_a)?;
    let q = k
        .scaled(0.5)
        .add_scaled(-1.0, &gram.to_dense())?
        .symmetrized();
    let delta = *sym_eigs(&q)?.last().expect("m >= 1");

    let chol_gram = cholesky_tagged(&gram, "B B^T")?;
    let mu = congruence_eigs(&k, &chol_gram)?;

    let lambda_min_a = eig_a[0];
    let lambda_max_a = *eig_a.last().expect("n >= 1");
    let sigma_min_b = eig_bbt[0].max(0.0).sqrt();
    let sigma_max_b = eig_bbt.last().expect("m >= 1").max(0.0).sqrt();
    let theta = 0.5 * sigma_max_b * sigma_max_b / lambda_min_a - sigma_min_b * sigma_min_b;
    let mu1 = *mu.last().expect("m >= 1");
    let mu_m = mu[0];
    let kappa = sigma_max_b / sigma_min_b;

    Ok(ConvergenceBounds {
        delta,
        theta,
        lambda_min_a,
        lambda_max_a,
        sigma_min_b,
        sigma_max_b,
        mu1,
        mu_m,
        alpha_opt_rhss: 2.0 / (mu1 + mu_m),
        rhss_upper: 2.0 / mu1,
        corollary_holds: lambda_min_a > 0.5 * kappa * kappa,
    })
}

/// Fails with `DenseLimitExceeded` when `n + m` is over [`DENSE_LIMIT`].
pub fn check_dense(sys: &SaddlePointSystem) -> Result<()> {
    check_dense_size(sys.dim(), DENSE_LIMIT)
}

pub(crate) fn check_dense_size(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::DenseLimitExceeded { size, limit })
    } else {
        Ok(())
    }
}

/// `A⁻¹Bᵀ` as a dense `n×m` matrix, one Cholesky solve per column.
pub fn ainv_bt(sys: &SaddlePointSystem, chol_a: &CholeskyFactor) -> Result<DenseMatrix> {
    let (n, m) = (sys.n(), sys.m());
    let bt = sys.b.transpose();
    let mut cols = Vec::with_capacity(m);
    let mut e = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        cols.push(chol_a.solve(&bt.spmv(&e)?)?);
        e[j] = 0.0;
    }
    DenseMatrix::from_columns(n, &cols)
}

/// `BA⁻¹Bᵀ`, symmetrized.
pub fn b_ainv_bt(sys: &SaddlePointSystem, chol_a: &CholeskyFactor) -> Result<DenseMatrix> {
    let x = ainv_bt(sys, chol_a)?;
    Ok(sparse_times_dense(&sys.b, &x)?.symmetrized())
}

/// `S · X` for sparse `S` and dense `X`.
pub fn sparse_times_dense(s: &SparseMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_len("sparse_times_dense", s.ncols(), x.nrows())?;
    let cols: Vec<Vec<f64>> = (0..x.ncols())
        .map(|j| s.spmv(&x.column(j)))
        .collect::<Result<_>>()?;
    DenseMatrix::from_columns(s.nrows(), &cols)
}

/// Eigenvalues (ascending) of `S⁻¹K` for symmetric `K` and `S = LLᵀ`,
/// via the congruent symmetric matrix `L⁻¹KL⁻ᵀ`.
pub fn congruence_eigs(k: &DenseMatrix, chol_s: &CholeskyFactor) -> Result<Vec<f64>> {
    let m = chol_s.dim();
    check_len("congruence_eigs", m, k.nrows())?;
    check_len("congruence_eigs", m, k.ncols())?;
    // W = L⁻¹K, then L⁻¹Wᵀ = L⁻¹KL⁻ᵀ
    let w: Vec<Vec<f64>> = (0..m)
        .map(|j| chol_s.solve_lower(&k.column(j)))
        .collect::<Result<_>>()?;
    let w = DenseMatrix::from_columns(m, &w)?;
    let c: Vec<Vec<f64>> = (0..m)
        .map(|j| chol_s.solve_lower(w.row(j)))
        .collect::<Result<_>>()?;
    let c = DenseMatrix::from_columns(m, &c)?.symmetrized();
    sym_eigs(&c)
}

/// Cholesky of `αI + BBᵀ`, shared by the spectral routines.
pub fn schur_factor(sys: &SaddlePointSystem, alpha: f64) -> Result<CholeskyFactor> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    cholesky(&sys.b.gram().shift_diag(alpha)?)
}
