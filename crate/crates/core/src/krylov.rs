//! Restarted GMRES with left preconditioning.
//!
//! Arnoldi uses one pass of modified Gram-Schmidt; the small least-squares
//! problem is kept triangular with Givens rotations, so the preconditioned
//! residual norm `‖P⁻¹(b - 𝒜u_k)‖₂` is available at every inner step without
//! forming `u_k`.

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::precond::Preconditioner;
use crate::saddle::{BlockOperator, BlockVector};

/// Subdiagonal entries below this (relative to `‖P⁻¹𝒜 v_j‖`) end the cycle
/// as a lucky breakdown.
pub const LUCKY_BREAKDOWN_TOL: f64 = 1e-14;
/// A full cycle that reduces the residual by less than this (relative) is
/// reported as a breakdown.
pub const STAGNATION_TOL: f64 = 1e-16;

/// Which residual measure the stopping test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// `‖P⁻¹ r_k‖₂ ≤ tol ‖P⁻¹ b‖₂`, the left-preconditioned residual.
    Preconditioned,
    /// `‖P r_k‖₂ ≤ tol ‖P b‖₂`, the preconditioner matrix times the true
    /// residual. Needs the iterate at every step, so it is much slower.
    Literal,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preconditioned" => Ok(StopRule::Preconditioned),
            "literal" => Ok(StopRule::Literal),
            other => Err(Error::InvalidConfig(format!("unknown stop rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresConfig {
    /// Krylov dimension per cycle.
    pub restart: usize,
    pub rel_tol: f64,
    /// Maximum number of started cycles.
    pub max_restarts: usize,
    pub max_seconds: f64,
    pub record_history: bool,
    pub stop_rule: StopRule,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            restart: 30,
            rel_tol: 1e-12,
            max_restarts: 500,
            max_seconds: 3600.0,
            record_history: true,
            stop_rule: StopRule::Preconditioned,
        }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart < 1 {
            return Err(Error::InvalidConfig("restart must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_restarts < 1 {
            return Err(Error::InvalidConfig(
                "max_restarts must be at least 1".into(),
            ));
        }
        if !(self.max_seconds > 0.0) {
            return Err(Error::InvalidConfig("max_seconds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxRestarts,
    TimeOut,
    Breakdown,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxRestarts => "max_restarts",
            Termination::TimeOut => "timeout",
            Termination::Breakdown => "breakdown",
        }
    }
}

/// Outcome of one GMRES(m) run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub converged: bool,
    /// Number of started cycles (the "IT" column of benchmark tables).
    pub restarts: usize,
    pub total_inner_iterations: usize,
    /// Relative residual from the least-squares recurrence at exit.
    pub final_relres: f64,
    /// Relative residual recomputed from the returned iterate.
    pub true_relres: f64,
    pub wall_seconds: f64,
    /// Relative residuals: the start of each cycle, then one per inner step.
    pub residual_history: Vec<f64>,
    /// Index into `residual_history` where each cycle begins.
    pub cycle_starts: Vec<usize>,
    pub termination: Termination,
}

/// Restarted, left-preconditioned GMRES for `𝒜 u = b` from `x0`.
pub fn gmres<Op, Pc>(
    op: &Op,
    pc: &Pc,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &GmresConfig,
) -> Result<(BlockVector, SolveReport)>
where
    Op: BlockOperator + ?Sized,
    Pc: Preconditioner + ?Sized,
{
    cfg.validate()?;
    let (n, m) = op.block_dims();
    check_len("gmres rhs x block", n, b.x.len())?;
    check_len("gmres rhs y block", m, b.y.len())?;
    check_len("gmres x0 x block", n, x0.x.len())?;
    check_len("gmres x0 y block", m, x0.y.len())?;

    let clock = Instant::now();
    let literal = cfg.stop_rule == StopRule::Literal;
    let measure = |r: &BlockVector, z: &BlockVector| -> Result<f64> {
        if literal {
            Ok(pc.apply_forward(r)?.norm())
        } else {
            Ok(z.norm())
        }
    };

    let pb = pc.apply_inverse(b)?;
    let reference = measure(b, &pb)?;
    let mut x = x0.clone();
    let mut history = Vec::new();
    let mut cycle_starts = Vec::new();
    let mut restarts = 0usize;
    let mut inner_total = 0usize;

    let report = |x: BlockVector,
                  restarts: usize,
                  inner: usize,
                  true_relres: f64,
                  history: Vec<f64>,
                  cycle_starts: Vec<usize>,
                  termination: Termination| {
        let final_relres = history.last().copied().unwrap_or(true_relres);
        let rep = SolveReport {
            converged: termination == Termination::Converged,
            restarts,
            total_inner_iterations: inner,
            final_relres,
            true_relres,
            wall_seconds: clock.elapsed().as_secs_f64(),
            residual_history: history,
            cycle_starts,
            termination,
        };
        Ok((x, rep))
    };

    if reference == 0.0 {
        // b = 0: the zero vector is the exact solution.
        return report(
            BlockVector::zeros(n, m),
            0,
            0,
            0.0,
            history,
            cycle_starts,
            Termination::Converged,
        );
    }

    loop {
        let r = b.sub(&op.apply(&x)?);
        let z = pc.apply_inverse(&r)?;
        let beta = z.norm();
        let true_relres = measure(&r, &z)? / reference;
        if true_relres <= cfg.rel_tol {
            if history.is_empty() {
                history.push(true_relres);
            }
            return report(
                x,
                restarts,
                inner_total,
                true_relres,
                history,
                cycle_starts,
                Termination::Converged,
            );
        }
        if restarts >= cfg.max_restarts {
            return report(
                x,
                restarts,
                inner_total,
                true_relres,
                history,
                cycle_starts,
                Termination::MaxRestarts,
            );
        }
        if clock.elapsed().as_secs_f64() > cfg.max_seconds {
            return report(
                x,
                restarts,
                inner_total,
                true_relres,
                history,
                cycle_starts,
                Termination::TimeOut,
            );
        }

        restarts += 1;
        cycle_starts.push(history.len());
        history.push(true_relres);
        let cycle_start_relres = true_relres;

        let k_max = cfg.restart;
        let mut basis: Vec<BlockVector> = Vec::with_capacity(k_max + 1);
        basis.push(z.scaled(1.0 / beta));
        // column-major Hessenberg: hess[j] holds column j (length j + 2)
        let mut hess: Vec<Vec<f64>> = Vec::with_capacity(k_max);
        let mut cs: Vec<f64> = Vec::with_capacity(k_max);
        let mut sn: Vec<f64> = Vec::with_capacity(k_max);
        let mut g = vec![0.0; k_max + 1];
        g[0] = beta;
        let mut steps = 0usize;
        let mut relres = true_relres;
        let mut timed_out = false;

        for j in 0..k_max {
            let mut w = pc.apply_inverse(&op.apply(&basis[j])?)?;
            inner_total += 1;
            let w_norm0 = w.norm();
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let h = w.dot(v);
                col[i] = h;
                w.axpy(-h, v);
            }
            let h_next = w.norm();
            col[j + 1] = h_next;

            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[j], col[j + 1]);
            col[j] = c * col[j] + s * col[j + 1];
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g[j + 1] = -s * g[j];
            g[j] *= c;
            hess.push(col);
            steps = j + 1;

            let lucky = h_next <= LUCKY_BREAKDOWN_TOL * w_norm0;
            relres = if literal {
                let y = back_substitute(&hess, &g, steps);
                let mut xk = x.clone();
                for (v, yi) in basis.iter().zip(&y) {
                    xk.axpy(*yi, v);
                }
                let rk = b.sub(&op.apply(&xk)?);
                pc.apply_forward(&rk)?.norm() / reference
            } else {
                g[j + 1].abs() / reference
            };
            if cfg.record_history {
                history.push(relres);
            }
            if relres <= cfg.rel_tol || lucky {
                break;
            }
            if clock.elapsed().as_secs_f64() > cfg.max_seconds {
                timed_out = true;
                break;
            }
            basis.push(w.scaled(1.0 / h_next));
        }

        let y = back_substitute(&hess, &g, steps);
        for (v, yi) in basis.iter().zip(&y) {
            x.axpy(*yi, v);
        }
        if !cfg.record_history {
            history.push(relres);
        }

        if timed_out {
            let r = b.sub(&op.apply(&x)?);
            let z = pc.apply_inverse(&r)?;
            let true_relres = measure(&r, &z)? / reference;
            let termination = if true_relres <= cfg.rel_tol {
                Termination::Converged
            } else {
                Termination::TimeOut
            };
            return report(
                x,
                restarts,
                inner_total,
                true_relres,
                history,
                cycle_starts,
                termination,
            );
        }
        if cycle_start_relres - relres < STAGNATION_TOL * cycle_start_relres {
            let r = b.sub(&op.apply(&x)?);
            let z = pc.apply_inverse(&r)?;
            let true_relres = measure(&r, &z)? / reference;
            if true_relres > cfg.rel_tol {
                return report(
                    x,
                    restarts,
                    inner_total,
                    true_relres,
                    history,
                    cycle_starts,
                    Termination::Breakdown,
                );
            }
        }
    }
}

/// GMRES without restarting: the Krylov dimension is `n + m`.
pub fn gmres_full<Op, Pc>(
    op: &Op,
    pc: &Pc,
    b: &BlockVector,
    x0: &BlockVector,
    rel_tol: f64,
) -> Result<(BlockVector, SolveReport)>
where
    Op: BlockOperator + ?Sized,
    Pc: Preconditioner + ?Sized,
{
    let (n, m) = op.block_dims();
    let cfg = full_config(n + m, rel_tol);
    gmres(op, pc, b, x0, &cfg)
}

/// The configuration [`gmres_full`] runs with.
pub fn full_config(dim: usize, rel_tol: f64) -> GmresConfig {
    GmresConfig {
        restart: dim.max(1),
        rel_tol,
        ..GmresConfig::default()
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

fn back_substitute(hess: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (jj, yj) in y.iter().enumerate().take(k).skip(i + 1) {
            s -= hess[jj][i] * yj;
        }
        y[i] = s / hess[i][i];
    }
    y
}
