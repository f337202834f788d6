//! HSS, RHSS and REHSS preconditioners for the saddle point system.
//!
//! With `𝒜 = [[A, Bᵀ], [-B, 0]]` and `α > 0` the three preconditioners are
//!
//! ```text
//! P_HSS   = [[A + αI, Bᵀ + (1/α) A Bᵀ], [-B, αI]]
//! P_RHSS  = [[A,      (1/α) A Bᵀ     ], [-B, 0 ]]
//! P_REHSS = [[A,      A Bᵀ           ], [-B, αI]]
//! ```
//!
//! Each is applied through a block factorization that needs two SPD solves:
//! one with the (1,1) block and one with an `m×m` Schur-type matrix. All
//! factorizations happen once in [`build_precond`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{cg_solve, cholesky_tagged, CholeskyFactor, SparseMatrix};
use crate::saddle::{BlockVector, SaddlePointSystem};

/// Which preconditioner a context applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    None,
    Hss,
    Rhss,
    Rehss,
}

impl PrecondKind {
    pub const ALL: [PrecondKind; 4] = [
        PrecondKind::None,
        PrecondKind::Hss,
        PrecondKind::Rhss,
        PrecondKind::Rehss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Hss => "hss",
            PrecondKind::Rhss => "rhss",
            PrecondKind::Rehss => "rehss",
        }
    }
}

impl fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecondKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(PrecondKind::None),
            "hss" => Ok(PrecondKind::Hss),
            "rhss" => Ok(PrecondKind::Rhss),
            "rehss" => Ok(PrecondKind::Rehss),
            other => Err(Error::InvalidConfig(format!(
                "unknown preconditioner '{other}'"
            ))),
        }
    }
}

/// How the inner SPD systems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerMode {
    Direct,
    Cg,
}

impl FromStr for InnerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(InnerMode::Direct),
            "cg" => Ok(InnerMode::Cg),
            other => Err(Error::InvalidConfig(format!(
                "unknown inner mode '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerStrategy {
    pub mode: InnerMode,
    /// Relative residual target for CG; must lie in `(0, 1e-6]`.
    pub cg_tol: f64,
    /// CG iteration cap; `None` means twice the system dimension.
    pub cg_maxit: Option<usize>,
}

impl Default for InnerStrategy {
    fn default() -> Self {
        Self::direct()
    }
}

impl InnerStrategy {
    pub fn direct() -> Self {
        Self {
            mode: InnerMode::Direct,
            cg_tol: 1e-13,
            cg_maxit: None,
        }
    }

    pub fn cg() -> Self {
        Self {
            mode: InnerMode::Cg,
            ..Self::direct()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == InnerMode::Cg && !(self.cg_tol > 0.0 && self.cg_tol <= 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "cg_tol must lie in (0, 1e-6], got {}",
                self.cg_tol
            )));
        }
        Ok(())
    }
}

/// A prepared solver for one SPD matrix.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Direct(CholeskyFactor),
    Cg {
        matrix: SparseMatrix,
        tol: f64,
        maxit: usize,
    },
}

impl SpdSolver {
    fn build(matrix: SparseMatrix, tag: &str, inner: &InnerStrategy) -> Result<Self> {
        match inner.mode {
            InnerMode::Direct => Ok(SpdSolver::Direct(cholesky_tagged(&matrix, tag)?)),
            InnerMode::Cg => {
                let maxit = inner.cg_maxit.unwrap_or(2 * matrix.nrows().max(1));
                Ok(SpdSolver::Cg {
                    matrix,
                    tol: inner.cg_tol,
                    maxit,
                })
            }
        }
    }

    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Direct(f) => f.solve(r),
            SpdSolver::Cg { matrix, tol, maxit } => {
                check_len("inner CG solve", matrix.nrows(), r.len())?;
                cg_solve(|x| matrix.spmv(x), r, *tol, *maxit).map(|o| o.solution)
            }
        }
    }

    pub fn factor(&self) -> Option<&CholeskyFactor> {
        match self {
            SpdSolver::Direct(f) => Some(f),
            SpdSolver::Cg { .. } => None,
        }
    }
}

/// Anything GMRES can use as a left preconditioner.
pub trait Preconditioner {
    /// `z = P⁻¹ r`.
    fn apply_inverse(&self, r: &BlockVector) -> Result<BlockVector>;
    /// `P z`, used only by the literal stopping rule.
    fn apply_forward(&self, z: &BlockVector) -> Result<BlockVector>;
}

/// A preconditioner bound to one system and one `α`, with its factorizations.
#[derive(Debug, Clone)]
pub struct PrecondContext<'a> {
    sys: &'a SaddlePointSystem,
    kind: PrecondKind,
    alpha: f64,
    inner: InnerStrategy,
    /// `A` (RHSS, REHSS) or `A + αI` (HSS).
    leading: Option<SpdSolver>,
    /// `αI + BBᵀ` (REHSS), `BBᵀ` (RHSS) or `α²I + BBᵀ` (HSS).
    schur: Option<SpdSolver>,
}

/// Computes every factorization needed by `kind`.
pub fn build_precond<'a>(
    sys: &'a SaddlePointSystem,
    kind: PrecondKind,
    alpha: f64,
    inner: InnerStrategy,
) -> Result<PrecondContext<'a>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    inner.validate()?;
    let (leading, schur) = match kind {
        PrecondKind::None => (None, None),
        PrecondKind::Rehss => (
            Some(SpdSolver::build(sys.a.clone(), "A", &inner)?),
            Some(SpdSolver::build(
                sys.b.gram().shift_diag(alpha)?,
                "alpha I + B B^T",
                &inner,
            )?),
        ),
        PrecondKind::Rhss => (
            Some(SpdSolver::build(sys.a.clone(), "A", &inner)?),
            Some(SpdSolver::build(sys.b.gram(), "B B^T", &inner)?),
        ),
        PrecondKind::Hss => (
            Some(SpdSolver::build(
                sys.a.shift_diag(alpha)?,
                "A + alpha I",
                &inner,
            )?),
            Some(SpdSolver::build(
                sys.b.gram().shift_diag(alpha * alpha)?,
                "alpha^2 I + B B^T",
                &inner,
            )?),
        ),
    };
    Ok(PrecondContext {
        sys,
        kind,
        alpha,
        inner,
        leading,
        schur,
    })
}

impl<'a> PrecondContext<'a> {
    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn inner(&self) -> InnerStrategy {
        self.inner
    }

    pub fn system(&self) -> &'a SaddlePointSystem {
        self.sys
    }

    /// Solver for the (1,1) block, if this kind needs one.
    pub fn leading_solver(&self) -> Option<&SpdSolver> {
        self.leading.as_ref()
    }

    /// Solver for the `m×m` Schur-type matrix, if this kind needs one.
    pub fn schur_solver(&self) -> Option<&SpdSolver> {
        self.schur.as_ref()
    }

    fn expect_kind(&self, expected: PrecondKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected: expected.name(),
                found: self.kind.name(),
            })
        }
    }

    fn solvers(&self) -> (&SpdSolver, &SpdSolver) {
        (
            self.leading.as_ref().expect("built with a leading solver"),
            self.schur.as_ref().expect("built with a Schur solver"),
        )
    }

    fn check_shape(&self, r: &BlockVector) -> Result<()> {
        check_len("preconditioner x block", self.sys.n(), r.x.len())?;
        check_len("preconditioner y block", self.sys.m(), r.y.len())
    }

    /// `P_REHSS⁻¹ r`:
    /// solve `A w₁ = r₁`, solve `(αI + BBᵀ) w₂ = B w₁ + r₂`,
    /// then `z = (w₁ - Bᵀ w₂, w₂)`.
    pub fn apply_rehss(&self, r: &BlockVector) -> Result<BlockVector> {
        self.expect_kind(PrecondKind::Rehss)?;
        self.check_shape(r)?;
        let (a_inv, s_inv) = self.solvers();
        let b = &self.sys.b;
        let w1 = a_inv.solve(&r.x)?;
        let mut rhs = b.spmv(&w1)?;
        add_assign(&mut rhs, &r.y);
        let w2 = s_inv.solve(&rhs)?;
        let bt_w2 = b.spmv_t(&w2)?;
        let z1 = w1.iter().zip(&bt_w2).map(|(a, c)| a - c).collect();
        Ok(BlockVector::new(z1, w2))
    }

    /// `P_RHSS⁻¹ r`:
    /// solve `A w₁ = r₁`, `z₂ = α (BBᵀ)⁻¹ (B w₁ + r₂)`, `z₁ = w₁ - (1/α) Bᵀ z₂`.
    pub fn apply_rhss(&self, r: &BlockVector) -> Result<BlockVector> {
        self.expect_kind(PrecondKind::Rhss)?;
        self.check_shape(r)?;
        let (a_inv, bbt_inv) = self.solvers();
        let b = &self.sys.b;
        let alpha = self.alpha;
        let w1 = a_inv.solve(&r.x)?;
        let mut rhs = b.spmv(&w1)?;
        add_assign(&mut rhs, &r.y);
        let mut z2 = bbt_inv.solve(&rhs)?;
        z2.iter_mut().for_each(|v| *v *= alpha);
        let bt_z2 = b.spmv_t(&z2)?;
        let z1 = w1.iter().zip(&bt_z2).map(|(a, c)| a - c / alpha).collect();
        Ok(BlockVector::new(z1, z2))
    }

    /// `P_HSS⁻¹ r` with `P_HSS = (1/α)(αI + ℋ)(αI + 𝒮)`:
    /// `u = (αI + ℋ)⁻¹ r`, then `(αI + 𝒮) z = α u` is reduced to
    /// `(α²I + BBᵀ) z₂ = α² u₂ + α B u₁` and `z₁ = u₁ - (1/α) Bᵀ z₂`.
    pub fn apply_hss(&self, r: &BlockVector) -> Result<BlockVector> {
        self.expect_kind(PrecondKind::Hss)?;
        self.check_shape(r)?;
        let (shifted_inv, schur_inv) = self.solvers();
        let b = &self.sys.b;
        let alpha = self.alpha;
        let u1 = shifted_inv.solve(&r.x)?;
        let b_u1 = b.spmv(&u1)?;
        // α² u₂ = α r₂
        let rhs: Vec<f64> =
            r.y.iter()
                .zip(&b_u1)
                .map(|(r2, bu)| alpha * r2 + alpha * bu)
                .collect();
        let z2 = schur_inv.solve(&rhs)?;
        let bt_z2 = b.spmv_t(&z2)?;
        let z1 = u1.iter().zip(&bt_z2).map(|(u, c)| u - c / alpha).collect();
        Ok(BlockVector::new(z1, z2))
    }

    /// Dispatches on the kind; `None` returns `r` unchanged.
    pub fn apply_precond(&self, r: &BlockVector) -> Result<BlockVector> {
        match self.kind {
            PrecondKind::None => {
                self.check_shape(r)?;
                Ok(r.clone())
            }
            PrecondKind::Hss => self.apply_hss(r),
            PrecondKind::Rhss => self.apply_rhss(r),
            PrecondKind::Rehss => self.apply_rehss(r),
        }
    }

    /// Multiplies by the preconditioner matrix itself.
    pub fn multiply(&self, z: &BlockVector) -> Result<BlockVector> {
        self.check_shape(z)?;
        let (a, b, alpha) = (&self.sys.a, &self.sys.b, self.alpha);
        let bt_z2 = b.spmv_t(&z.y)?;
        let mut bottom = b.spmv(&z.x)?;
        bottom.iter_mut().for_each(|v| *v = -*v);
        let top = match self.kind {
            PrecondKind::None => return Ok(z.clone()),
            PrecondKind::Rehss => {
                let mut t = z.x.clone();
                add_assign(&mut t, &bt_z2);
                let t = a.spmv(&t)?;
                add_scaled(&mut bottom, alpha, &z.y);
                t
            }
            PrecondKind::Rhss => {
                let mut t = z.x.clone();
                add_scaled(&mut t, 1.0 / alpha, &bt_z2);
                a.spmv(&t)?
            }
            PrecondKind::Hss => {
                let mut inner = z.x.clone();
                add_scaled(&mut inner, 1.0 / alpha, &bt_z2);
                let mut t = a.spmv(&inner)?;
                add_scaled(&mut t, alpha, &z.x);
                add_assign(&mut t, &bt_z2);
                add_scaled(&mut bottom, alpha, &z.y);
                t
            }
        };
        Ok(BlockVector::new(top, bottom))
    }
}

impl Preconditioner for PrecondContext<'_> {
    fn apply_inverse(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_precond(r)
    }

    fn apply_forward(&self, z: &BlockVector) -> Result<BlockVector> {
        self.multiply(z)
    }
}

fn add_assign(dst: &mut [f64], src: &[f64]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
}

fn add_scaled(dst: &mut [f64], s: f64, src: &[f64]) {
    dst.iter_mut().zip(src).for_each(|(d, v)| *d += s * v);
}
