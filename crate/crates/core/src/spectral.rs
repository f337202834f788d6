//! Eigenvalue studies of the preconditioned operator at desk scale.
//!
//! The REHSS spectrum comes from its block-triangular structure and only
//! needs symmetric eigen-solves. HSS, RHSS and the bare saddle matrix are
//! nonsymmetric; their spectra go through balancing, Hessenberg reduction
//! and a double-shift QR iteration, limited to [`GENERAL_LIMIT`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::krylov::gmres_full;
use crate::linalg::{cholesky_tagged, DenseMatrix};
use crate::precond::{build_precond, InnerStrategy, PrecondContext, PrecondKind, Preconditioner};
use crate::saddle::{BlockVector, SaddlePointSystem};
use crate::theory::{b_ainv_bt, check_dense, check_dense_size, congruence_eigs, schur_factor};

/// Size guard for the nonsymmetric eigenvalue path.
pub const GENERAL_LIMIT: usize = 800;
/// Eigenvalues within this distance of 1 count as unit eigenvalues.
pub const AT_ONE_TOL: f64 = 1e-8;
/// Default GMRES tolerance of [`minpoly_check`].
pub const MINPOLY_TOL: f64 = 1e-10;

const QR_MAX_ITS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues_real: Vec<f64>,
    pub eigenvalues_imag: Vec<f64>,
    pub n_at_one: usize,
    /// 90th percentile (nearest rank) of `|λ - 1|`.
    pub cluster_radius_90: f64,
    pub min_real: f64,
    pub max_real: f64,
}

impl SpectrumReport {
    /// Sorts by real then imaginary part and fills in the statistics.
    pub fn from_eigenvalues(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                context: "SpectrumReport",
                expected: re.len(),
                found: im.len(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = re.into_iter().zip(im).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let dist: Vec<f64> = pairs.iter().map(|&(r, i)| (r - 1.0).hypot(i)).collect();
        let n_at_one = dist.iter().filter(|&&d| d <= AT_ONE_TOL).count();
        let mut sorted = dist.clone();
        sorted.sort_by(f64::total_cmp);
        let cluster_radius_90 = if sorted.is_empty() {
            0.0
        } else {
            let rank = ((0.9 * sorted.len() as f64).ceil() as usize).max(1);
            sorted[rank - 1]
        };
        let min_real = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_real = pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            eigenvalues_real: pairs.iter().map(|p| p.0).collect(),
            eigenvalues_imag: pairs.iter().map(|p| p.1).collect(),
            n_at_one,
            cluster_radius_90,
            min_real,
            max_real,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues_real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues_real.is_empty()
    }

    /// Spectral radius of `I - M` for the operator `M` this spectrum belongs to.
    pub fn radius_about_one(&self) -> f64 {
        self.eigenvalues_real
            .iter()
            .zip(&self.eigenvalues_imag)
            .map(|(r, i)| (r - 1.0).hypot(*i))
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of `Â = (αI + BBᵀ)⁻¹BA⁻¹Bᵀ`, ascending.
pub fn ahat_eigs(sys: &SaddlePointSystem, alpha: f64) -> Result<Vec<f64>> {
    check_dense(sys)?;
    let s = schur_factor(sys, alpha)?;
    let chol_a = cholesky_tagged(&sys.a, "A")?;
    let k = b_ainv_bt(sys, &chol_a)?;
    congruence_eigs(&k, &s)
}

/// `P⁻¹𝒜` assembled column by column through the preconditioner.
pub fn preconditioned_dense(ctx: &PrecondContext<'_>) -> Result<DenseMatrix> {
    let sys = ctx.system();
    check_dense(sys)?;
    let (n, dim) = (sys.n(), sys.dim());
    let mut e = vec![0.0; dim];
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        e[j] = 1.0;
        let col = ctx.apply_precond(&sys.apply_saddle(&BlockVector::from_flat(&e, n))?)?;
        cols.push(col.to_flat());
        e[j] = 0.0;
    }
    DenseMatrix::from_columns(dim, &cols)
}

/// Spectrum of `P⁻¹𝒜` for the context's preconditioner (`𝒜` itself for
/// `PrecondKind::None`).
pub fn preconditioned_spectrum(ctx: &PrecondContext<'_>) -> Result<SpectrumReport> {
    let sys = ctx.system();
    match ctx.kind() {
        PrecondKind::Rehss => {
            let mut re = vec![1.0; sys.n()];
            re.extend(ahat_eigs(sys, ctx.alpha())?);
            let im = vec![0.0; re.len()];
            SpectrumReport::from_eigenvalues(re, im)
        }
        _ => {
            check_dense_size(sys.dim(), GENERAL_LIMIT)?;
            let (re, im) = general_eigs(&preconditioned_dense(ctx)?)?;
            SpectrumReport::from_eigenvalues(re, im)
        }
    }
}

/// Spectrum of the unpreconditioned saddle matrix `𝒜`.
pub fn saddle_spectrum(sys: &SaddlePointSystem) -> Result<SpectrumReport> {
    check_dense_size(sys.dim(), GENERAL_LIMIT)?;
    let (re, im) = general_eigs(&sys.assemble_dense()?)?;
    SpectrumReport::from_eigenvalues(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinpolyCheck {
    pub iterations: usize,
    /// `m + 1`.
    pub bound: usize,
    pub pass: bool,
}

/// Full GMRES with REHSS and direct inner solves; passes when it needs at
/// most `m + 1` inner iterations.
pub fn minpoly_check(sys: &SaddlePointSystem, alpha: f64, tol: f64) -> Result<MinpolyCheck> {
    let ctx = build_precond(sys, PrecondKind::Rehss, alpha, InnerStrategy::direct())?;
    minpoly_check_with(sys, &ctx, tol)
}

/// As [`minpoly_check`] with any preconditioner.
pub fn minpoly_check_with<P>(sys: &SaddlePointSystem, pc: &P, tol: f64) -> Result<MinpolyCheck>
where
    P: Preconditioner + ?Sized,
{
    let (_, report) = gmres_full(
        sys,
        pc,
        &sys.rhs(),
        &BlockVector::zeros(sys.n(), sys.m()),
        tol,
    )?;
    let bound = sys.m() + 1;
    let iterations = report.total_inner_iterations;
    Ok(MinpolyCheck {
        iterations,
        bound,
        pass: report.converged && iterations <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaLimitRow {
    pub alpha: f64,
    pub min_nonunit: f64,
    pub max_nonunit: f64,
    /// `1/λ_max(A)`.
    pub lower: f64,
    /// `1/λ_min(A)`.
    pub upper: f64,
}

impl AlphaLimitRow {
    pub fn inside(&self, slack: f64) -> bool {
        self.min_nonunit >= self.lower - slack && self.max_nonunit <= self.upper + slack
    }
}

/// Extremes of `eig(Â)` next to `[1/λ_max(A), 1/λ_min(A)]` for each `α`.
pub fn alpha_limit_study(sys: &SaddlePointSystem, alphas: &[f64]) -> Result<Vec<AlphaLimitRow>> {
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("alpha list is empty".into()));
    }
    if let Some(&a) = alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidAlpha(a));
    }
    if alphas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidConfig("alpha list must be descending".into()));
    }
    check_dense(sys)?;
    let eig_a = crate::linalg::sym_eigs(&sys.a.to_dense())?;
    let lower = 1.0 / eig_a.last().expect("n >= 1");
    let upper = 1.0 / eig_a[0];
    alphas
        .iter()
        .map(|&alpha| {
            let mu = ahat_eigs(sys, alpha)?;
            Ok(AlphaLimitRow {
                alpha,
                min_nonunit: mu[0],
                max_nonunit: *mu.last().expect("m >= 1"),
                lower,
                upper,
            })
        })
        .collect()
}

/// Rounds to 12 significant digits and prints the shortest form, with `-0`
/// shown as `0`.
pub fn format_scatter_value(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

/// Writes `# label alpha=<value>` followed by one `re im` line per eigenvalue.
pub fn write_scatter(
    path: &Path,
    label: &str,
    alpha: Option<f64>,
    report: &SpectrumReport,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let alpha = alpha.map_or_else(|| "none".to_string(), |a| format!("{a}"));
    let mut body = format!("# {label} alpha={alpha}\n");
    for (r, i) in report.eigenvalues_real.iter().zip(&report.eigenvalues_imag) {
        body.push_str(&format_scatter_value(*r));
        body.push(' ');
        body.push_str(&format_scatter_value(*i));
        body.push('\n');
    }
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// All eigenvalues `(re, im)` of a general square matrix.
pub fn general_eigs(m: &DenseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            nrows: m.nrows(),
            ncols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    let mut h = OneBased::from_dense(m);
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&mut h)
}

/// Square matrix with 1-based indexing, matching the classical algorithms.
struct OneBased {
    n: usize,
    a: Vec<f64>,
}

impl OneBased {
    fn from_dense(m: &DenseMatrix) -> Self {
        let n = m.nrows();
        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                a[(i + 1) * (n + 1) + j + 1] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.n + 1) + j]
    }

    fn swap(&mut self, (i1, j1): (usize, usize), (i2, j2): (usize, usize)) {
        let s = self.n + 1;
        self.a.swap(i1 * s + j1, i2 * s + j2);
    }
}

fn balance(h: &mut OneBased) {
    const RADIX: f64 = 2.0;
    let n = h.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += h.at(j, i).abs();
                    r += h.at(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        *h.at_mut(i, j) *= g;
                    }
                    for j in 1..=n {
                        *h.at_mut(j, i) *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transforms. Entries below the subdiagonal are zeroed on exit.
fn hessenberg(h: &mut OneBased) {
    let n = h.n;
    for m in 2..n {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..=n {
            if h.at(j, m - 1).abs() > x.abs() {
                x = h.at(j, m - 1);
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..=n {
                h.swap((piv, j), (m, j));
            }
            for j in 1..=n {
                h.swap((j, piv), (j, m));
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = h.at(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    *h.at_mut(i, m - 1) = y;
                    for j in m..=n {
                        let v = h.at(m, j);
                        *h.at_mut(i, j) -= y * v;
                    }
                    for j in 1..=n {
                        let v = h.at(j, i);
                        *h.at_mut(j, m) += y * v;
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..(i - 1) {
            *h.at_mut(i, j) = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
#[allow(clippy::many_single_char_names)]
fn hqr(h: &mut OneBased) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = h.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += h.at(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = h.at(l - 1, l - 1).abs() + h.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h.at(l, l - 1).abs() + s == s {
                    *h.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = h.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = h.at(nn - 1, nn - 1);
            let mut w = h.at(nn, nn - 1) * h.at(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if its == QR_MAX_ITS {
                return Err(Error::MaxIterations {
                    iterations: its,
                    residual: h.at(nn, nn - 1).abs(),
                });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    *h.at_mut(i, i) -= x;
                }
                let s = h.at(nn, nn - 1).abs() + h.at(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h.at(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h.at(m + 1, m) + h.at(m, m + 1);
                q = h.at(m + 1, m + 1) - z - rr - ss;
                r = h.at(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h.at(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (h.at(m - 1, m - 1).abs() + z.abs() + h.at(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                *h.at_mut(i, i - 2) = 0.0;
                if i != m + 2 {
                    *h.at_mut(i, i - 3) = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = h.at(k, k - 1);
                    q = h.at(k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = h.at(k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            *h.at_mut(k, k - 1) = -h.at(k, k - 1);
                        }
                    } else {
                        *h.at_mut(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = h.at(k, j) + q * h.at(k + 1, j);
                        if k != nn - 1 {
                            pp += r * h.at(k + 2, j);
                            *h.at_mut(k + 2, j) -= pp * z;
                        }
                        *h.at_mut(k + 1, j) -= pp * y;
                        *h.at_mut(k, j) -= pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * h.at(i, k) + y * h.at(i, k + 1);
                        if k != nn - 1 {
                            pp += z * h.at(i, k + 2);
                            *h.at_mut(i, k + 2) -= pp * r;
                        }
                        *h.at_mut(i, k + 1) -= pp * q;
                        *h.at_mut(i, k) -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    wr.remove(0);
    wi.remove(0);
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    fn toy() -> SaddlePointSystem {
        let mut s = SaddlePointSystem::new(
            SparseMatrix::from_diagonal(&[2.0]),
            SparseMatrix::identity(1),
            "toy",
        );
        s.rhs_all_ones();
        s
    }

    #[test]
    fn ahat_toy() {
        let sys = toy();
        assert!((ahat_eigs(&sys, 1.0).unwrap()[0] - 0.25).abs() < 1e-15);
        assert!((ahat_eigs(&sys, 1e-10).unwrap()[0] - 0.5).abs() < 1e-9);
        let big = ahat_eigs(&sys, 1e6).unwrap()[0];
        assert!((big - 0.5 / (1e6 + 1.0)).abs() < 1e-18);
    }

    #[test]
    fn ahat_identity_a_closed_form() {
        // B with orthogonal rows of norms 1 and 2: σ² = 1, 4
        let b = SparseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0]]).unwrap();
        let sys = SaddlePointSystem::new(SparseMatrix::identity(3), b, "closed");
        let mu = ahat_eigs(&sys, 0.5).unwrap();
        assert!((mu[0] - 1.0 / 1.5).abs() < 1e-14);
        assert!((mu[1] - 4.0 / 4.5).abs() < 1e-14);
    }

    #[test]
    fn toy_spectra() {
        let sys = toy();
        let ctx = build_precond(&sys, PrecondKind::Rehss, 1.0, InnerStrategy::direct()).unwrap();
        let rep = preconditioned_spectrum(&ctx).unwrap();
        assert_eq!(rep.eigenvalues_real.len(), 2);
        assert!((rep.eigenvalues_real[0] - 0.25).abs() < 1e-15);
        assert_eq!(rep.eigenvalues_real[1], 1.0);
        assert_eq!(rep.n_at_one, 1);

        let ctx = build_precond(&sys, PrecondKind::None, 1.0, InnerStrategy::direct()).unwrap();
        let rep = preconditioned_spectrum(&ctx).unwrap();
        assert_eq!(rep.eigenvalues_real, vec![1.0, 1.0]);
        assert_eq!(rep.eigenvalues_imag, vec![0.0, 0.0]);
        assert_eq!(rep.n_at_one, 2);

        let ctx = build_precond(&sys, PrecondKind::Rhss, 2.0, InnerStrategy::direct()).unwrap();
        let rep = preconditioned_spectrum(&ctx).unwrap();
        assert_eq!(rep.n_at_one, 2);
    }

    #[test]
    fn general_eigs_known_cases() {
        // rotation-like block with eigenvalues 1 ± 2i, plus a real 3
        let m =
            DenseMatrix::from_row_major(3, 3, vec![1.0, -2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 3.0])
                .unwrap();
        let (re, im) = general_eigs(&m).unwrap();
        let mut pairs: Vec<(f64, f64)> = re.into_iter().zip(im).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert!((pairs[0].0 - 1.0).abs() < 1e-13 && (pairs[0].1 + 2.0).abs() < 1e-13);
        assert!((pairs[1].0 - 1.0).abs() < 1e-13 && (pairs[1].1 - 2.0).abs() < 1e-13);
        assert!((pairs[2].0 - 3.0).abs() < 1e-13 && pairs[2].1 == 0.0);
    }

    #[test]
    fn general_eigs_companion() {
        // companion matrix of (λ-1)(λ-2)(λ-3)(λ-4)(λ-5)
        let c = [-120.0, 274.0, -225.0, 85.0, -15.0];
        let mut m = DenseMatrix::zeros(5, 5);
        for i in 1..5 {
            m[(i, i - 1)] = 1.0;
        }
        for (i, ci) in c.iter().enumerate() {
            m[(i, 4)] = -ci;
        }
        let (mut re, im) = general_eigs(&m).unwrap();
        re.sort_by(f64::total_cmp);
        for (k, r) in re.iter().enumerate() {
            assert!((r - (k + 1) as f64).abs() < 1e-9, "{re:?}");
        }
        assert!(im.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn report_statistics() {
        let rep = SpectrumReport::from_eigenvalues(
            vec![1.0, 0.5, 1.0 + 1e-9, 2.0],
            vec![0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(rep.n_at_one, 2);
        assert_eq!(rep.cluster_radius_90, 1.0);
        assert_eq!(rep.min_real, 0.5);
        assert_eq!(rep.max_real, 2.0);
        assert!(SpectrumReport::from_eigenvalues(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn minpoly_toy() {
        let check = minpoly_check(&toy(), 1.0, MINPOLY_TOL).unwrap();
        assert!(check.pass);
        assert_eq!(check.bound, 2);
        assert!(check.iterations <= 2);
    }

    #[test]
    fn alpha_limit_toy() {
        let rows = alpha_limit_study(&toy(), &[1e6, 1.0, 1e-10]).unwrap();
        assert!((rows[0].max_nonunit - 0.5 / (1e6 + 1.0)).abs() < 1e-18);
        assert!(!rows[0].inside(1e-6));
        assert!(rows[2].inside(1e-6));
        assert_eq!((rows[2].lower, rows[2].upper), (0.5, 0.5));
        assert!(alpha_limit_study(&toy(), &[1.0, 2.0]).is_err());
        assert!(alpha_limit_study(&toy(), &[0.0]).is_err());
    }

    #[test]
    fn scatter_format() {
        assert_eq!(format_scatter_value(0.25000000000000006), "0.25");
        assert_eq!(format_scatter_value(-0.0), "0");
        assert_eq!(format_scatter_value(1.0), "1");
        assert_eq!(format_scatter_value(-3.5e-7), "-0.00000035");
    }

    #[test]
    fn scatter_file() {
        let sys = toy();
        let ctx = build_precond(&sys, PrecondKind::Rehss, 1.0, InnerStrategy::direct()).unwrap();
        let rep = preconditioned_spectrum(&ctx).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        write_scatter(&path, "toy", Some(1.0), &rep).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# toy alpha=1\n0.25 0\n1 0\n");
    }
}
