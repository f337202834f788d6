//! Benchmark tables, α sweeps, theory reports and spectrum export.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::krylov::{gmres, GmresConfig, Termination};
use crate::linalg::DENSE_LIMIT;
use crate::precond::{build_precond, InnerStrategy, PrecondKind};
use crate::problems::{generate_stokes, load_system, StokesSpec};
use crate::saddle::{BlockVector, SaddlePointSystem};
use crate::spectral::{
    alpha_limit_study, minpoly_check, preconditioned_spectrum, saddle_spectrum, write_scatter,
    SpectrumReport, MINPOLY_TOL,
};
use crate::theory::{compute_bounds, rhss_radius, spectral_radius_gamma, ConvergenceBounds};

pub const CSV_HEADER: [&str; 10] = [
    "problem",
    "label",
    "grid",
    "precond",
    "alpha",
    "IT",
    "inner_iters",
    "relres",
    "seconds",
    "termination",
];

/// The α columns of the comparison tables.
pub const DEFAULT_ALPHAS: [f64; 4] = [1e-4, 1e-2, 1.0, 1e2];
/// Power-method settings for the theory report.
pub const REPORT_RADIUS_TOL: f64 = 1e-6;
pub const REPORT_RADIUS_MAXIT: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

/// Where the system comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Generated(StokesSpec),
    Files {
        a: PathBuf,
        b: PathBuf,
        drop_rows: usize,
    },
}

impl Problem {
    /// Builds or reads the system and sets the all-ones right-hand side.
    pub fn load(&self) -> Result<SaddlePointSystem> {
        match self {
            Problem::Generated(spec) => {
                let mut sys = generate_stokes(spec)?;
                sys.rhs_all_ones();
                Ok(sys)
            }
            Problem::Files { a, b, drop_rows } => load_system(a, b, *drop_rows),
        }
    }

    /// Value of the `problem` column.
    pub fn name(&self) -> String {
        match self {
            Problem::Generated(spec) => spec.flow.name().to_string(),
            Problem::Files { .. } => "file".to_string(),
        }
    }

    /// Value of the `grid` column for a loaded system.
    pub fn grid(&self, sys: &SaddlePointSystem) -> String {
        match self {
            Problem::Generated(spec) => format!("{0}x{0}", spec.cells_per_side),
            Problem::Files { .. } => format!("n={} m={}", sys.n(), sys.m()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub preconditioners: Vec<PrecondKind>,
    pub alphas: Vec<f64>,
    pub gmres: GmresConfig,
    pub inner: InnerStrategy,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            preconditioners: vec![PrecondKind::Hss, PrecondKind::Rhss, PrecondKind::Rehss],
            alphas: DEFAULT_ALPHAS.to_vec(),
            gmres: GmresConfig::default(),
            inner: InnerStrategy::default(),
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.preconditioners.is_empty() {
            return Err(Error::InvalidConfig("no preconditioner requested".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidConfig("alpha list is empty".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidAlpha(a));
        }
        self.gmres.validate()?;
        self.inner.validate()
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub label: String,
    pub grid: String,
    pub precond: String,
    pub alpha: f64,
    #[serde(rename = "IT")]
    pub it: usize,
    pub inner_iters: usize,
    pub relres: f64,
    pub seconds: f64,
    pub termination: String,
}

/// Rows plus, per row, the max-norm distance of the returned iterate from
/// the all-ones solution.
#[derive(Debug, Clone, Default)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub solution_errors: Vec<f64>,
}

/// Runs every (preconditioner, α) cell of `cfg` and writes the table if an
/// output path is set.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchTable> {
    cfg.validate()?;
    let sys = cfg.problem.load()?;
    let table = run_cells(&sys, &cfg.problem.name(), &cfg.problem.grid(&sys), cfg)?;
    if let Some(path) = &cfg.output {
        write_table(&table.rows, path, cfg.format)?;
    }
    Ok(table)
}

/// The table for an already loaded system, preconditioner-major and
/// α-minor. The system's right-hand side is used as is.
pub fn run_cells(
    sys: &SaddlePointSystem,
    problem: &str,
    grid: &str,
    cfg: &ExperimentConfig,
) -> Result<BenchTable> {
    cfg.validate()?;
    let ones = BlockVector::ones(sys.n(), sys.m());
    let x0 = BlockVector::zeros(sys.n(), sys.m());
    let b = sys.rhs();
    let mut table = BenchTable::default();
    for &kind in &cfg.preconditioners {
        for &alpha in &cfg.alphas {
            let ctx = build_precond(sys, kind, alpha, cfg.inner)?;
            let (x, report) = gmres(sys, &ctx, &b, &x0, &cfg.gmres)?;
            table.solution_errors.push(x.sub(&ones).max_abs());
            table.rows.push(BenchRow {
                problem: problem.to_string(),
                label: sys.label.clone(),
                grid: grid.to_string(),
                precond: kind.name().to_string(),
                alpha,
                it: report.restarts,
                inner_iters: report.total_inner_iterations,
                relres: report.final_relres,
                seconds: report.wall_seconds,
                termination: report.termination.as_str().to_string(),
            });
        }
    }
    Ok(table)
}

pub fn write_table(rows: &[BenchRow], path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(rows, BufWriter::new(file), format)
}

/// As [`write_table`] into any writer.
pub fn write_rows<W: Write>(rows: &[BenchRow], mut w: W, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(w);
            if rows.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            w.write_all(b"\n")
                .and_then(|_| w.flush())
                .map_err(serde_json::Error::io)?;
        }
    }
    Ok(())
}

/// `steps` values of α with `log10 α` evenly spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidConfig("sweep needs at least one step".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::InvalidConfig(format!(
            "bad log10 range [{lo}, {hi}]"
        )));
    }
    if steps == 1 {
        return Ok(vec![10f64.powf(lo)]);
    }
    let dt = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|k| 10f64.powf(lo + dt * k as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    /// `log10 α`.
    pub t: f64,
    pub it: usize,
    pub seconds: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub precond: PrecondKind,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    /// `max(IT) / min(IT)` over the grid.
    pub fn it_spread(&self) -> f64 {
        let max = self.points.iter().map(|p| p.it).max().unwrap_or(0);
        let min = self.points.iter().map(|p| p.it).min().unwrap_or(0);
        if min == 0 {
            f64::INFINITY
        } else {
            max as f64 / min as f64
        }
    }
}

/// One curve per preconditioner of `cfg` over `alpha_grid`.
pub fn run_sweep(cfg: &ExperimentConfig, alpha_grid: &[f64]) -> Result<Vec<SweepCurve>> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidConfig("alpha grid is empty".into()));
    }
    let mut cfg = cfg.clone();
    cfg.alphas = alpha_grid.to_vec();
    cfg.validate()?;
    let sys = cfg.problem.load()?;
    sweep_system(&sys, &cfg)
}

/// As [`run_sweep`] for an already loaded system, using `cfg.alphas`.
pub fn sweep_system(sys: &SaddlePointSystem, cfg: &ExperimentConfig) -> Result<Vec<SweepCurve>> {
    let table = run_cells(sys, "", "", cfg)?;
    let mut rows = table.rows.into_iter();
    Ok(cfg
        .preconditioners
        .iter()
        .map(|&kind| SweepCurve {
            precond: kind,
            points: cfg
                .alphas
                .iter()
                .zip(rows.by_ref())
                .map(|(&alpha, row)| SweepPoint {
                    alpha,
                    t: alpha.log10(),
                    it: row.it,
                    seconds: row.seconds,
                    termination: termination_from_str(&row.termination),
                })
                .collect(),
        })
        .collect())
}

fn termination_from_str(s: &str) -> Termination {
    match s {
        "converged" => Termination::Converged,
        "max_restarts" => Termination::MaxRestarts,
        "timeout" => Termination::TimeOut,
        _ => Termination::Breakdown,
    }
}

/// Writes `<prefix>_<kind>_it.txt` and `<prefix>_<kind>_seconds.txt`, each
/// with `t value` lines where `t = log10 α`. Returns the paths written.
pub fn write_sweep(curves: &[SweepCurve], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for curve in curves {
        for (what, value) in [
            (
                "it",
                &(|p: &SweepPoint| p.it.to_string()) as &dyn Fn(&SweepPoint) -> String,
            ),
            ("seconds", &|p: &SweepPoint| format!("{:.6}", p.seconds)),
        ] {
            let path = dir.join(format!("{prefix}_{}_{what}.txt", curve.precond));
            let mut body = format!("# t=log10(alpha) {what} precond={}\n", curve.precond);
            for p in &curve.points {
                body.push_str(&format!("{} {}\n", p.t, value(p)));
            }
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoryReport {
    pub label: String,
    /// `None` when the system is over the dense limit.
    pub bounds: Option<ConvergenceBounds>,
    pub checks: Vec<TheoryCheck>,
    /// REHSS GMRES runs over the default α grid.
    pub benchmark: Vec<BenchRow>,
}

impl TheoryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("theory report for {}\n", self.label);
        match &self.bounds {
            Some(b) => s.push_str(&format!(
                "delta={:.6e} theta={:.6e} lambda(A)=[{:.6e}, {:.6e}] sigma(B)=[{:.6e}, {:.6e}]\n\
                 mu1={:.6e} mu_m={:.6e} alpha_opt(RHSS)={:.6e} 2/mu1={:.6e} corollary={}\n",
                b.delta,
                b.theta,
                b.lambda_min_a,
                b.lambda_max_a,
                b.sigma_min_b,
                b.sigma_max_b,
                b.mu1,
                b.mu_m,
                b.alpha_opt_rhss,
                b.rhss_upper,
                b.corollary_holds
            )),
            None => s.push_str("bounds unavailable: system exceeds the dense limit\n"),
        }
        for c in &self.checks {
            s.push_str(&format!("{} {}: {}\n", c.status, c.name, c.detail));
        }
        for r in &self.benchmark {
            s.push_str(&format!(
                "gmres {} alpha={:e} IT={} inner={} {}\n",
                r.precond, r.alpha, r.it, r.inner_iters, r.termination
            ));
        }
        s
    }
}

fn check(name: &str, outcome: Result<(bool, String)>) -> TheoryCheck {
    match outcome {
        Ok((ok, detail)) => TheoryCheck {
            name: name.to_string(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail,
        },
        Err(e) => TheoryCheck {
            name: name.to_string(),
            status: CheckStatus::Fail,
            detail: e.to_string(),
        },
    }
}

fn skipped(name: &str, detail: &str) -> TheoryCheck {
    TheoryCheck {
        name: name.to_string(),
        status: CheckStatus::Skipped,
        detail: detail.to_string(),
    }
}

/// Bounds plus a pass/fail line per convergence result. Oversized systems only get
/// the REHSS GMRES runs.
pub fn run_theory_report(sys: &SaddlePointSystem, gmres_cfg: &GmresConfig) -> Result<TheoryReport> {
    let mut cells = ExperimentConfig::new(Problem::Generated(StokesSpec::new(
        4,
        crate::problems::Flow::LidDriven,
    )));
    cells.preconditioners = vec![PrecondKind::Rehss];
    cells.gmres = gmres_cfg.clone();
    let benchmark = run_cells(sys, "theory", "", &cells)?.rows;

    const NAMES: [&str; 7] = [
        "delta <= theta",
        "rehss stationary convergence above max(delta, 0)",
        "corollary",
        "rhss interval and optimal alpha",
        "minimal polynomial degree <= m+1",
        "alpha -> 0 eigenvalue interval",
        "rehss spectrum structure",
    ];
    if sys.dim() > DENSE_LIMIT {
        let detail = format!("n+m = {} exceeds the dense limit {DENSE_LIMIT}", sys.dim());
        return Ok(TheoryReport {
            label: sys.label.clone(),
            bounds: None,
            checks: NAMES.iter().map(|n| skipped(n, &detail)).collect(),
            benchmark,
        });
    }

    let bounds = compute_bounds(sys)?;
    let mut checks = Vec::new();
    checks.push(check(
        NAMES[0],
        Ok((
            bounds.delta <= bounds.theta + 1e-10 * bounds.theta.abs().max(1.0),
            format!("delta={:.6e} theta={:.6e}", bounds.delta, bounds.theta),
        )),
    ));

    let floor = bounds.rehss_alpha_floor();
    checks.push(check(
        NAMES[1],
        (|| {
            let mut worst: f64 = 0.0;
            for offset in [1e-3, 1e-1, 1.0, 1e1, 1e3] {
                let rho = spectral_radius_gamma(
                    sys,
                    floor + offset,
                    REPORT_RADIUS_TOL,
                    REPORT_RADIUS_MAXIT,
                )?;
                worst = worst.max(rho);
            }
            Ok((worst < 1.0, format!("max rho over 5 alphas = {worst:.6}")))
        })(),
    ));

    if bounds.corollary_holds {
        checks.push(check(
            NAMES[2],
            (|| {
                let mut worst: f64 = 0.0;
                for alpha in [1e-4, 1.0, 1e4] {
                    worst = worst.max(spectral_radius_gamma(
                        sys,
                        alpha,
                        REPORT_RADIUS_TOL,
                        REPORT_RADIUS_MAXIT,
                    )?);
                }
                Ok((worst < 1.0, format!("max rho at 1e-4, 1, 1e4 = {worst:.6}")))
            })(),
        ));
    } else {
        checks.push(skipped(
            NAMES[2],
            &format!(
                "lambda_min(A) = {:.3e} <= kappa(B)^2/2 = {:.3e}",
                bounds.lambda_min_a,
                0.5 * bounds.kappa_b().powi(2)
            ),
        ));
    }

    checks.push(check(
        NAMES[3],
        (|| {
            let inside = rhss_radius(sys, 0.9 * bounds.rhss_upper)?;
            let at_opt = rhss_radius(sys, bounds.alpha_opt_rhss)?;
            let mut ok = inside < 1.0;
            for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
                ok &= at_opt <= rhss_radius(sys, frac * bounds.rhss_upper)? + 1e-8;
            }
            Ok((
                ok,
                format!("rho(0.9*2/mu1)={inside:.6} rho(alpha_opt)={at_opt:.6}"),
            ))
        })(),
    ));

    checks.push(check(
        NAMES[4],
        minpoly_check(sys, 1.0, MINPOLY_TOL).map(|c| {
            (
                c.pass,
                format!("{} iterations, bound {}", c.iterations, c.bound),
            )
        }),
    ));

    let sigma_min_sq = bounds.sigma_min_b * bounds.sigma_min_b;
    let small = (1e-8 * sigma_min_sq).min(1e-10);
    checks.push(check(
        NAMES[5],
        alpha_limit_study(sys, &[1.0, small]).map(|rows| {
            let last = rows.last().expect("two alphas");
            (
                last.inside(1e-4),
                format!(
                    "alpha={:.1e}: [{:.6e}, {:.6e}] within [{:.6e}, {:.6e}]",
                    last.alpha, last.min_nonunit, last.max_nonunit, last.lower, last.upper
                ),
            )
        }),
    ));

    checks.push(check(
        NAMES[6],
        (|| {
            let ctx = build_precond(sys, PrecondKind::Rehss, 1.0, InnerStrategy::direct())?;
            let spec = preconditioned_spectrum(&ctx)?;
            let ok = spec.n_at_one >= sys.n()
                && spec.eigenvalues_imag.iter().all(|&v| v == 0.0)
                && spec.min_real > 0.0;
            Ok((
                ok,
                format!(
                    "{} of {} eigenvalues at 1, min {:.6e}",
                    spec.n_at_one,
                    spec.len(),
                    spec.min_real
                ),
            ))
        })(),
    ));

    Ok(TheoryReport {
        label: sys.label.clone(),
        bounds: Some(bounds),
        checks,
        benchmark,
    })
}

/// Writes the spectrum of `P⁻¹𝒜` to `path` and that of `𝒜` to the sibling
/// `<stem>.A.<ext>`. Returns both reports, preconditioned first.
pub fn export_spectrum(
    sys: &SaddlePointSystem,
    kind: PrecondKind,
    alpha: f64,
    path: &Path,
) -> Result<(SpectrumReport, SpectrumReport, PathBuf)> {
    let ctx = build_precond(sys, kind, alpha, InnerStrategy::direct())?;
    let pre = preconditioned_spectrum(&ctx)?;
    let plain = saddle_spectrum(sys)?;
    let tag = sys.label.replace(char::is_whitespace, "_");
    write_scatter(path, &format!("{kind}/{tag}"), Some(alpha), &pre)?;
    let sibling = saddle_spectrum_path(path);
    write_scatter(&sibling, &format!("A/{tag}"), None, &plain)?;
    Ok((pre, plain, sibling))
}

/// `dir/eig.txt` becomes `dir/eig.A.txt`.
pub fn saddle_spectrum_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(
        || "spectrum".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    let name = match path.extension() {
        Some(ext) => format!("{stem}.A.{}", ext.to_string_lossy()),
        None => format!("{stem}.A"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::problems::{mm_write, Flow};

    fn toy_files(dir: &Path) -> Problem {
        let (a, b) = (dir.join("a.mtx"), dir.join("b.mtx"));
        mm_write(&SparseMatrix::from_diagonal(&[2.0]), &a).unwrap();
        mm_write(&SparseMatrix::identity(1), &b).unwrap();
        Problem::Files { a, b, drop_rows: 0 }
    }

    #[test]
    fn toy_rehss_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(toy_files(dir.path()));
        cfg.preconditioners = vec![PrecondKind::Rehss];
        let table = run_benchmark(&cfg).unwrap();
        assert_eq!(table.rows.len(), 4);
        for (row, err) in table.rows.iter().zip(&table.solution_errors) {
            assert_eq!(row.it, 1);
            assert_eq!(row.termination, "converged");
            assert!(*err < 1e-10);
        }
    }

    #[test]
    fn zero_alpha_rejected_before_running() {
        let mut cfg =
            ExperimentConfig::new(Problem::Generated(StokesSpec::new(4, Flow::LidDriven)));
        cfg.alphas = vec![1.0, 0.0];
        assert!(matches!(run_benchmark(&cfg), Err(Error::InvalidAlpha(_))));
        cfg.alphas = vec![];
        assert!(run_benchmark(&cfg).is_err());
    }

    #[test]
    fn csv_and_json_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(Problem::Generated(StokesSpec::new(4, Flow::Channel)));
        cfg.alphas = vec![1.0];
        cfg.output = Some(dir.path().join("t.csv"));
        run_benchmark(&cfg).unwrap();
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "problem,label,grid,precond,alpha,IT,inner_iters,relres,seconds,termination"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&first[..4], &["channel", "MAC channel N=4", "4x4", "hss"]);
        assert_eq!(text.lines().count(), 4);

        cfg.output = Some(dir.path().join("t.json"));
        cfg.format = OutputFormat::Json;
        run_benchmark(&cfg).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap())
                .unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert!(v[0].get("IT").is_some());
    }

    #[test]
    fn grid_and_sweep() {
        let g = log_grid(-2.0, 2.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e-2).abs() < 1e-16 && (g[4] - 1e2).abs() < 1e-12);
        assert!(log_grid(0.0, 1.0, 0).is_err());
        assert!(log_grid(1.0, 0.0, 3).is_err());

        let mut cfg =
            ExperimentConfig::new(Problem::Generated(StokesSpec::new(4, Flow::LidDriven)));
        cfg.preconditioners = vec![PrecondKind::Rehss, PrecondKind::Hss];
        assert!(run_sweep(&cfg, &[]).is_err());
        let curves = run_sweep(&cfg, &g).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].points.len(), 5);
        assert!((curves[0].points[0].t + 2.0).abs() < 1e-12);
        let dir = tempfile::tempdir().unwrap();
        let files = write_sweep(&curves, dir.path(), "lid").unwrap();
        assert_eq!(files.len(), 4);
        let body = std::fs::read_to_string(dir.path().join("lid_rehss_it.txt")).unwrap();
        assert_eq!(body.lines().count(), 6);
    }

    #[test]
    fn sweep_shapes_on_mac_16() {
        let mut cfg =
            ExperimentConfig::new(Problem::Generated(StokesSpec::new(16, Flow::LidDriven)));
        cfg.preconditioners = vec![PrecondKind::Rehss, PrecondKind::Hss];
        let curves = run_sweep(&cfg, &log_grid(-4.0, 2.0, 7).unwrap()).unwrap();
        assert!(curves[0].it_spread() <= 4.0, "{:?}", curves[0]);
        let hss = &curves[1].points;
        let best = hss.iter().map(|p| p.it).min().unwrap();
        assert!(hss.last().unwrap().it >= best);
    }

    #[test]
    fn theory_report_toy() {
        let dir = tempfile::tempdir().unwrap();
        let sys = toy_files(dir.path()).load().unwrap();
        let report = run_theory_report(&sys, &GmresConfig::default()).unwrap();
        let b = report.bounds.as_ref().unwrap();
        assert!((b.delta + 0.75).abs() < 1e-14);
        assert!(b.corollary_holds);
        assert!(report.all_passed(), "{}", report.summary());
        assert!(report.checks.iter().all(|c| c.status == CheckStatus::Pass));
    }

    #[test]
    fn spectrum_files() {
        let dir = tempfile::tempdir().unwrap();
        let sys = toy_files(dir.path()).load().unwrap();
        let path = dir.path().join("eig.txt");
        let (_, _, sibling) = export_spectrum(&sys, PrecondKind::Rehss, 1.0, &path).unwrap();
        assert_eq!(sibling, dir.path().join("eig.A.txt"));
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(lines, vec!["0.25 0", "1 0"]);

        export_spectrum(&sys, PrecondKind::None, 1.0, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(lines, vec!["1 0", "1 0"]);

        let bad = dir.path().join("missing").join("eig.txt");
        assert!(matches!(
            export_spectrum(&sys, PrecondKind::Rehss, 1.0, &bad),
            Err(Error::Io { .. })
        ));
    }
}
