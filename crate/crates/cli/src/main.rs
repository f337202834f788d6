//! `saddle-bench`: benchmark tables, α sweeps, spectra, theory reports and
//! Matrix Market export for saddle point preconditioners.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use saddle_core::bench::{
    export_spectrum, log_grid, run_benchmark, run_theory_report, sweep_system, write_rows,
    write_sweep, ExperimentConfig, OutputFormat, Problem, DEFAULT_ALPHAS,
};
use saddle_core::krylov::{GmresConfig, StopRule};
use saddle_core::precond::{InnerStrategy, PrecondKind};
use saddle_core::problems::{assemble_stokes, mm_write, Flow, StokesSpec};

/// Default α values of `spectrum`.
const SPECTRUM_ALPHAS: [f64; 3] = [0.01, 0.1, 1.0];

#[derive(Parser, Debug)]
#[command(name = "saddle-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// GMRES restart counts for every (preconditioner, alpha) pair.
    Bench(BenchArgs),
    /// Restart counts and timings over a log-spaced alpha grid.
    Sweep(SweepArgs),
    /// Eigenvalue scatter files of the preconditioned matrix and of the saddle matrix.
    Spectrum(SpectrumArgs),
    /// Convergence bounds and a pass/fail line per theoretical result.
    Theory(TheoryArgs),
    /// Writes a generated problem's A and B as Matrix Market files.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Generated MAC Stokes flow.
    #[arg(long, value_parser = parse_flow, conflicts_with_all = ["mat_a", "mat_b"])]
    problem: Option<Flow>,
    /// Cells per side of the generated grid.
    #[arg(long = "n", default_value_t = 16)]
    n: usize,
    /// Matrix Market file holding A.
    #[arg(long = "matA", requires = "mat_b")]
    mat_a: Option<PathBuf>,
    /// Matrix Market file holding B.
    #[arg(long = "matB", requires = "mat_a")]
    mat_b: Option<PathBuf>,
    /// Leading rows of B to drop (generated problems default to 1).
    #[arg(long)]
    drop_rows: Option<usize>,
}

impl ProblemArgs {
    fn problem(&self) -> Result<Problem> {
        match (&self.mat_a, &self.mat_b, self.problem) {
            (Some(a), Some(b), _) => Ok(Problem::Files {
                a: a.clone(),
                b: b.clone(),
                drop_rows: self.drop_rows.unwrap_or(0),
            }),
            (None, None, flow) => {
                let mut spec = StokesSpec::new(self.n, flow.unwrap_or(Flow::LidDriven));
                if let Some(k) = self.drop_rows {
                    spec = spec.with_drop_rows(k);
                }
                spec.validate()?;
                Ok(Problem::Generated(spec))
            }
            _ => bail!("--matA and --matB must be given together"),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Comma separated list from hss, rhss, rehss, none.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "hss,rhss,rehss")]
    precond: Vec<PrecondKind>,
    /// Comma separated alpha values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Adds 1e-6 in front of the default alpha grid.
    #[arg(long, conflicts_with = "alpha")]
    extended_alpha_grid: bool,
    #[arg(long, default_value_t = 30)]
    restart: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_restarts: usize,
    #[arg(long, default_value_t = 3600.0)]
    max_seconds: f64,
    /// Inner solver for the SPD blocks: direct or cg.
    #[arg(long, default_value = "direct", value_parser = parse_inner)]
    inner: InnerStrategy,
    /// Stop on ‖P r‖ ≤ tol ‖P b‖ with the preconditioner matrix P itself.
    #[arg(long)]
    literal_stop_rule: bool,
}

impl SolverArgs {
    fn gmres(&self) -> GmresConfig {
        GmresConfig {
            restart: self.restart,
            rel_tol: self.tol,
            max_restarts: self.max_restarts,
            max_seconds: self.max_seconds,
            stop_rule: if self.literal_stop_rule {
                StopRule::Literal
            } else {
                StopRule::Preconditioned
            },
            ..GmresConfig::default()
        }
    }

    fn alphas(&self) -> Vec<f64> {
        match &self.alpha {
            Some(a) => a.clone(),
            None if self.extended_alpha_grid => {
                let mut v = vec![1e-6];
                v.extend(DEFAULT_ALPHAS);
                v
            }
            None => DEFAULT_ALPHAS.to_vec(),
        }
    }

    fn config(&self, problem: Problem) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(problem);
        cfg.preconditioners = self.precond.clone();
        cfg.alphas = self.alphas();
        cfg.gmres = self.gmres();
        cfg.inner = self.inner;
        cfg
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output file; the table goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// log10 of the first and last alpha, and the number of grid points.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEPS"], allow_hyphen_values = true,
          required = true)]
    alpha_log_range: Vec<String>,
    /// Directory for the `<problem>_<precond>_{it,seconds}.txt` curves.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "rehss", value_parser = parse_kind)]
    precond: PrecondKind,
    /// Comma separated alpha values; one file is written per value.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Scatter file; `<stem>.A.<ext>` next to it receives the saddle matrix spectrum.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Writes the report as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_flow, default_value = "lid")]
    problem: Flow,
    #[arg(long = "n", default_value_t = 16)]
    n: usize,
    /// Leading rows dropped before writing B; 0 keeps the rank deficient divergence.
    #[arg(long, default_value_t = 0)]
    drop_rows: usize,
    #[arg(long = "out-A")]
    out_a: PathBuf,
    #[arg(long = "out-B")]
    out_b: PathBuf,
}

fn parse_flow(s: &str) -> Result<Flow, String> {
    s.parse().map_err(|e: saddle_core::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<PrecondKind, String> {
    s.parse().map_err(|e: saddle_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: saddle_core::Error| e.to_string())
}

fn parse_inner(s: &str) -> Result<InnerStrategy, String> {
    match s {
        "direct" => Ok(InnerStrategy::direct()),
        "cg" => Ok(InnerStrategy::cg()),
        other => Err(format!(
            "unknown inner solver '{other}', expected direct or cg"
        )),
    }
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = args.solver.config(args.problem.problem()?);
    cfg.output = args.out.clone();
    cfg.format = args.format;
    let table = run_benchmark(&cfg)?;
    if args.out.is_none() {
        write_rows(&table.rows, std::io::stdout().lock(), args.format)?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let [lo, hi, steps] = <[String; 3]>::try_from(args.alpha_log_range)
        .map_err(|_| anyhow::anyhow!("--alpha-log-range needs LO HI STEPS"))?;
    let lo: f64 = lo.parse().context("LO must be a number")?;
    let hi: f64 = hi.parse().context("HI must be a number")?;
    let steps: usize = steps.parse().context("STEPS must be a count")?;
    let grid = log_grid(lo, hi, steps)?;
    let problem = args.problem.problem()?;
    let mut cfg = args.solver.config(problem.clone());
    cfg.alphas = grid;
    cfg.validate()?;
    let sys = problem.load()?;
    let curves = sweep_system(&sys, &cfg)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let prefix = match &problem {
        Problem::Generated(spec) => format!("{}_{}", spec.flow, spec.cells_per_side),
        Problem::Files { a, .. } => a
            .file_stem()
            .map_or_else(|| "file".into(), |s| s.to_string_lossy().into_owned()),
    };
    for path in write_sweep(&curves, &args.out, &prefix)? {
        println!("wrote {}", path.display());
    }
    for curve in &curves {
        println!("{} IT max/min = {}", curve.precond, curve.it_spread());
    }
    Ok(())
}

fn spectrum(args: SpectrumArgs) -> Result<()> {
    let sys = args.problem.problem()?.load()?;
    let alphas = args.alpha.unwrap_or_else(|| SPECTRUM_ALPHAS.to_vec());
    if alphas.is_empty() {
        bail!("no alpha given");
    }
    for &alpha in &alphas {
        let path = if alphas.len() == 1 {
            args.out.clone()
        } else {
            with_alpha(&args.out, alpha)
        };
        let (pre, _, sibling) = export_spectrum(&sys, args.precond, alpha, &path)?;
        println!(
            "alpha={alpha:e}: {} eigenvalues, {} at 1, real part in [{:.6e}, {:.6e}] -> {} and {}",
            pre.len(),
            pre.n_at_one,
            pre.min_real,
            pre.max_real,
            path.display(),
            sibling.display()
        );
    }
    Ok(())
}

/// `dir/eig.txt` with α = 0.1 becomes `dir/eig.alpha=0.1.txt`.
fn with_alpha(path: &std::path::Path, alpha: f64) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "spectrum".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.alpha={alpha}.{}", ext.to_string_lossy()),
        None => format!("{stem}.alpha={alpha}"),
    };
    path.with_file_name(name)
}

fn theory(args: TheoryArgs) -> Result<bool> {
    let sys = args.problem.problem()?.load()?;
    let report = run_theory_report(&sys, &args.solver.gmres())?;
    print!("{}", report.summary());
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&report)?;
        std::fs::write(out, text + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(report.all_passed())
}

fn gen(args: GenArgs) -> Result<()> {
    let spec = StokesSpec::new(args.n, args.problem).with_drop_rows(args.drop_rows);
    let sys = assemble_stokes(&spec)?;
    mm_write(&sys.a, &args.out_a)?;
    mm_write(&sys.b, &args.out_b)?;
    println!(
        "{}: A {}x{} ({} nonzeros), B {}x{} ({} nonzeros)",
        spec.label(),
        sys.a.nrows(),
        sys.a.ncols(),
        sys.a.nnz(),
        sys.b.nrows(),
        sys.b.ncols(),
        sys.b.nnz()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Spectrum(a) => spectrum(a).map(|_| true),
        Command::Theory(a) => theory(a),
        Command::Gen(a) => gen(a).map(|_| true),
    }
}

/// The error chain without causes already spelled out by an outer message.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = e.to_string();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !msg.contains(&text) {
            msg.push_str(": ");
            msg.push_str(&text);
        }
    }
    msg
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn alpha_file_names() {
        let p = with_alpha(std::path::Path::new("out/eig.txt"), 0.1);
        assert_eq!(p, PathBuf::from("out/eig.alpha=0.1.txt"));
    }
}
