//! Block preconditioners for real saddle point systems
//! `[[A, Bᵀ], [-B, 0]]` with `A` symmetric positive definite.
//!
//! Includes the HSS, RHSS and REHSS preconditioners, restarted GMRES,
//! stationary iteration and spectral analysis, MAC Stokes test problems,
//! Matrix Market input and a benchmark driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod precond;
pub mod problems;
pub mod random;
pub mod saddle;
pub mod spectral;
pub mod theory;

pub use bench::{
    export_spectrum, run_benchmark, run_sweep, run_theory_report, BenchRow, ExperimentConfig,
    OutputFormat, Problem,
};
pub use error::{Error, Result};
pub use krylov::{gmres, GmresConfig, SolveReport, StopRule, Termination};
pub use precond::{build_precond, InnerStrategy, PrecondContext, PrecondKind, Preconditioner};
pub use problems::{generate_stokes, load_system, mm_read, mm_write, Flow, StokesSpec};
pub use saddle::{BlockOperator, BlockVector, SaddlePointSystem};
pub use spectral::{preconditioned_spectrum, SpectrumReport};
pub use theory::{compute_bounds, gamma_action, rehss_iterate, ConvergenceBounds};
