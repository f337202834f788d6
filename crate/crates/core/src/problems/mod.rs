//! Test problems: generated MAC Stokes systems and Matrix Market input.

pub mod mm;
pub mod stokes;

use std::path::Path;

pub use mm::{mm_read, mm_write};
pub use stokes::{assemble_stokes, generate_stokes, Flow, StokesSpec};

use crate::error::{Error, Result};
use crate::saddle::SaddlePointSystem;

/// Reads `A` and `B`, drops the first `drop_rows` rows of `B`, sets the
/// all-ones right-hand side and validates.
pub fn load_system(path_a: &Path, path_b: &Path, drop_rows: usize) -> Result<SaddlePointSystem> {
    let a = mm_read(path_a)?;
    let b = mm_read(path_b)?.drop_leading_rows(drop_rows)?;
    let label = path_a
        .file_stem()
        .map_or_else(|| "file".to_string(), |s| s.to_string_lossy().into_owned());
    let mut sys = SaddlePointSystem::new(a, b, label);
    if sys.b.ncols() != sys.n() || !sys.a.is_square() {
        return Err(Error::InvalidSystem(format!(
            "A is {}x{} but B has {} columns",
            sys.a.nrows(),
            sys.a.ncols(),
            sys.b.ncols()
        )));
    }
    sys.rhs_all_ones();
    let report = sys.validate();
    if !report.b_full_rank.passed {
        return Err(Error::InvalidSystem(format!(
            "{}: {} (B may be rank deficient; try a larger drop_rows than {drop_rows})",
            report.b_full_rank.name, report.b_full_rank.detail
        )));
    }
    report.into_result()?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    #[test]
    fn toy_files() {
        let dir = tempfile::tempdir().unwrap();
        let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
        mm_write(&SparseMatrix::from_diagonal(&[2.0]), &pa).unwrap();
        mm_write(&SparseMatrix::identity(1), &pb).unwrap();
        let sys = load_system(&pa, &pb, 0).unwrap();
        assert_eq!((sys.n(), sys.m()), (1, 1));
        assert_eq!((sys.f.clone(), sys.g.clone()), (vec![3.0], vec![-1.0]));
    }

    #[test]
    fn dropping_a_duplicated_row() {
        let dir = tempfile::tempdir().unwrap();
        let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
        mm_write(&SparseMatrix::identity(4), &pa).unwrap();
        let b = SparseMatrix::from_rows(&[
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        mm_write(&b, &pb).unwrap();
        let err = load_system(&pa, &pb, 0).unwrap_err();
        assert!(err.to_string().contains("drop_rows"));
        let sys = load_system(&pa, &pb, 1).unwrap();
        assert_eq!(sys.m(), 2);
        let sys = load_system(&pa, &pb, 2).unwrap();
        assert_eq!(sys.m(), 1);
    }

    #[test]
    fn incompatible_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
        mm_write(&SparseMatrix::identity(3), &pa).unwrap();
        mm_write(&SparseMatrix::identity(2), &pb).unwrap();
        assert!(matches!(
            load_system(&pa, &pb, 0),
            Err(Error::InvalidSystem(_))
        ));
    }
}
