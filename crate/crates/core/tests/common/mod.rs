#![allow(dead_code)]

use nalgebra::DMatrix;
use saddle_core::linalg::{DenseMatrix, SparseMatrix};
use saddle_core::precond::PrecondKind;
use saddle_core::random::{random_systems, seeded_rng};
use saddle_core::saddle::{BlockVector, SaddlePointSystem};

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.nrows(), m.ncols(), m.values())
}

pub fn sparse_na(m: &SparseMatrix) -> DMatrix<f64> {
    to_na(&m.to_dense())
}

/// `[[A, Bᵀ], [-B, 0]]`.
pub fn saddle_na(sys: &SaddlePointSystem) -> DMatrix<f64> {
    let (n, m) = (sys.n(), sys.m());
    let a = sparse_na(&sys.a);
    let b = sparse_na(&sys.b);
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(&a);
    k.view_mut((0, n), (n, m)).copy_from(&b.transpose());
    k.view_mut((n, 0), (m, n)).copy_from(&(-&b));
    k
}

/// The preconditioner matrix of `kind` assembled from its block formula.
pub fn precond_na(sys: &SaddlePointSystem, kind: PrecondKind, alpha: f64) -> DMatrix<f64> {
    let (n, m) = (sys.n(), sys.m());
    let a = sparse_na(&sys.a);
    let b = sparse_na(&sys.b);
    let bt = b.transpose();
    let (tl, tr, br) = match kind {
        PrecondKind::None => return DMatrix::identity(n + m, n + m),
        PrecondKind::Hss => (
            &a + DMatrix::identity(n, n) * alpha,
            &bt + (&a * &bt) / alpha,
            DMatrix::identity(m, m) * alpha,
        ),
        PrecondKind::Rhss => (a.clone(), (&a * &bt) / alpha, DMatrix::zeros(m, m)),
        PrecondKind::Rehss => (a.clone(), &a * &bt, DMatrix::identity(m, m) * alpha),
    };
    let mut p = DMatrix::zeros(n + m, n + m);
    p.view_mut((0, 0), (n, n)).copy_from(&tl);
    p.view_mut((0, n), (n, m)).copy_from(&tr);
    p.view_mut((n, 0), (m, n)).copy_from(&(-&b));
    p.view_mut((n, n), (m, m)).copy_from(&br);
    p
}

pub fn block_na(v: &BlockVector) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_vec(v.to_flat())
}

pub fn random_block(seed: u64, n: usize, m: usize) -> BlockVector {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let x = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let y = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    BlockVector::new(x, y)
}

/// The twenty random systems shared by the property checks.
pub fn desk_systems(seed: u64, count: usize, max_n: usize, max_m: usize) -> Vec<SaddlePointSystem> {
    random_systems(seed, count, (max_m.max(4), max_n), (1, max_m)).unwrap()
}

pub fn toy() -> SaddlePointSystem {
    let mut sys = SaddlePointSystem::new(
        SparseMatrix::from_diagonal(&[2.0]),
        SparseMatrix::identity(1),
        "toy",
    );
    sys.rhs_all_ones();
    sys
}

/// Symmetric eigenvalues via nalgebra, ascending.
pub fn na_sym_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Real parts of the eigenvalues of a general matrix via a nalgebra Schur
/// form, sorted. Also returns the largest imaginary part seen.
pub fn na_general_eigs(m: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let eig = m.clone().complex_eigenvalues();
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    let im = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    re.sort_by(f64::total_cmp);
    (re, im)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let den = b
        .iter()
        .map(|y| y * y)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    num / den
}
