//! Seeded random saddle point systems for property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigs, DenseMatrix, SparseMatrix};
use crate::saddle::SaddlePointSystem;

const MAX_ATTEMPTS: usize = 32;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_dense<R: Rng>(rng: &mut R, nrows: usize, ncols: usize) -> DenseMatrix {
    let values = (0..nrows * ncols)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    DenseMatrix::from_row_major(nrows, ncols, values).expect("sizes match")
}

/// `MᵀM/n + shift·I` for a uniform random `M`.
fn random_spd<R: Rng>(rng: &mut R, n: usize, shift: f64) -> DenseMatrix {
    let m = uniform_dense(rng, n, n);
    let mut a = m
        .transpose()
        .matmul(&m)
        .expect("square")
        .scaled(1.0 / n as f64)
        .symmetrized();
    for i in 0..n {
        a[(i, i)] += shift;
    }
    a
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || m > n {
        return Err(Error::InvalidConfig(format!(
            "random systems need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    Ok(())
}

/// `A = s (MᵀM/n + 0.1 I)` with `s` drawn from `[0.05, 5]`, and a dense
/// uniform `B`. Small `s` gives `δ > 0`, so both sides of the convergence
/// threshold get exercised. The right-hand side is the all-ones one.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<SaddlePointSystem> {
    check_sizes(n, m)?;
    for _ in 0..MAX_ATTEMPTS {
        let s = rng.gen_range(0.05..5.0);
        let a = random_spd(rng, n, 0.1).scaled(s).symmetrized();
        let b = uniform_dense(rng, m, n);
        let mut sys = SaddlePointSystem::new(
            SparseMatrix::from_dense(&a),
            SparseMatrix::from_dense(&b),
            format!("random n={n} m={m}"),
        );
        if sys.validate().passed() {
            sys.rhs_all_ones();
            return Ok(sys);
        }
    }
    Err(Error::InvalidSystem(format!(
        "could not draw a valid {n}x{m} system"
    )))
}

/// A system whose `A` satisfies `λ_min(A) > ½κ(B)²` by the factor `margin`.
pub fn corollary_system<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    margin: f64,
) -> Result<SaddlePointSystem> {
    check_sizes(n, m)?;
    if !(margin > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "margin must exceed 1, got {margin}"
        )));
    }
    for _ in 0..MAX_ATTEMPTS {
        let b = uniform_dense(rng, m, n);
        let eig = sym_eigs(&b.matmul(&b.transpose())?.symmetrized())?;
        if !(eig[0] > 0.0) {
            continue;
        }
        let kappa_sq = eig.last().expect("m >= 1") / eig[0];
        let c = margin * 0.5 * kappa_sq;
        let mut a = random_spd(rng, n, 0.0).scaled(0.1 * c).symmetrized();
        for i in 0..n {
            a[(i, i)] += c;
        }
        let mut sys = SaddlePointSystem::new(
            SparseMatrix::from_dense(&a),
            SparseMatrix::from_dense(&b),
            format!("corollary n={n} m={m}"),
        );
        if sys.validate().passed() {
            sys.rhs_all_ones();
            return Ok(sys);
        }
    }
    Err(Error::InvalidSystem(format!(
        "could not draw a valid {n}x{m} system"
    )))
}

/// `count` systems with sizes drawn from the given inclusive ranges
/// (`m` is also capped at `n`).
pub fn random_systems(
    seed: u64,
    count: usize,
    n_range: (usize, usize),
    m_range: (usize, usize),
) -> Result<Vec<SaddlePointSystem>> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(n_range.0..=n_range.1);
            let m = rng.gen_range(m_range.0..=m_range.1).min(n);
            random_system(&mut rng, n, m)
        })
        .collect()
}
