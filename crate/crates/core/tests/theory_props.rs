mod common;

use common::{desk_systems, na_general_eigs, na_sym_eigs, precond_na, saddle_na, sparse_na, toy};
use nalgebra::DMatrix;
use saddle_core::precond::{build_precond, InnerStrategy, PrecondKind};
use saddle_core::problems::{generate_stokes, Flow, StokesSpec};
use saddle_core::random::{corollary_system, seeded_rng};
use saddle_core::saddle::SaddlePointSystem;
use saddle_core::spectral::{
    ahat_eigs, alpha_limit_study, general_eigs, minpoly_check, preconditioned_dense,
    preconditioned_spectrum, AT_ONE_TOL,
};
use saddle_core::theory::{
    compute_bounds, rehss_iterate, rhss_radius, spectral_radius_gamma, ConvergenceBounds,
};

/// Spectral radius of `I - P⁻¹𝒜` from dense matrices.
fn dense_radius(sys: &SaddlePointSystem, kind: PrecondKind, alpha: f64) -> f64 {
    let p = precond_na(sys, kind, alpha);
    let t = p.lu().solve(&saddle_na(sys)).unwrap();
    let g = DMatrix::identity(sys.dim(), sys.dim()) - t;
    g.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn oracle_bounds(sys: &SaddlePointSystem) -> (f64, f64, f64, f64) {
    let a = sparse_na(&sys.a);
    let b = sparse_na(&sys.b);
    let a_inv = a.clone().try_inverse().unwrap();
    let n = sys.n();
    let q = &b * (a_inv.clone() * 0.5 - DMatrix::identity(n, n)) * b.transpose();
    let delta = *na_sym_eigs(&q).last().unwrap();
    let la = na_sym_eigs(&a);
    let sb = na_sym_eigs(&(&b * b.transpose()));
    let theta = 0.5 * sb.last().unwrap() / la[0] - sb[0];
    let l = (&b * b.transpose()).cholesky().unwrap().l();
    let l_inv = l.try_inverse().unwrap();
    let mu = na_sym_eigs(&(&l_inv * &b * &a_inv * b.transpose() * l_inv.transpose()));
    (delta, theta, *mu.last().unwrap(), mu[0])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn bounds_match_dense_oracle() {
    for sys in desk_systems(21, 20, 60, 20) {
        let b: ConvergenceBounds = compute_bounds(&sys).unwrap();
        let (delta, theta, mu1, mu_m) = oracle_bounds(&sys);
        assert!(close(b.delta, delta, 1e-9), "{} vs {delta}", b.delta);
        assert!(close(b.theta, theta, 1e-9));
        assert!(close(b.mu1, mu1, 1e-9) && close(b.mu_m, mu_m, 1e-9));
        assert!(close(b.alpha_opt_rhss, 2.0 / (mu1 + mu_m), 1e-9));
        assert!(b.delta <= b.theta + 1e-10 * b.theta.abs().max(1.0));
    }
}

#[test]
fn minimal_polynomial_bound() {
    let mut systems = desk_systems(22, 20, 120, 40);
    for n in [4, 8] {
        let mut sys = generate_stokes(&StokesSpec::new(n, Flow::LidDriven)).unwrap();
        sys.rhs_all_ones();
        systems.push(sys);
    }
    for sys in &systems {
        let c = minpoly_check(sys, 1.0, 1e-10).unwrap();
        assert!(
            c.pass && c.iterations <= sys.m() + 1,
            "{}: {c:?}",
            sys.label
        );
    }
}

#[test]
fn rehss_converges_above_threshold() {
    for sys in desk_systems(23, 20, 50, 15) {
        let floor = compute_bounds(&sys).unwrap().rehss_alpha_floor();
        for offset in [1.1e-3, 1e-1, 1.0, 1e1, 1e3] {
            let alpha = floor + offset;
            let rho = dense_radius(&sys, PrecondKind::Rehss, alpha);
            assert!(rho < 1.0, "{}: rho={rho} at alpha={alpha}", sys.label);
            let est = spectral_radius_gamma(&sys, alpha, 1e-6, 50_000).unwrap();
            assert!((est - rho).abs() < 1e-2, "{est} vs {rho}");
        }
    }
}

#[test]
fn corollary_systems_converge_for_any_alpha() {
    let mut rng = seeded_rng(24);
    for _ in 0..5 {
        let sys = corollary_system(&mut rng, 20, 6, 1.5).unwrap();
        assert!(compute_bounds(&sys).unwrap().corollary_holds);
        for alpha in [1e-4, 1.0, 1e4] {
            assert!(dense_radius(&sys, PrecondKind::Rehss, alpha) < 1.0);
        }
        let u0 = saddle_core::BlockVector::zeros(sys.n(), sys.m());
        let (u, it) = rehss_iterate(&sys, 1.0, &u0, 1e-10, 5000).unwrap();
        assert!(it.converged);
        assert!(
            u.sub(&saddle_core::BlockVector::ones(sys.n(), sys.m()))
                .max_abs()
                < 1e-6
        );
    }
}

#[test]
fn rhss_interval_and_optimum() {
    let mut systems = desk_systems(25, 10, 40, 12);
    systems.push(toy());
    for sys in &systems {
        let b = compute_bounds(sys).unwrap();
        let upper = b.rhss_upper;
        assert!(dense_radius(sys, PrecondKind::Rhss, 0.9 * upper) < 1.0);
        assert!(dense_radius(sys, PrecondKind::Rhss, 1.1 * upper) > 1.0);
        let at_opt = rhss_radius(sys, b.alpha_opt_rhss).unwrap();
        let expected = (b.mu1 - b.mu_m) / (b.mu1 + b.mu_m);
        assert!((at_opt - expected).abs() < 1e-8, "{at_opt} vs {expected}");
        for k in 1..=20 {
            let alpha = upper * k as f64 / 21.0;
            assert!(at_opt <= rhss_radius(sys, alpha).unwrap() + 1e-8);
        }
    }
}

#[test]
fn gamma_spectrum_is_one_minus_ahat() {
    for sys in desk_systems(26, 6, 30, 10) {
        let alpha = 0.5;
        let p = precond_na(&sys, PrecondKind::Rehss, alpha);
        let g = DMatrix::identity(sys.dim(), sys.dim()) - p.lu().solve(&saddle_na(&sys)).unwrap();
        let (re, im) = na_general_eigs(&g);
        assert!(im < 1e-8);
        let mut expected: Vec<f64> = vec![0.0; sys.n()];
        expected.extend(ahat_eigs(&sys, alpha).unwrap().iter().map(|l| 1.0 - l));
        expected.sort_by(f64::total_cmp);
        for (x, y) in re.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn rehss_spectrum_structure() {
    let mut systems = desk_systems(27, 8, 200, 60);
    let mut mac = generate_stokes(&StokesSpec::new(8, Flow::LidDriven)).unwrap();
    mac.rhs_all_ones();
    systems.push(mac);
    for sys in &systems {
        assert!(sys.dim() <= 300);
        for alpha in [1e-2, 1.0, 1e2] {
            let ctx =
                build_precond(sys, PrecondKind::Rehss, alpha, InnerStrategy::direct()).unwrap();
            let (mut re, im) = general_eigs(&preconditioned_dense(&ctx).unwrap()).unwrap();
            assert!(im.iter().all(|v| v.abs() < 1e-8));
            re.sort_by(f64::total_cmp);
            let report = preconditioned_spectrum(&ctx).unwrap();
            assert!(report.n_at_one >= sys.n());
            assert!(report.min_real > 0.0);
            for (x, y) in re.iter().zip(&report.eigenvalues_real) {
                assert!((x - y).abs() < 1e-8, "{}: {x} vs {y}", sys.label);
            }
            let ahat = ahat_eigs(sys, alpha).unwrap();
            assert!(ahat.iter().all(|&l| l > 0.0));
            let unit = re.iter().filter(|l| (*l - 1.0).abs() < AT_ONE_TOL).count();
            let ahat_unit = ahat
                .iter()
                .filter(|l| (*l - 1.0).abs() < AT_ONE_TOL)
                .count();
            assert_eq!(unit, sys.n() + ahat_unit);
        }
    }
}

#[test]
fn small_alpha_interval() {
    for sys in desk_systems(28, 10, 40, 12) {
        let rows = alpha_limit_study(&sys, &[1.0, 1e-4, 1e-10]).unwrap();
        let last = rows.last().unwrap();
        let la = na_sym_eigs(&sparse_na(&sys.a));
        assert!(close(last.lower, 1.0 / la.last().unwrap(), 1e-9));
        assert!(close(last.upper, 1.0 / la[0], 1e-9));
        assert!(last.inside(1e-4), "{last:?}");
    }
    assert!(alpha_limit_study(&toy(), &[1e-2, 1.0]).is_err());
}
