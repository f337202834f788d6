mod common;

use common::{desk_systems, rel_err, saddle_na};
use nalgebra::DVector;
use saddle_core::krylov::{gmres, gmres_full, GmresConfig, StopRule, Termination};
use saddle_core::precond::{build_precond, InnerStrategy, PrecondKind};
use saddle_core::BlockVector;

#[test]
fn restarted_gmres_matches_dense_solve() {
    for sys in desk_systems(31, 8, 60, 20) {
        let b = sys.rhs();
        let oracle = saddle_na(&sys)
            .lu()
            .solve(&DVector::from_vec(b.to_flat()))
            .unwrap();
        let x0 = BlockVector::zeros(sys.n(), sys.m());
        for kind in [
            PrecondKind::None,
            PrecondKind::Hss,
            PrecondKind::Rhss,
            PrecondKind::Rehss,
        ] {
            let ctx = build_precond(&sys, kind, 1.0, InnerStrategy::direct()).unwrap();
            let cfg = GmresConfig {
                restart: 10,
                ..GmresConfig::default()
            };
            let (x, rep) = gmres(&sys, &ctx, &b, &x0, &cfg).unwrap();
            assert_eq!(rep.termination, Termination::Converged, "{kind}");
            assert!(rep.true_relres <= 1e-12);
            assert!(rel_err(&x.to_flat(), oracle.as_slice()) < 1e-7, "{kind}");
            let mut bounds = rep.cycle_starts.clone();
            bounds.push(rep.residual_history.len());
            for c in bounds.windows(2) {
                let cycle = &rep.residual_history[c[0]..c[1]];
                assert!(cycle.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            }
        }
    }
}

#[test]
fn literal_rule_and_limits() {
    let sys = &desk_systems(32, 1, 40, 10)[0];
    let b = sys.rhs();
    let x0 = BlockVector::zeros(sys.n(), sys.m());
    let ctx = build_precond(sys, PrecondKind::Hss, 1e-2, InnerStrategy::direct()).unwrap();
    let cfg = GmresConfig {
        stop_rule: StopRule::Literal,
        ..GmresConfig::default()
    };
    let (_, rep) = gmres(sys, &ctx, &b, &x0, &cfg).unwrap();
    assert!(rep.converged);
    let cfg = GmresConfig {
        restart: 2,
        max_restarts: 1,
        ..GmresConfig::default()
    };
    let (_, rep) = gmres(sys, &ctx, &b, &x0, &cfg).unwrap();
    assert_eq!(rep.termination, Termination::MaxRestarts);
    assert!(!rep.converged);
    assert_eq!(rep.restarts, 1);
    let bad = GmresConfig {
        restart: 0,
        ..GmresConfig::default()
    };
    assert!(gmres(sys, &ctx, &b, &x0, &bad).is_err());
}

#[test]
fn full_gmres_iteration_bound() {
    for sys in desk_systems(33, 10, 80, 30) {
        let ctx = build_precond(&sys, PrecondKind::Rehss, 1e-1, InnerStrategy::direct()).unwrap();
        let x0 = BlockVector::zeros(sys.n(), sys.m());
        let (x, rep) = gmres_full(&sys, &ctx, &sys.rhs(), &x0, 1e-10).unwrap();
        assert!(rep.converged && rep.total_inner_iterations <= sys.m() + 1);
        assert!(x.sub(&BlockVector::ones(sys.n(), sys.m())).max_abs() < 1e-6);
    }
}
