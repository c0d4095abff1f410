//! Temporal convergence on the test problems.

use sldirk::harness::{run_convergence, run_problem, ConvergenceStudy};
use sldirk::problems::{Problem, ProblemKind};
use sldirk_core::lookup;
use sldirk_core::sl::{invariant_totals, l1_error, moments_field, StageClosure};

fn tableaus(names: &[&str]) -> Vec<sldirk_core::ButcherTableau> {
    names.iter().map(|n| lookup(n).unwrap()).collect()
}

#[test]
fn kinetic_regime_shows_classical_orders() {
    // p = 4 keeps the spatial error of the small-CFL runs below the
    // temporal error of the third-order schemes.
    let mut study = ConvergenceStudy::new(
        ProblemKind::Linear,
        tableaus(&["BE", "DIRK2", "DIRK3-B2", "DIRK3-B10"]),
        vec![1e-2],
    );
    study.problem.degree = 4;
    let report = run_convergence(&study).unwrap();
    for (name, order) in [
        ("BE", 1.0),
        ("DIRK2", 2.0),
        ("DIRK3-B2", 3.0),
        ("DIRK3-B10", 3.0),
    ] {
        let slope = report.slope(name, 1e-2).unwrap();
        println!("{name}: slope {slope:.3}");
        assert!(
            (order - 0.3..=order + 0.4).contains(&slope),
            "{name}: slope {slope}"
        );
    }
}

#[test]
fn three_stage_dirk3_drops_to_second_order_in_the_fluid_regime() {
    let study = ConvergenceStudy::new(ProblemKind::Linear, tableaus(&["DIRK3-B2"]), vec![1e-6]);
    let slope = run_convergence(&study)
        .unwrap()
        .slope("DIRK3-B2", 1e-6)
        .unwrap();
    assert!((1.7..=2.4).contains(&slope), "slope {slope}");
}

/// L1 error of the moments at CFL `cfl` against a run at `cfl_ref`.
fn error_at(problem: &Problem, name: &str, eps: f64, cfl: f64, cfl_ref: f64) -> f64 {
    let t = lookup(name).unwrap();
    let run = |c| run_problem(problem, &t, eps, c, 0.2, StageClosure::Implicit, false).unwrap();
    let (a, r) = (run(cfl), run(cfl_ref));
    l1_error(
        &moments_field(a.model.as_ref(), &a.trajectory.field),
        &moments_field(r.model.as_ref(), &r.trajectory.field),
    )
    .unwrap()
}

#[test]
fn mesh_doubling_at_fixed_dt_leaves_the_p4_error_unchanged() {
    let mut coarse = Problem::new(ProblemKind::Linear);
    coarse.degree = 4;
    let mut fine = coarse.clone();
    fine.nx *= 2;
    let e1 = error_at(&coarse, "DIRK3-B10", 1e-2, 0.4, 0.001);
    let e2 = error_at(&fine, "DIRK3-B10", 1e-2, 0.8, 0.002);
    let rel = (e1 - e2).abs() / e1;
    assert!(rel < 0.05, "{e1:e} vs {e2:e}");
}

#[test]
fn nonlinear_model_runs_conservatively_in_both_regimes() {
    let problem = Problem::new(ProblemKind::Nonlinear);
    for eps in [1e-2, 1e-6] {
        for name in ["DIRK2", "DIRK3-B10"] {
            let out = run_problem(
                &problem,
                &lookup(name).unwrap(),
                eps,
                0.5,
                0.2,
                StageClosure::Implicit,
                false,
            )
            .unwrap();
            let d = &out.trajectory.diagnostics;
            let (m0, m1) = (d[0].invariants.rho(), d[d.len() - 1].invariants.rho());
            assert!((m1 - m0).abs() < 1e-12 * m0, "{name} eps={eps}: {m0} {m1}");
            assert!(out.trajectory.field.is_finite());
        }
    }
}

#[test]
fn bgk_kinetic_regime_is_stable_at_large_cfl() {
    let problem = Problem::new(ProblemKind::Bgk);
    for name in ["BE", "DIRK2", "DIRK3-B2", "DIRK3-B10"] {
        for cfl in [8.0, 16.0] {
            let out = run_problem(
                &problem,
                &lookup(name).unwrap(),
                1e-2,
                cfl,
                0.04,
                StageClosure::Implicit,
                false,
            )
            .unwrap();
            let f = &out.trajectory.field;
            assert!(f.is_finite());
            let u0 = &out.trajectory.diagnostics[0].invariants;
            let u1 = invariant_totals(out.model.as_ref(), f);
            for (a, b) in u0.as_slice().iter().zip(u1.as_slice()) {
                assert!((a - b).abs() < 1e-10 * a.abs(), "{name} cfl={cfl}: {a} {b}");
            }
        }
    }
}
