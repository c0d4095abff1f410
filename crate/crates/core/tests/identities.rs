//! Properties of the coefficient recursions over random stiffly accurate
//! DIRK tableaus.

use proptest::prelude::*;
use sldirk_core::order::{kinetic_coefficients, limit_coefficients, verify_theorem_identities};
use sldirk_core::{catalog, order_report, ButcherTableau};

mod common;
use common::arb_tableau;

/// Solves the 2x2 system `m x = r`.
fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> [f64; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ]
}

fn mat_vec(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Stages of `f' = q f` from the Butcher form
/// `f_k = f0 + h sum_{j<=k} a_kj q f_j`.
fn butcher_stages(t: &ButcherTableau, q: [[f64; 2]; 2], h: f64, f0: [f64; 2]) -> Vec<[f64; 2]> {
    let s = t.stages();
    let mut stages: Vec<[f64; 2]> = Vec::with_capacity(s);
    for k in 0..s {
        let mut r = f0;
        for (j, fj) in stages.iter().enumerate() {
            let qf = mat_vec(q, *fj);
            r[0] += h * t.a(k, j) * qf[0];
            r[1] += h * t.a(k, j) * qf[1];
        }
        let akk = h * t.a(k, k);
        let m = [
            [1.0 - akk * q[0][0], -akk * q[0][1]],
            [-akk * q[1][0], 1.0 - akk * q[1][1]],
        ];
        stages.push(solve2(m, r));
    }
    stages
}

/// The same stages from the Shu-Osher form
/// `f_k = (1 - sum b_kj) f0 + sum b_kj f_j + h a_kk q f_k`.
fn shu_osher_stages(t: &ButcherTableau, q: [[f64; 2]; 2], h: f64, f0: [f64; 2]) -> Vec<[f64; 2]> {
    let so = t.to_shu_osher().unwrap();
    let s = so.stages();
    let mut stages: Vec<[f64; 2]> = Vec::with_capacity(s);
    for k in 0..s {
        let mut r = [so.base_weight(k) * f0[0], so.base_weight(k) * f0[1]];
        for (j, fj) in stages.iter().enumerate() {
            r[0] += so.b(k, j) * fj[0];
            r[1] += so.b(k, j) * fj[1];
        }
        let akk = h * so.diag(k);
        let m = [
            [1.0 - akk * q[0][0], -akk * q[0][1]],
            [-akk * q[1][0], 1.0 - akk * q[1][1]],
        ];
        stages.push(solve2(m, r));
    }
    stages
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_tableaus_are_valid(t in arb_tableau()) {
        prop_assert!(t.validate().is_empty(), "{}", t.validate());
    }

    #[test]
    fn stage_identities_hold(t in arb_tableau()) {
        let so = t.to_shu_osher().unwrap();
        let r = verify_theorem_identities(&so);
        prop_assert!(r.max_abs() < 1e-10, "{r}");
    }

    #[test]
    fn shu_osher_reconstructs_a(t in arb_tableau()) {
        let so = t.to_shu_osher().unwrap();
        let back = so.reconstruct_a();
        for (x, y) in back.iter().zip(t.a_matrix()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn shu_osher_stages_equal_butcher_stages(
        t in arb_tableau(),
        b in 0.0..1.0f64,
        h in 0.01..5.0f64,
        f0 in prop::array::uniform2(-1.0..1.0f64),
    ) {
        // The relaxation Jacobian of the linear two-velocity model.
        let q = [[0.5 * (b - 1.0), 0.5 * (1.0 + b)], [0.5 * (1.0 - b), -0.5 * (1.0 + b)]];
        let x = butcher_stages(&t, q, h, f0);
        let y = shu_osher_stages(&t, q, h, f0);
        for (u, v) in x.iter().zip(&y) {
            for i in 0..2 {
                prop_assert!((u[i] - v[i]).abs() < 1e-12 * (1.0 + u[i].abs()), "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn stage_one_values(t in arb_tableau()) {
        let so = t.to_shu_osher().unwrap();
        let kc = kinetic_coefficients(&so);
        let lc = limit_coefficients(&so, &kc);
        let a = t.a(0, 0);
        prop_assert_eq!(kc.c[0], a);
        prop_assert!((kc.d[0] - a * a).abs() < 1e-15 * (1.0 + a * a));
        prop_assert!((kc.g[0] - 0.5 * a * a * a).abs() < 1e-14 * (1.0 + a * a * a));
        prop_assert!((kc.h[0] - a * a * a).abs() < 1e-14 * (1.0 + a * a * a));
        prop_assert_eq!(lc.d[0], 0.0);
        prop_assert_eq!(lc.g[0], 0.0);
        prop_assert_eq!(lc.h[0], 0.0);
        prop_assert!((lc.b[0] - a * a).abs() < 1e-15 * (1.0 + a * a));
    }
}

#[test]
fn third_order_plus_asymptotic_condition_gives_fluid_third_order() {
    for t in catalog() {
        let r = order_report(&t, 1e-10).unwrap();
        let g = r.residual("G_s").unwrap();
        if r.kinetic_order == 3 && g < 1e-10 {
            assert_eq!(r.fluid_order, 3, "{}", t.name());
        }
    }
}

#[test]
fn kinetic_second_order_condition_is_the_classical_one() {
    // d_s = sum_k b_k c_k for every catalog tableau.
    for t in catalog() {
        let r = order_report(&t, 1e-10).unwrap();
        let s = t.stages();
        let classical: f64 = (0..s).map(|k| t.b()[k] * t.c()[k]).sum();
        let d = r.kinetic.d[s - 1];
        assert!(
            (d - classical).abs() < 1e-12,
            "{}: {d} vs {classical}",
            t.name()
        );
    }
}
