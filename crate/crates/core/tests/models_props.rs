//! Conservation, equilibrium fixed point and moment consistency of the
//! three kinetic models.

use proptest::prelude::*;
use sldirk_core::{Bgk, KineticModel, LinearTwoVelocity, MacroState, NonlinearTwoVelocity};

fn bgk() -> Bgk {
    Bgk::uniform(15.0, 100).unwrap()
}

/// A positive two-bump distribution on the BGK velocity grid.
fn bumps(model: &Bgk, p: [f64; 6]) -> Vec<f64> {
    let [a1, m1, s1, a2, m2, s2] = p;
    model
        .velocity_set()
        .velocities()
        .iter()
        .map(|&v| {
            a1 * (-(v - m1).powi(2) / (2.0 * s1)).exp()
                + a2 * (-(v - m2).powi(2) / (2.0 * s2)).exp()
        })
        .collect()
}

fn arb_bumps() -> impl Strategy<Value = [f64; 6]> {
    (
        0.1..1.0f64,
        -2.0..2.0f64,
        0.5..3.0f64,
        0.0..1.0f64,
        -2.0..2.0f64,
        0.5..3.0f64,
    )
        .prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f])
}

fn max_abs(x: &MacroState) -> f64 {
    x.as_slice().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn two_velocity_models(b: f64) -> [Box<dyn KineticModel>; 2] {
    [
        Box::new(LinearTwoVelocity::new(b)),
        Box::new(NonlinearTwoVelocity::new(b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_velocity_relaxation_conserves(b in 0.0..=1.0f64, f in prop::array::uniform2(-2.0..2.0f64), eps in 1e-6..1.0f64) {
        for m in two_velocity_models(b) {
            let q = m.relaxation(&f, eps).unwrap();
            let drift = m.raw_moments(&q);
            // Scaled by eps so the bound is on Q itself.
            prop_assert!(max_abs(&drift) * eps < 1e-12, "{}: {drift}", m.name());
        }
    }

    #[test]
    fn bgk_relaxation_conserves(p in arb_bumps()) {
        let m = bgk();
        let f = bumps(&m, p);
        let q = m.relaxation(&f, 1.0).unwrap();
        let drift = m.raw_moments(&q);
        prop_assert!(max_abs(&drift) < 1e-12, "{drift}");
    }

    #[test]
    fn two_velocity_equilibrium_is_a_fixed_point(b in 0.0..=1.0f64, u in -3.0..3.0f64) {
        for m in two_velocity_models(b) {
            let eq = m.equilibrium(&MacroState::scalar(u)).unwrap();
            let back = m.moments(&eq).unwrap();
            prop_assert!((back.rho() - u).abs() < 1e-12);
            let q = m.relaxation(&eq, 1.0).unwrap();
            prop_assert!(q.iter().all(|x| x.abs() < 1e-12), "{}: {q:?}", m.name());
        }
    }

    #[test]
    fn bgk_equilibrium_is_a_fixed_point(rho in 0.2..3.0f64, u in -2.0..2.0f64, t in 0.5..4.0f64) {
        let m = bgk();
        let state = MacroState::from_primitive(rho, u, t);
        let eq = m.equilibrium(&state).unwrap();
        let back = m.moments(&eq).unwrap();
        for (x, y) in back.as_slice().iter().zip(state.as_slice()) {
            prop_assert!((x - y).abs() < 1e-12, "{back} vs {state}");
        }
        let q = m.relaxation(&eq, 1.0).unwrap();
        prop_assert!(q.iter().all(|x| x.abs() < 1e-12), "{:e}", q.iter().fold(0.0f64, |a, x| a.max(x.abs())));
    }

    #[test]
    fn linear_relaxation_is_the_collision_operator(b in 0.0..=1.0f64, f in prop::array::uniform2(-2.0..2.0f64), eps in 1e-3..10.0f64) {
        let m = LinearTwoVelocity::new(b);
        let q = m.relaxation(&f, eps).unwrap();
        let c = m.collision(f);
        for i in 0..2 {
            prop_assert!((q[i] - c[i] / eps).abs() < 1e-12 * (1.0 + (c[i] / eps).abs()));
        }
    }
}

#[test]
fn analytic_maxwellian_has_quadrature_level_moments() {
    let m = bgk().with_conservative_maxwellian(false);
    let eq = m
        .equilibrium(&MacroState::from_primitive(1.0, 0.0, 1.0))
        .unwrap();
    let back = m.moments(&eq).unwrap();
    assert!((back.rho() - 1.0).abs() < 1e-10, "{back}");
}
