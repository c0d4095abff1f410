//! The SL-DIRK solver on a single Fourier mode of the linear two-velocity
//! model against powers of the amplification matrix.

use num_complex::Complex64;
use sldirk_core::quadrature::GaussLegendre;
use sldirk_core::sl::{DgField, DgSpace, Mesh1D, SlSolver};
use sldirk_core::stability::{Amplifier, Mat2, StabilityPoint};
use sldirk_core::{lookup, LinearTwoVelocity};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `(2 / L) int f(x) e^{-i k x} dx` of a DG component, by a 12-point Gauss
/// rule per element.
fn mode(f: &DgField, c: usize, k: f64) -> Complex64 {
    let space = f.space();
    let mesh = space.mesh();
    let g = GaussLegendre::new(12);
    let mut acc = Complex64::new(0.0, 0.0);
    for e in 0..mesh.len() {
        let (lo, hi) = (mesh.left(e), mesh.left(e) + mesh.dx());
        acc += Complex64::new(
            g.integrate(lo, hi, |x| f.eval(c, x) * (k * x).cos()),
            -g.integrate(lo, hi, |x| f.eval(c, x) * (k * x).sin()),
        );
    }
    acc * (2.0 / mesh.length())
}

fn run_case(name: &str, b: f64, xi: f64, n: usize, steps: usize, cfl: f64) -> f64 {
    let model = LinearTwoVelocity::new(b);
    let space = DgSpace::new(Mesh1D::new(0.0, 1.0, n).unwrap(), 2).unwrap();
    let k = TWO_PI;
    let amp_in = [Complex64::new(0.7, 0.2), Complex64::new(-0.3, 0.5)];
    let f0 = DgField::project(&space, 2, |c, x| {
        (amp_in[c] * Complex64::new((k * x).cos(), (k * x).sin())).re
    });
    let dt = cfl * space.mesh().dx();
    let eps = dt / xi;
    let t = lookup(name).unwrap();
    let solver = SlSolver::new(&model, &t, &space, eps).unwrap();
    let plan = solver.plan(dt);
    let mut f = f0.clone();
    for i in 0..steps {
        f = solver.step(&plan, &f, i).unwrap();
    }
    let m = Amplifier::new(&t).unwrap().matrix(&StabilityPoint {
        b,
        k_dt: k * dt,
        xi,
    });
    let mut p = Mat2::identity();
    for _ in 0..steps {
        p = m * p;
    }
    let start = [mode(&f0, 0, k), mode(&f0, 1, k)];
    let expect = p.apply(start);
    let got = [mode(&f, 0, k), mode(&f, 1, k)];
    (got[0] - expect[0]).norm().max((got[1] - expect[1]).norm())
}

#[test]
fn solver_matches_amplification_powers() {
    // The residual mismatch is spatial and shrinks like dx^6.
    for name in ["BE", "DIRK2", "DIRK3-B2", "DIRK3-B10"] {
        for xi in [0.1, 1.0, 10.0] {
            let err = run_case(name, 0.6, xi, 32, 10, 0.5);
            assert!(err < 1e-8, "{name} xi={xi}: {err:e}");
        }
    }
}

#[test]
fn mismatch_is_spatial() {
    let coarse = run_case("DIRK3-B5", 0.3, 2.0, 16, 5, 0.7);
    let fine = run_case("DIRK3-B5", 0.3, 2.0, 32, 5, 0.7);
    assert!(coarse / fine > 30.0, "{coarse:e} {fine:e}");
}
