//! Random stiffly accurate DIRK tableaus for property tests.

use proptest::prelude::*;
use sldirk_core::ButcherTableau;

/// A random SA-DIRK tableau with `s` stages and diagonals in `(0.05, 2)`.
/// `diag` and `off` hold raw samples in `[0, 1)`.
fn tableau_from(s: usize, diag: &[f64], off: &[f64]) -> ButcherTableau {
    let mut a = vec![0.0; s * s];
    let mut it = off.iter();
    for k in 0..s {
        a[k * s + k] = 0.05 + 1.95 * diag[k];
        for j in 0..k {
            a[k * s + j] = 2.0 * it.next().unwrap() - 1.0;
        }
    }
    // c_s = 1: the remainder goes to a_s1 (off the diagonal when s > 1).
    let last = (s - 1) * s;
    if s == 1 {
        a[0] = 1.0;
    } else {
        let rest: f64 = a[last + 1..last + s].iter().sum();
        a[last] = 1.0 - rest;
    }
    let c = (0..s)
        .map(|k| a[k * s..k * s + k + 1].iter().sum())
        .collect();
    let b = a[last..].to_vec();
    ButcherTableau::new("random", a, b, c).unwrap()
}

pub fn arb_tableau() -> impl Strategy<Value = ButcherTableau> {
    (1usize..=5).prop_flat_map(|s| {
        (
            Just(s),
            prop::collection::vec(0.0..1.0f64, s),
            prop::collection::vec(0.0..1.0f64, s * (s - 1) / 2),
        )
            .prop_map(|(s, d, o)| tableau_from(s, &d, &o))
    })
}
