//! Order conditions of the kinetic scheme and of its limiting fluid scheme.
//!
//! Applying an SA-DIRK method along characteristics gives a scheme for the
//! distribution `f` (the *kinetic* scheme). As the relaxation time goes to
//! zero its moments obey an explicit-RK-like scheme for the macroscopic
//! state `U` (the *fluid* scheme), whose Taylor expansion carries extra
//! elementary differentials. Both sets of Taylor coefficients are built
//! stage by stage from the Shu-Osher coefficients `b_kj`; no tree sums are
//! involved.
//!
//! Kinetic expansion of stage `k`, with `Q` the relaxation operator:
//!
//! ```text
//! f(k) = f + c_k dt Q + d_k dt^2 Q'Q + dt^3 (g_k Q''(Q,Q) + h_k Q'Q'Q) + O(dt^4)
//! ```
//!
//! Fluid expansion, with `T` the limiting flux operator and `B`, `B~` the
//! extra second and third order transport terms:
//!
//! ```text
//! U(k) = U + C_k dt T + dt^2 (D_k T'T + B_k B)
//!          + dt^3 (G_k T''(T,T) + H_k T'T'T + B*_k T'B + B**_k B'T + B***_k B~) + O(dt^4)
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::butcher::{ButcherTableau, ShuOsherForm, TableauError};

/// Default absolute tolerance on order-condition residuals.
pub const DEFAULT_ORDER_TOL: f64 = 1e-10;

/// Per-stage kinetic Taylor coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticCoefficients {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

/// Per-stage Taylor coefficients of the limiting fluid scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCoefficients {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub b_star: Vec<f64>,
    pub b_star2: Vec<f64>,
    pub b_star3: Vec<f64>,
}

impl KineticCoefficients {
    pub fn stages(&self) -> usize {
        self.c.len()
    }
}

impl LimitCoefficients {
    pub fn stages(&self) -> usize {
        self.c.len()
    }
}

/// Forward recursion for `c_k, d_k, g_k, h_k`.
pub fn kinetic_coefficients(so: &ShuOsherForm) -> KineticCoefficients {
    let s = so.stages();
    let mut kc = KineticCoefficients {
        c: vec![0.0; s],
        d: vec![0.0; s],
        g: vec![0.0; s],
        h: vec![0.0; s],
    };
    for k in 0..s {
        let a = so.diag(k);
        let row = so.b_row(k);
        let dot = |v: &[f64]| -> f64 { row.iter().zip(v).map(|(b, x)| b * x).sum() };
        let c = dot(&kc.c) + a;
        let d = dot(&kc.d) + a * c;
        let g = dot(&kc.g) + 0.5 * a * c * c;
        let h = dot(&kc.h) + a * d;
        kc.c[k] = c;
        kc.d[k] = d;
        kc.g[k] = g;
        kc.h[k] = h;
    }
    kc
}

/// Forward recursion for the fluid-scheme coefficients.
pub fn limit_coefficients(so: &ShuOsherForm, kc: &KineticCoefficients) -> LimitCoefficients {
    let s = so.stages();
    let mut lc = LimitCoefficients {
        c: kc.c.clone(),
        d: vec![0.0; s],
        b: vec![0.0; s],
        g: vec![0.0; s],
        h: vec![0.0; s],
        b_star: vec![0.0; s],
        b_star2: vec![0.0; s],
        b_star3: vec![0.0; s],
    };
    let c = &kc.c;
    for k in 0..s {
        let ck = c[k];
        let base = so.base_weight(k);
        let (mut d, mut b, mut g, mut h) = (0.0, base * ck * ck, 0.0, 0.0);
        let (mut bs, mut bs2, mut bs3) = (0.0, 0.0, base * ck * ck * ck);
        for (j, &bkj) in so.b_row(k).iter().enumerate() {
            let cj = c[j];
            let dc = ck - cj;
            d += bkj * (lc.d[j] + dc * cj);
            b += bkj * (lc.b[j] + dc * dc);
            g += bkj * (lc.g[j] + 0.5 * dc * cj * cj);
            h += bkj * (lc.h[j] + dc * lc.d[j]);
            bs += bkj * (lc.b_star[j] + dc * lc.b[j]);
            bs2 += bkj * (lc.b_star2[j] + dc * dc * cj);
            bs3 += bkj * (lc.b_star3[j] + dc * dc * dc);
        }
        lc.d[k] = d;
        lc.b[k] = b;
        lc.g[k] = g;
        lc.h[k] = h;
        lc.b_star[k] = bs;
        lc.b_star2[k] = bs2;
        lc.b_star3[k] = bs3;
    }
    lc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Kinetic,
    Fluid,
}

/// One order condition evaluated at the last stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub regime: Regime,
    /// Lowest order that requires this condition.
    pub order: u8,
    pub value: f64,
    pub target: f64,
}

impl Condition {
    pub fn residual(&self) -> f64 {
        (self.value - self.target).abs()
    }
}

/// Kinetic and fluid orders (capped at 3) plus every residual.
///
/// An order of 3 means "at least 3": fourth-order conditions are not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub tableau: alloc::string::String,
    pub kinetic_order: u8,
    pub fluid_order: u8,
    pub tol: f64,
    pub conditions: Vec<Condition>,
    pub kinetic: KineticCoefficients,
    pub limit: LimitCoefficients,
}

impl OrderReport {
    pub fn residual(&self, name: &str) -> Option<f64> {
        self.conditions
            .iter()
            .find(|c| c.name == name)
            .map(Condition::residual)
    }

    pub fn conditions_of(&self, regime: Regime) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(move |c| c.regime == regime)
    }

    /// Largest residual among the conditions up to `order` in `regime`.
    pub fn max_residual(&self, regime: Regime, order: u8) -> f64 {
        self.conditions_of(regime)
            .filter(|c| c.order <= order)
            .map(Condition::residual)
            .fold(0.0, f64::max)
    }
}

fn achieved_order(conditions: &[Condition], regime: Regime, tol: f64) -> u8 {
    let mut order = 0;
    for p in 1..=3 {
        let ok = conditions
            .iter()
            .filter(|c| c.regime == regime && c.order == p)
            .all(|c| c.residual() <= tol);
        if !ok {
            break;
        }
        order = p;
    }
    order
}

/// Evaluates the kinetic and fluid order conditions of `t`.
pub fn order_report(t: &ButcherTableau, tol: f64) -> Result<OrderReport, TableauError> {
    let so = t.to_shu_osher()?;
    let kinetic = kinetic_coefficients(&so);
    let limit = limit_coefficients(&so, &kinetic);
    let s = so.stages() - 1;
    let cond = |name, regime, order, value, target| Condition {
        name,
        regime,
        order,
        value,
        target,
    };
    use Regime::{Fluid, Kinetic};
    let conditions = vec![
        cond("c_s", Kinetic, 1, kinetic.c[s], 1.0),
        cond("d_s", Kinetic, 2, kinetic.d[s], 0.5),
        cond("g_s", Kinetic, 3, kinetic.g[s], 1.0 / 6.0),
        cond("h_s", Kinetic, 3, kinetic.h[s], 1.0 / 6.0),
        cond("C_s", Fluid, 1, limit.c[s], 1.0),
        cond("D_s", Fluid, 2, limit.d[s], 0.5),
        cond("B_s", Fluid, 2, limit.b[s], 0.0),
        cond("G_s", Fluid, 3, limit.g[s], 1.0 / 6.0),
        cond("H_s", Fluid, 3, limit.h[s], 1.0 / 6.0),
        cond("B*_s", Fluid, 3, limit.b_star[s], 0.0),
        cond("B**_s", Fluid, 3, limit.b_star2[s], 0.0),
        cond("B***_s", Fluid, 3, limit.b_star3[s], 0.0),
    ];
    Ok(OrderReport {
        tableau: t.name().into(),
        kinetic_order: achieved_order(&conditions, Kinetic, tol),
        fluid_order: achieved_order(&conditions, Fluid, tol),
        tol,
        conditions,
        kinetic,
        limit,
    })
}

/// Names of the stage identities checked by [`verify_theorem_identities`].
pub const IDENTITY_NAMES: [&str; 6] = [
    "d+D-c^2",
    "B-(d-D)",
    "2G-H+2g-cd",
    "B*-(2G-2H)",
    "B**-(2g-2H-c^3+2cD)",
    "B***-(c^3-3B**-6G)",
];

/// Per-stage residuals of the identities linking kinetic and fluid
/// coefficients. They hold for every DIRK tableau with positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals {
    pub per_stage: Vec<[f64; 6]>,
}

impl IdentityResiduals {
    pub fn max_abs(&self) -> f64 {
        self.per_stage
            .iter()
            .flatten()
            .fold(0.0, |m, r| m.max(r.abs()))
    }
}

impl fmt::Display for IdentityResiduals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.per_stage.iter().enumerate() {
            write!(f, "stage {}:", k + 1)?;
            for (name, v) in IDENTITY_NAMES.iter().zip(r) {
                write!(f, " {name}={v:.3e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn verify_theorem_identities(so: &ShuOsherForm) -> IdentityResiduals {
    let kc = kinetic_coefficients(so);
    let lc = limit_coefficients(so, &kc);
    let per_stage = (0..so.stages())
        .map(|k| {
            let (c, d, g) = (kc.c[k], kc.d[k], kc.g[k]);
            let (dd, bb, gg, hh) = (lc.d[k], lc.b[k], lc.g[k], lc.h[k]);
            [
                d + dd - c * c,
                bb - (d - dd),
                2.0 * gg - hh + 2.0 * g - c * d,
                lc.b_star[k] - (2.0 * gg - 2.0 * hh),
                lc.b_star2[k] - (2.0 * g - 2.0 * hh - c * c * c + 2.0 * c * dd),
                lc.b_star3[k] - (c * c * c - 3.0 * lc.b_star2[k] - 6.0 * gg),
            ]
        })
        .collect();
    IdentityResiduals { per_stage }
}
