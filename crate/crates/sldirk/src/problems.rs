//! The three test problems: a linear and a nonlinear two-velocity
//! relaxation system on `[0, 1]`, and 1D1V BGK on `[-1, 1]`.
//!
//! All initial data are well prepared: `f^0 = M[f^0]` at every node.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use sldirk_core::sl::{DgField, DgSpace, Mesh1D};
use sldirk_core::{
    models::maxwellian_into, Bgk, KineticModel, LinearTwoVelocity, MacroState, NonlinearTwoVelocity,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    /// `u_0 = exp(sin 2 pi x)`, `v_0 = b u_0`, `b = 0.6`.
    Linear,
    /// `u_0 = exp(sin 2 pi x) / 2`, `v_0 = b u_0^2`, `b = 0.2`.
    Nonlinear,
    /// `rho_0 = T_0 = 1`, `u_0 = [exp(-(10x-1)^2) - 2 exp(-(10x+3)^2)] / 10`.
    Bgk,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [Self::Linear, Self::Nonlinear, Self::Bgk];

    pub fn label(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Nonlinear => "nonlinear",
            Self::Bgk => "bgk",
        }
    }

    /// Example number in the usual numbering of these tests.
    pub fn example_id(self) -> &'static str {
        match self {
            Self::Linear => "5.1",
            Self::Nonlinear => "5.2",
            Self::Bgk => "5.3",
        }
    }

    pub fn default_t_final(self) -> f64 {
        match self {
            Self::Linear | Self::Nonlinear => 0.2,
            Self::Bgk => 0.04,
        }
    }

    /// CFL of the reference run in convergence studies.
    pub fn reference_cfl(self) -> f64 {
        match self {
            Self::Linear | Self::Nonlinear => 0.001,
            Self::Bgk => 0.01,
        }
    }

    pub fn default_cfls(self) -> Vec<f64> {
        match self {
            Self::Linear | Self::Nonlinear => vec![0.1, 0.2, 0.4, 0.8],
            Self::Bgk => vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }

    /// `0.2, 0.4, ..., 16.2`.
    pub fn paper_scale_cfls(self) -> Vec<f64> {
        (1..=81)
            .map(|i| (i as f64 * 0.2 * 10.0).round() / 10.0)
            .collect()
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "5.1" => Ok(Self::Linear),
            "nonlinear" | "5.2" => Ok(Self::Nonlinear),
            "bgk" | "5.3" => Ok(Self::Bgk),
            other => Err(Error::config(format!(
                "unknown model/example `{other}` (expected linear|5.1, nonlinear|5.2, bgk|5.3)"
            ))),
        }
    }
}

/// Model and discretization parameters of one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    /// Equilibrium parameter of the two-velocity models.
    pub b: f64,
    pub nx: usize,
    pub degree: usize,
    pub nv: usize,
    pub vmax: f64,
    /// BGK only: sample the analytic Maxwellian instead of the discretely
    /// conservative one.
    pub analytic_maxwellian: bool,
}

impl Problem {
    /// Desk-scale defaults: 160 elements, `p = 2`.
    pub fn new(kind: ProblemKind) -> Self {
        Self {
            kind,
            b: match kind {
                ProblemKind::Nonlinear => 0.2,
                _ => 0.6,
            },
            nx: 160,
            degree: 2,
            nv: 100,
            vmax: 15.0,
            analytic_maxwellian: false,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            ProblemKind::Bgk => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    pub fn model(&self) -> Result<Box<dyn KineticModel>> {
        Ok(match self.kind {
            ProblemKind::Linear => Box::new(LinearTwoVelocity::new(self.b)),
            ProblemKind::Nonlinear => Box::new(NonlinearTwoVelocity::new(self.b)),
            ProblemKind::Bgk => Box::new(
                Bgk::uniform(self.vmax, self.nv)
                    .map_err(|e| Error::config(e.to_string()))?
                    .with_conservative_maxwellian(!self.analytic_maxwellian),
            ),
        })
    }

    pub fn space(&self) -> Result<DgSpace> {
        let (lo, hi) = self.domain();
        Ok(DgSpace::new(Mesh1D::new(lo, hi, self.nx)?, self.degree)?)
    }

    /// Well-prepared initial distribution: the equilibrium of the initial
    /// macroscopic state, set node by node.
    pub fn initial(&self, model: &dyn KineticModel, space: &DgSpace) -> Result<DgField> {
        let ncomp = model.velocity_set().len();
        let mut f = DgField::zeros(space, ncomp);
        let mut buf = vec![0.0; ncomp];
        for idx in 0..space.ndof() {
            let x = space.dof_x(idx);
            match self.kind {
                ProblemKind::Linear => {
                    let u = (2.0 * PI * x).sin().exp();
                    buf[0] = 0.5 * (1.0 + self.b) * u;
                    buf[1] = 0.5 * (1.0 - self.b) * u;
                }
                ProblemKind::Nonlinear => {
                    let u = 0.5 * (2.0 * PI * x).sin().exp();
                    let v = self.b * u * u;
                    buf[0] = 0.5 * (u + v);
                    buf[1] = 0.5 * (u - v);
                }
                ProblemKind::Bgk => {
                    let u0 = bgk_initial_velocity(x);
                    if self.analytic_maxwellian {
                        maxwellian_into(model.velocity_set(), 1.0, u0, 1.0, &mut buf);
                    } else {
                        model
                            .equilibrium_into(&MacroState::from_primitive(1.0, u0, 1.0), &mut buf)
                            .map_err(|e| Error::config(format!("initial data: {e}")))?;
                    }
                }
            }
            f.scatter(idx, &buf);
        }
        Ok(f)
    }
}

pub fn bgk_initial_velocity(x: f64) -> f64 {
    let g = |y: f64| (-(y * y)).exp();
    0.1 * (g(10.0 * x - 1.0) - 2.0 * g(10.0 * x + 3.0))
}
