//! Prediction-correction SL-DIRK stepping.
//!
//! Stage `k` of a stiffly accurate DIRK tableau:
//!
//! 1. predict `f* = S(c_k dt) f^n + sum_{j<k} a_kj S((c_k - c_j) dt) K_j`,
//!    where `S(tau)` transports each velocity component by `v tau` and
//!    `K_j = (dt / eps) (M^(j) - f^(j))`;
//! 2. `M* = M[<f* phi>]`;
//! 3. correct `f^(k) = (eps f* + a_kk dt M*) / (eps + a_kk dt)`.
//!
//! Step 3 solves `f^(k) = f* + (a_kk dt / eps)(M^(k) - f^(k))` exactly,
//! because relaxation leaves the moments of `f*` unchanged and so
//! `M^(k) = M*`. The same identity gives `K_k = dt (M* - f*) / (eps + a_kk dt)`,
//! which is what is stored: it stays bounded as `eps -> 0` and vanishes as
//! `eps -> inf`. The update is `f^{n+1} = f^(s)`.

use alloc::vec::Vec;

use super::{DgField, DgSpace, ShiftOperator, SlError};
use crate::butcher::ButcherTableau;
use crate::models::{KineticModel, MacroState, MAX_INVARIANTS};

/// How the implicit relaxation in a stage is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageClosure {
    /// `(eps f* + a_kk dt M*) / (eps + a_kk dt)`, consistent with the DIRK
    /// stage equation.
    #[default]
    Implicit,
    /// `(eps f* + dt M*) / (eps + dt)`, the update with the diagonal
    /// coefficient dropped; only agrees with `Implicit` when `a_kk = 1`.
    /// Kept for comparison runs.
    UnitDiagonal,
}

/// `dt = cfl dx / max |v|`.
pub fn time_step(cfl: f64, space: &DgSpace, model: &dyn KineticModel) -> f64 {
    cfl * space.mesh().dx() / model.max_speed()
}

/// Transport operators of one step size, built once and reused.
#[derive(Debug, Clone)]
pub struct StepPlan {
    dt: f64,
    /// `[stage][velocity]`: shift by `c_k dt`.
    from_start: Vec<Vec<ShiftOperator>>,
    /// `[stage][j][velocity]`: shift by `(c_k - c_j) dt`; empty when
    /// `a_kj = 0`.
    between: Vec<Vec<Vec<ShiftOperator>>>,
}

impl StepPlan {
    pub fn dt(&self) -> f64 {
        self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub step: usize,
    pub t: f64,
    /// `int <f phi_i> dx` for each collision invariant.
    pub invariants: MacroState,
    /// `int <|f - M[f]|> dx`, if requested.
    pub equilibrium_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub dt: f64,
    pub t_final: f64,
    pub track_equilibrium: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub field: DgField,
    pub t: f64,
    pub steps: usize,
    /// Entry 0 is the initial state, then one per step.
    pub diagnostics: Vec<Diagnostic>,
}

/// One tableau, one model, one relaxation time, one DG space.
pub struct SlSolver<'m> {
    model: &'m dyn KineticModel,
    tableau: ButcherTableau,
    space: DgSpace,
    eps: f64,
    closure: StageClosure,
}

impl<'m> SlSolver<'m> {
    /// `eps` may be `f64::INFINITY` (no relaxation).
    pub fn new(
        model: &'m dyn KineticModel,
        tableau: &ButcherTableau,
        space: &DgSpace,
        eps: f64,
    ) -> Result<Self, SlError> {
        if !(eps > 0.0) {
            return Err(SlError::Config("eps must be positive"));
        }
        Ok(Self {
            model,
            tableau: tableau.clone().validated()?,
            space: space.clone(),
            eps,
            closure: StageClosure::default(),
        })
    }

    pub fn with_closure(mut self, closure: StageClosure) -> Self {
        self.closure = closure;
        self
    }

    pub fn model(&self) -> &dyn KineticModel {
        self.model
    }

    pub fn space(&self) -> &DgSpace {
        &self.space
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ncomp(&self) -> usize {
        self.model.velocity_set().len()
    }

    pub fn plan(&self, dt: f64) -> StepPlan {
        let t = &self.tableau;
        let c = t.c();
        let vel = self.model.velocity_set().velocities();
        let ops = |tau: f64| -> Vec<ShiftOperator> {
            vel.iter()
                .map(|&v| ShiftOperator::new(&self.space, v * tau))
                .collect()
        };
        let from_start = (0..t.stages()).map(|k| ops(c[k] * dt)).collect();
        let between = (0..t.stages())
            .map(|k| {
                (0..k)
                    .map(|j| {
                        if t.a(k, j) == 0.0 {
                            Vec::new()
                        } else {
                            ops((c[k] - c[j]) * dt)
                        }
                    })
                    .collect()
            })
            .collect();
        StepPlan {
            dt,
            from_start,
            between,
        }
    }

    fn check_field(&self, f: &DgField) -> Result<(), SlError> {
        if f.space() != &self.space || f.ncomp() != self.ncomp() {
            return Err(SlError::Mismatch("field does not match the solver"));
        }
        Ok(())
    }

    /// Stage `k` from `f^n` and the stored increments of stages `< k`.
    /// Returns `(f^(k), K_k)`.
    pub fn stage(
        &self,
        plan: &StepPlan,
        fn_: &DgField,
        increments: &[DgField],
        k: usize,
        step: usize,
    ) -> Result<(DgField, DgField), SlError> {
        let ncomp = self.ncomp();
        let dt = plan.dt;
        let mut fstar = DgField::zeros(&self.space, ncomp);
        for v in 0..ncomp {
            let dst = fstar.comp_mut(v);
            plan.from_start[k][v].apply(fn_.comp(v), dst);
            for (j, kj) in increments.iter().enumerate().take(k) {
                let akj = self.tableau.a(k, j);
                if akj != 0.0 {
                    plan.between[k][j][v].apply_add(kj.comp(v), akj, dst);
                }
            }
        }

        let diag = match self.closure {
            StageClosure::Implicit => self.tableau.diagonal(k),
            StageClosure::UnitDiagonal => 1.0,
        };
        let denom = self.eps + diag * dt;
        let theta = diag * dt / denom;
        let kscale = dt / denom;

        let mut fk = fstar;
        let mut inc = DgField::zeros(&self.space, ncomp);
        let mut fbuf = alloc::vec![0.0; ncomp];
        let mut mbuf = alloc::vec![0.0; ncomp];
        let ndof = self.space.ndof();
        for idx in 0..ndof {
            fk.gather(idx, &mut fbuf);
            let located = |source| SlError::Model {
                step,
                stage: k,
                x: self.space.dof_x(idx),
                source,
            };
            let u = self.model.moments(&fbuf).map_err(located)?;
            self.model
                .equilibrium_into(&u, &mut mbuf)
                .map_err(located)?;
            for v in 0..ncomp {
                let d = mbuf[v] - fbuf[v];
                mbuf[v] = kscale * d;
                fbuf[v] += theta * d;
            }
            fk.scatter(idx, &fbuf);
            inc.scatter(idx, &mbuf);
        }
        if !fk.is_finite() {
            return Err(SlError::NonFinite { step, stage: k });
        }
        Ok((fk, inc))
    }

    /// One step `f^n -> f^{n+1}`; `step` only labels errors.
    pub fn step(&self, plan: &StepPlan, fn_: &DgField, step: usize) -> Result<DgField, SlError> {
        self.check_field(fn_)?;
        let s = self.tableau.stages();
        let mut increments: Vec<DgField> = Vec::with_capacity(s);
        let mut last = None;
        for k in 0..s {
            let (fk, inc) = self.stage(plan, fn_, &increments, k, step)?;
            increments.push(inc);
            last = Some(fk);
        }
        Ok(last.expect("tableau has at least one stage"))
    }

    /// Advances `f0` to `t_final` with step `dt`, shortening the last step
    /// to land on `t_final`.
    pub fn run(&self, f0: &DgField, opts: &RunOptions) -> Result<Trajectory, SlError> {
        self.check_field(f0)?;
        if !(opts.dt > 0.0 && opts.dt.is_finite()) {
            return Err(SlError::Config("dt must be positive and finite"));
        }
        if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
            return Err(SlError::Config("final time must be positive and finite"));
        }
        let n = libm::ceil(opts.t_final / opts.dt - 1e-9).max(1.0) as usize;
        let last_dt = opts.t_final - (n - 1) as f64 * opts.dt;
        let plan = self.plan(opts.dt);
        let last_plan = if (last_dt - opts.dt).abs() <= 1e-14 * opts.dt {
            None
        } else {
            Some(self.plan(last_dt))
        };

        let mut diagnostics = Vec::with_capacity(n + 1);
        diagnostics.push(self.diagnostic(f0, 0, 0.0, opts.track_equilibrium)?);
        let mut f = f0.clone();
        for i in 0..n {
            let p = match (&last_plan, i + 1 == n) {
                (Some(lp), true) => lp,
                _ => &plan,
            };
            f = self.step(p, &f, i)?;
            let t = if i + 1 == n {
                opts.t_final
            } else {
                (i + 1) as f64 * opts.dt
            };
            diagnostics.push(self.diagnostic(&f, i + 1, t, opts.track_equilibrium)?);
        }
        Ok(Trajectory {
            field: f,
            t: opts.t_final,
            steps: n,
            diagnostics,
        })
    }

    fn diagnostic(
        &self,
        f: &DgField,
        step: usize,
        t: f64,
        track: bool,
    ) -> Result<Diagnostic, SlError> {
        let equilibrium_distance = if track {
            Some(equilibrium_distance(self.model, f).map_err(|e| match e {
                SlError::Model { x, source, .. } => SlError::Model {
                    step,
                    stage: 0,
                    x,
                    source,
                },
                other => other,
            })?)
        } else {
            None
        };
        Ok(Diagnostic {
            step,
            t,
            invariants: invariant_totals(self.model, f),
            equilibrium_distance,
        })
    }
}

/// `int <f phi_i> dx` for each invariant.
pub fn invariant_totals(model: &dyn KineticModel, f: &DgField) -> MacroState {
    let vs = model.velocity_set();
    let k = model.invariant_count();
    let mut out = [0.0; MAX_INVARIANTS];
    for (c, (&v, &w)) in vs.velocities().iter().zip(vs.weights()).enumerate() {
        let mass = f.mass(c);
        for (i, o) in out.iter_mut().enumerate().take(k) {
            *o += w * model.invariant(i, v) * mass;
        }
    }
    MacroState::from_slice(&out[..k])
}

/// Nodal moments `<f phi_i>` as a field with one component per invariant.
pub fn moments_field(model: &dyn KineticModel, f: &DgField) -> DgField {
    let k = model.invariant_count();
    let ndof = f.space().ndof();
    let mut out = DgField::zeros(f.space(), k);
    let mut buf = alloc::vec![0.0; f.ncomp()];
    for idx in 0..ndof {
        f.gather(idx, &mut buf);
        out.scatter(idx, model.raw_moments(&buf).as_slice());
    }
    out
}

/// `int <|f - M[f]|> dx` by nodal quadrature.
pub fn equilibrium_distance(model: &dyn KineticModel, f: &DgField) -> Result<f64, SlError> {
    let space = f.space();
    let w = model.velocity_set().weights();
    let mut fbuf = alloc::vec![0.0; f.ncomp()];
    let mut mbuf = alloc::vec![0.0; f.ncomp()];
    let mut total = 0.0;
    for idx in 0..space.ndof() {
        f.gather(idx, &mut fbuf);
        let located = |source| SlError::Model {
            step: 0,
            stage: 0,
            x: space.dof_x(idx),
            source,
        };
        let u = model.moments(&fbuf).map_err(located)?;
        model.equilibrium_into(&u, &mut mbuf).map_err(located)?;
        let local: f64 = (0..fbuf.len())
            .map(|v| w[v] * (fbuf[v] - mbuf[v]).abs())
            .sum();
        total += space.dof_weight(idx) * local;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::butcher::lookup;
    use crate::models::LinearTwoVelocity;
    use crate::sl::{l1_error, Mesh1D};

    fn space(n: usize) -> DgSpace {
        DgSpace::new(Mesh1D::new(0.0, 1.0, n).unwrap(), 2).unwrap()
    }

    #[test]
    fn constant_equilibrium_is_steady() {
        let model = LinearTwoVelocity::new(0.6);
        let s = space(10);
        let f0 = DgField::interpolate(&s, 2, |c, _| if c == 0 { 0.8 } else { 0.2 });
        for name in ["BE", "DIRK2", "DIRK3-B2", "DIRK3-B10"] {
            let solver = SlSolver::new(&model, &lookup(name).unwrap(), &s, 1e-3).unwrap();
            let tr = solver
                .run(
                    &f0,
                    &RunOptions {
                        dt: 0.013,
                        t_final: 0.1,
                        track_equilibrium: true,
                    },
                )
                .unwrap();
            assert!(l1_error(&tr.field, &f0).unwrap() < 1e-13, "{name}");
            assert!(tr.diagnostics.last().unwrap().equilibrium_distance.unwrap() < 1e-13);
        }
    }

    #[test]
    fn no_relaxation_is_pure_transport() {
        let model = LinearTwoVelocity::new(0.6);
        let s = space(16);
        let f0 = DgField::project(&s, 2, |c, x| {
            libm::sin(core::f64::consts::TAU * x) + c as f64
        });
        let t = lookup("DIRK3-B5").unwrap();
        let solver = SlSolver::new(&model, &t, &s, f64::INFINITY).unwrap();
        let dt = 0.0123;
        let plan = solver.plan(dt);
        let mut incs = Vec::new();
        for k in 0..t.stages() {
            let (fk, inc) = solver.stage(&plan, &f0, &incs, k, 0).unwrap();
            for v in 0..2 {
                let vel = model.velocity_set().velocities()[v];
                let expect = crate::sl::advect(&f0, v, vel, t.c()[k] * dt);
                for (a, b) in fk.comp(v).iter().zip(&expect) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
            assert!(inc.data().iter().all(|x| *x == 0.0));
            incs.push(inc);
        }
    }

    #[test]
    fn final_step_lands_on_t() {
        let model = LinearTwoVelocity::new(0.6);
        let s = space(8);
        let f0 = DgField::project(&s, 2, |_, x| {
            1.0 + 0.1 * libm::sin(core::f64::consts::TAU * x)
        });
        let solver = SlSolver::new(&model, &lookup("BE").unwrap(), &s, 0.1).unwrap();
        let tr = solver
            .run(
                &f0,
                &RunOptions {
                    dt: 0.03,
                    t_final: 0.1,
                    track_equilibrium: false,
                },
            )
            .unwrap();
        assert_eq!(tr.steps, 4);
        assert_eq!(tr.diagnostics.len(), 5);
        assert_eq!(tr.diagnostics[4].t, 0.1);
        let tr = solver
            .run(
                &f0,
                &RunOptions {
                    dt: 0.025,
                    t_final: 0.1,
                    track_equilibrium: false,
                },
            )
            .unwrap();
        assert_eq!(tr.steps, 4);
    }

    #[test]
    fn rejects_bad_settings() {
        let model = LinearTwoVelocity::new(0.6);
        let s = space(8);
        let t = lookup("BE").unwrap();
        assert!(SlSolver::new(&model, &t, &s, 0.0).is_err());
        let solver = SlSolver::new(&model, &t, &s, 1.0).unwrap();
        let f0 = DgField::zeros(&s, 2);
        assert!(solver
            .run(
                &f0,
                &RunOptions {
                    dt: -1.0,
                    t_final: 1.0,
                    track_equilibrium: false
                }
            )
            .is_err());
        assert!(solver
            .run(
                &DgField::zeros(&s, 3),
                &RunOptions {
                    dt: 0.1,
                    t_final: 1.0,
                    track_equilibrium: false
                }
            )
            .is_err());
    }
}
