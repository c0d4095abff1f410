//! Single simulations and temporal convergence studies.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use sldirk_core::sl::{
    l1_error, l1_error_weighted, moments_field, time_step, DgField, RunOptions, SlError, SlSolver,
    StageClosure, Trajectory,
};
use sldirk_core::{ButcherTableau, KineticModel};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::problems::{Problem, ProblemKind};
use crate::tableau_io::load_tableau;

/// Result of one simulation.
pub struct SimOutput {
    pub model: Box<dyn KineticModel>,
    pub trajectory: Trajectory,
    pub dt: f64,
}

/// Runs `problem` to `t_final` at the given CFL.
pub fn run_problem(
    problem: &Problem,
    tableau: &ButcherTableau,
    eps: f64,
    cfl: f64,
    t_final: f64,
    closure: StageClosure,
    track_equilibrium: bool,
) -> Result<SimOutput> {
    let model = problem.model()?;
    let space = problem.space()?;
    let f0 = problem.initial(model.as_ref(), &space)?;
    let dt = time_step(cfl, &space, model.as_ref());
    let trajectory = SlSolver::new(model.as_ref(), tableau, &space, eps)?
        .with_closure(closure)
        .run(
            &f0,
            &RunOptions {
                dt,
                t_final,
                track_equilibrium,
            },
        )?;
    Ok(SimOutput {
        model,
        trajectory,
        dt,
    })
}

pub fn simulate(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let tableau = load_tableau(&cfg.tableau)?;
    run_problem(
        &cfg.problem,
        &tableau,
        cfg.eps,
        cfg.cfl,
        cfg.t_final,
        cfg.closure,
        true,
    )
}

/// `x, v, value` for every node and velocity.
pub fn write_field_csv<W: Write>(w: W, model: &dyn KineticModel, f: &DgField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "v", "value"])?;
    let space = f.space();
    for (c, v) in model.velocity_set().velocities().iter().enumerate() {
        for (idx, value) in f.comp(c).iter().enumerate() {
            out.write_record([
                space.dof_x(idx).to_string(),
                v.to_string(),
                value.to_string(),
            ])?;
        }
    }
    out.flush().map_err(|e| Error::io("field csv", e))?;
    Ok(())
}

/// `x, rho` for the two-velocity models (`rho` being `U = f_1 + f_2`),
/// `x, rho, u, T` for BGK.
pub fn write_macro_csv<W: Write>(w: W, model: &dyn KineticModel, f: &DgField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let m = moments_field(model, f);
    let bgk = model.invariant_count() == 3;
    if bgk {
        out.write_record(["x", "rho", "u", "T"])?;
    } else {
        out.write_record(["x", "rho"])?;
    }
    let space = f.space();
    for idx in 0..space.ndof() {
        let x = space.dof_x(idx).to_string();
        let rho = m.comp(0)[idx];
        if bgk {
            let u = m.comp(1)[idx] / rho;
            let t = 2.0 * m.comp(2)[idx] / rho - u * u;
            out.write_record([x, rho.to_string(), u.to_string(), t.to_string()])?;
        } else {
            out.write_record([x, rho.to_string()])?;
        }
    }
    out.flush().map_err(|e| Error::io("macro csv", e))?;
    Ok(())
}

/// `step, t, mass, momentum, energy, equilibrium_distance`; invariants a
/// model does not have are left empty.
pub fn write_diagnostics_csv<W: Write>(w: W, tr: &Trajectory) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "step",
        "t",
        "mass",
        "momentum",
        "energy",
        "equilibrium_distance",
    ])?;
    for d in &tr.diagnostics {
        let inv = d.invariants.as_slice();
        let get = |i: usize| inv.get(i).map(|x| x.to_string()).unwrap_or_default();
        out.write_record([
            d.step.to_string(),
            d.t.to_string(),
            get(0),
            get(1),
            get(2),
            d.equilibrium_distance
                .map(|x| x.to_string())
                .unwrap_or_default(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("diagnostics csv", e))?;
    Ok(())
}

/// Which field the convergence error is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorOn {
    /// The macroscopic moments `U`, summed over components.
    #[default]
    Macro,
    /// The distribution `f`, velocity-weighted.
    Distribution,
}

impl FromStr for ErrorOn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "U" | "u" => Ok(Self::Macro),
            "f" | "F" => Ok(Self::Distribution),
            other => Err(Error::config(format!(
                "`--error-on`: expected U or f, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for ErrorOn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Macro => "U",
            Self::Distribution => "f",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub problem: Problem,
    pub t_final: f64,
    pub eps: Vec<f64>,
    pub cfls: Vec<f64>,
    pub tableaus: Vec<ButcherTableau>,
    pub reference_cfl: f64,
    pub error_on: ErrorOn,
    pub closure: StageClosure,
}

impl ConvergenceStudy {
    /// Desk-scale defaults for `kind` with the given tableaus and `eps`.
    pub fn new(kind: ProblemKind, tableaus: Vec<ButcherTableau>, eps: Vec<f64>) -> Self {
        Self {
            problem: Problem::new(kind),
            t_final: kind.default_t_final(),
            eps,
            cfls: kind.default_cfls(),
            tableaus,
            reference_cfl: kind.reference_cfl(),
            error_on: ErrorOn::Macro,
            closure: StageClosure::Implicit,
        }
    }

    /// 640 elements and CFL `0.2, 0.4, ..., 16.2`.
    pub fn paper_scale(mut self) -> Self {
        self.problem.nx = 640;
        self.cfls = self.problem.kind.paper_scale_cfls();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.tableaus.is_empty() || self.eps.is_empty() {
            return Err(Error::config("need at least one tableau and one eps"));
        }
        if self.cfls.len() < 3 {
            return Err(Error::config("a slope fit needs at least 3 CFL values"));
        }
        if self.cfls.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::config("CFL values must be positive and finite"));
        }
        if !(self.reference_cfl > 0.0) {
            return Err(Error::config("reference CFL must be positive"));
        }
        if self.cfls.iter().any(|&c| c <= self.reference_cfl) {
            return Err(Error::config(
                "reference CFL must be below every tested CFL",
            ));
        }
        if self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::config("eps values must be positive"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("final time must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub tableau: String,
    pub eps: f64,
    pub cfl: f64,
    pub dt: f64,
    /// `NaN` when the run diverged.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeRow {
    pub tableau: String,
    pub eps: f64,
    /// `NaN` when fewer than two finite errors are available.
    pub slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slopes: Vec<SlopeRow>,
}

impl ConvergenceReport {
    pub fn slope(&self, tableau: &str, eps: f64) -> Option<f64> {
        self.slopes
            .iter()
            .find(|s| s.tableau == tableau && s.eps == eps)
            .map(|s| s.slope)
    }

    pub fn write_rows_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["tableau", "eps", "cfl", "dt", "error"])?;
        for r in &self.rows {
            out.write_record([
                r.tableau.clone(),
                r.eps.to_string(),
                r.cfl.to_string(),
                r.dt.to_string(),
                r.error.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("convergence csv", e))?;
        Ok(())
    }

    pub fn write_slopes_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["tableau", "eps", "slope", "points"])?;
        for s in &self.slopes {
            out.write_record([
                s.tableau.clone(),
                s.eps.to_string(),
                s.slope.to_string(),
                s.points.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("slope csv", e))?;
        Ok(())
    }
}

/// Least-squares slope of `ln y` against `ln x`, skipping pairs where either
/// value is non-finite or non-positive. `None` with fewer than two points.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

struct Job {
    tableau: usize,
    eps: f64,
    cfl: f64,
}

/// Final field of one run; `None` if the run diverged.
type RunResult = Result<Option<(DgField, f64)>>;

fn run_job(study: &ConvergenceStudy, job: &Job) -> RunResult {
    match run_problem(
        &study.problem,
        &study.tableaus[job.tableau],
        job.eps,
        job.cfl,
        study.t_final,
        study.closure,
        false,
    ) {
        Ok(out) => Ok(Some((out.trajectory.field, out.dt))),
        Err(e) if e.is_divergence() => Ok(None),
        Err(e) => Err(e),
    }
}

fn measure(
    model: &dyn KineticModel,
    error_on: ErrorOn,
    a: &DgField,
    reference: &DgField,
) -> std::result::Result<f64, SlError> {
    match error_on {
        ErrorOn::Macro => l1_error(&moments_field(model, a), &moments_field(model, reference)),
        ErrorOn::Distribution => l1_error_weighted(a, reference, model.velocity_set().weights()),
    }
}

/// Runs every (tableau, eps, CFL) combination plus one reference run per
/// (tableau, eps) and fits the slope of error against `dt`.
///
/// Runs are independent and execute on the rayon pool; results come back
/// in input order, so the output does not depend on scheduling.
pub fn run_convergence(study: &ConvergenceStudy) -> Result<ConvergenceReport> {
    study.validate()?;
    let model = study.problem.model()?;
    let mut jobs = Vec::new();
    for t in 0..study.tableaus.len() {
        for &eps in &study.eps {
            jobs.push(Job {
                tableau: t,
                eps,
                cfl: study.reference_cfl,
            });
            for &cfl in &study.cfls {
                jobs.push(Job {
                    tableau: t,
                    eps,
                    cfl,
                });
            }
        }
    }
    let results: Vec<RunResult> = jobs.par_iter().map(|j| run_job(study, j)).collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let per_group = study.cfls.len() + 1;
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for (g, chunk) in results.chunks(per_group).enumerate() {
        let job0 = &jobs[g * per_group];
        let name = study.tableaus[job0.tableau].name().to_string();
        let reference = chunk[0].as_ref().map(|(f, _)| f);
        let space = study.problem.space()?;
        let mut dts = Vec::new();
        let mut errs = Vec::new();
        for (i, res) in chunk[1..].iter().enumerate() {
            let cfl = study.cfls[i];
            let dt = time_step(cfl, &space, model.as_ref());
            let error = match (res, reference) {
                (Some((f, _)), Some(r)) => measure(model.as_ref(), study.error_on, f, r)?,
                _ => f64::NAN,
            };
            dts.push(dt);
            errs.push(error);
            rows.push(ConvergenceRow {
                tableau: name.clone(),
                eps: job0.eps,
                cfl,
                dt,
                error,
            });
        }
        let points = errs.iter().filter(|e| e.is_finite() && **e > 0.0).count();
        slopes.push(SlopeRow {
            tableau: name,
            eps: job0.eps,
            slope: fit_slope(&dts, &errs).unwrap_or(f64::NAN),
            points,
        });
    }
    Ok(ConvergenceReport { rows, slopes })
}
