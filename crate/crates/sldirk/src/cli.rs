//! `sldirk` subcommands.
//!
//! Exit status: 0 on success, 2 for invalid input (including unparsable
//! flags), 3 when a simulation diverges, 1 for I/O failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sldirk_core::order::{order_report, Regime, DEFAULT_ORDER_TOL};
use sldirk_core::stability::ScanGrid;

use crate::config::{parse_closure, SimConfig};
use crate::error::{Error, Result};
use crate::harness::{
    run_convergence, simulate, write_diagnostics_csv, write_field_csv, write_macro_csv,
    ConvergenceStudy, ErrorOn,
};
use crate::keyvalue::{parse_number_list, KeyValues};
use crate::problems::ProblemKind;
use crate::scan::{parallel_scan, parse_axis, write_scan_csv};
use crate::tableau_io::load_tableau;

#[derive(Debug, Parser)]
#[command(
    name = "sldirk",
    version,
    about = "Semi-Lagrangian DIRK schemes for stiff relaxation systems: order conditions, \
             linear stability and convergence studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate kinetic and fluid-limit order conditions of a tableau.
    OrderCheck(OrderCheckArgs),
    /// Spectral radius of the amplification matrix over (b, k dt, xi).
    StabilityScan(ScanArgs),
    /// Run one simulation and write field, moment and diagnostic CSVs.
    Simulate(SimulateArgs),
    /// Temporal convergence study: L1 error against a small-CFL reference.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct OrderCheckArgs {
    /// Catalog name (BE, DIRK2, DIRK3-B2 ... DIRK3-B10) or tableau file.
    pub tableau: String,
    /// Print machine-readable CSV instead of the table.
    #[arg(long)]
    pub csv: bool,
    /// Absolute tolerance on order-condition residuals.
    #[arg(long, default_value_t = DEFAULT_ORDER_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Catalog name or tableau file.
    #[arg(long)]
    pub tableau: String,
    /// Values of b in [0, 1]: a number, lo:hi:n, or a comma-separated mix.
    #[arg(long, default_value = "0:1:101")]
    pub b: String,
    /// Values of k dt; `pi` and `<x>pi` are accepted.
    #[arg(long, default_value = "0:2pi:401")]
    pub kdt: String,
    /// Values of xi = dt / eps; `inf` selects the stiff limit.
    #[arg(long, default_value = "0:10:101,inf")]
    pub xi: String,
    /// CSV output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Key-value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// linear (5.1), nonlinear (5.2) or bgk (5.3).
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub tableau: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Number of elements.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Polynomial degree (0-4).
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of velocities (BGK).
    #[arg(long)]
    pub nv: Option<usize>,
    /// Velocity domain half-width (BGK).
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Equilibrium parameter b (two-velocity models).
    #[arg(long)]
    pub b: Option<f64>,
    /// Final time.
    #[arg(long = "t-final", alias = "T")]
    pub t_final: Option<f64>,
    /// implicit (default) or unit-diagonal.
    #[arg(long)]
    pub closure: Option<String>,
    /// conservative (default) or analytic Maxwellian (BGK).
    #[arg(long)]
    pub maxwellian: Option<String>,
    /// Output directory for field.csv, macro.csv and diagnostics.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// 5.1 (linear), 5.2 (nonlinear) or 5.3 (bgk).
    #[arg(long)]
    pub example: String,
    /// Comma-separated relaxation times.
    #[arg(long, default_value = "1e-2,1e-6")]
    pub eps: String,
    /// Comma-separated tableau names or files.
    #[arg(long, default_value = "BE,DIRK2,DIRK3-B2,DIRK3-B10")]
    pub tableaus: String,
    /// Comma-separated CFL numbers (default depends on the example).
    #[arg(long)]
    pub cfls: Option<String>,
    /// CFL of the reference run (default 0.001, or 0.01 for BGK).
    #[arg(long)]
    pub reference_cfl: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long = "t-final", alias = "T")]
    pub t_final: Option<f64>,
    /// Field the error is measured on: U (moments) or f (distribution).
    #[arg(long, default_value = "U")]
    pub error_on: String,
    /// implicit (default) or unit-diagonal.
    #[arg(long)]
    pub closure: Option<String>,
    /// 640 elements and CFL 0.2, 0.4, ..., 16.2 unless overridden.
    #[arg(long)]
    pub paper_scale: bool,
    /// Row CSV output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    match &cli.command {
        Command::OrderCheck(a) => order_check(a, out),
        Command::StabilityScan(a) => stability_scan(a, out),
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Convergence(a) => convergence(a, out),
    }
}

fn w(out: &mut impl Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Error::io("stdout", e))
}

/// Orders are capped at 3; a reported 3 means "at least 3".
fn order_label(order: u8) -> String {
    if order >= 3 {
        "3+".into()
    } else {
        order.to_string()
    }
}

fn order_check<W: Write>(a: &OrderCheckArgs, out: &mut W) -> Result<()> {
    if !(a.tol > 0.0) {
        return Err(Error::config("`--tol` must be positive"));
    }
    let t = load_tableau(&a.tableau)?;
    let r = order_report(&t, a.tol)?;
    let s = t.stages();
    let at_s = |name: &str| name.replace("_s", &format!("_{s}"));
    if a.csv {
        let mut cw = csv::Writer::from_writer(&mut *out);
        cw.write_record(["quantity", "regime", "order", "value", "target", "residual"])?;
        for c in &r.conditions {
            let regime = match c.regime {
                Regime::Kinetic => "kinetic",
                Regime::Fluid => "fluid",
            };
            cw.write_record([
                at_s(c.name),
                regime.to_string(),
                c.order.to_string(),
                c.value.to_string(),
                c.target.to_string(),
                c.residual().to_string(),
            ])?;
        }
        cw.write_record([
            "kinetic_order",
            "kinetic",
            "",
            &order_label(r.kinetic_order),
            "",
            "",
        ])?;
        cw.write_record([
            "fluid_order",
            "fluid",
            "",
            &order_label(r.fluid_order),
            "",
            "",
        ])?;
        cw.flush().map_err(|e| Error::io("stdout", e))?;
        return Ok(());
    }
    w(out, format_args!("tableau {} ({s} stages)", r.tableau))?;
    w(
        out,
        format_args!("kinetic_order {}", order_label(r.kinetic_order)),
    )?;
    w(
        out,
        format_args!("fluid_order {}", order_label(r.fluid_order)),
    )?;
    w(out, format_args!("tolerance {:e}", r.tol))?;
    w(out, format_args!(""))?;
    w(
        out,
        format_args!(
            "{:<8} {:>8} {:>22} {:>20} {:>10}",
            "cond", "regime", "value", "target", "residual"
        ),
    )?;
    for c in &r.conditions {
        let regime = match c.regime {
            Regime::Kinetic => "kinetic",
            Regime::Fluid => "fluid",
        };
        w(
            out,
            format_args!(
                "{:<8} {:>8} {:>22.16} {:>20.16} {:>10.3e}",
                at_s(c.name),
                regime,
                c.value,
                c.target,
                c.residual()
            ),
        )?;
    }
    w(out, format_args!(""))?;
    w(out, format_args!("per-stage coefficients"))?;
    w(
        out,
        format_args!(
            "{:>3} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}",
            "k", "c", "d", "g", "h", "D", "B", "G", "H", "B*", "B**", "B***"
        ),
    )?;
    let (kc, lc) = (&r.kinetic, &r.limit);
    for k in 0..s {
        w(
            out,
            format_args!(
                "{:>3} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7} {:>11.7}",
                k + 1,
                kc.c[k],
                kc.d[k],
                kc.g[k],
                kc.h[k],
                lc.d[k],
                lc.b[k],
                lc.g[k],
                lc.h[k],
                lc.b_star[k],
                lc.b_star2[k],
                lc.b_star3[k]
            ),
        )?;
    }
    Ok(())
}

fn stability_scan<W: Write>(a: &ScanArgs, out: &mut W) -> Result<()> {
    let t = load_tableau(&a.tableau)?;
    let grid = ScanGrid {
        b: parse_axis(&a.b, "--b")?,
        k_dt: parse_axis(&a.kdt, "--kdt")?,
        xi: parse_axis(&a.xi, "--xi")?,
    };
    let res = parallel_scan(&t, &grid)?;
    match &a.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            write_scan_csv(BufWriter::new(f), &res)?;
            if let Some(m) = res.max_row() {
                w(
                    out,
                    format_args!(
                        "{}: {} points, max rho = {} at b = {}, k_dt = {}, xi = {}",
                        res.tableau,
                        res.rows.len(),
                        m.rho(),
                        m.point.b,
                        m.point.k_dt,
                        m.point.xi
                    ),
                )?;
            }
            Ok(())
        }
        None => write_scan_csv(out, &res),
    }
}

fn sim_config(a: &SimulateArgs) -> Result<SimConfig> {
    let file_kv = match &a.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Error::io(p.display().to_string(), e))?;
            Some(KeyValues::parse(&text)?)
        }
        None => None,
    };
    let kind: ProblemKind = match (&a.model, file_kv.as_ref().and_then(|kv| kv.get("model"))) {
        (Some(m), _) => m.parse()?,
        (None, Some(m)) => m.parse()?,
        (None, None) => {
            return Err(Error::config(
                "no model given (use --model or a config file)",
            ))
        }
    };
    let mut cfg = SimConfig::new(kind);
    if let Some(kv) = &file_kv {
        kv.check_keys(&crate::config::CONFIG_KEYS)?;
        cfg.apply(kv)?;
    }
    if let Some(t) = &a.tableau {
        cfg.tableau = t.clone();
    }
    if let Some(x) = a.eps {
        cfg.eps = x;
    }
    if let Some(x) = a.cfl {
        cfg.cfl = x;
    }
    if let Some(x) = a.nx {
        cfg.problem.nx = x;
    }
    if let Some(x) = a.p {
        cfg.problem.degree = x;
    }
    if let Some(x) = a.nv {
        cfg.problem.nv = x;
    }
    if let Some(x) = a.vmax {
        cfg.problem.vmax = x;
    }
    if let Some(x) = a.b {
        cfg.problem.b = x;
    }
    if let Some(x) = a.t_final {
        cfg.t_final = x;
    }
    if let Some(c) = &a.closure {
        cfg.closure = parse_closure(c)?;
    }
    if let Some(m) = &a.maxwellian {
        cfg.problem.analytic_maxwellian = match m.as_str() {
            "conservative" => false,
            "analytic" => true,
            other => return Err(Error::config(format!("unknown maxwellian `{other}`"))),
        };
    }
    if let Some(o) = &a.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn create(dir: &std::path::Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn simulate_cmd<W: Write>(a: &SimulateArgs, out: &mut W) -> Result<()> {
    let cfg = sim_config(a)?;
    let res = simulate(&cfg)?;
    let tr = &res.trajectory;
    let first = tr.diagnostics.first().expect("initial diagnostic");
    let last = tr.diagnostics.last().expect("final diagnostic");
    w(
        out,
        format_args!(
            "model {} tableau {} eps {} cfl {} dt {} steps {} T {}",
            cfg.problem.kind, cfg.tableau, cfg.eps, cfg.cfl, res.dt, tr.steps, tr.t
        ),
    )?;
    for (i, name) in ["mass", "momentum", "energy"]
        .iter()
        .enumerate()
        .take(first.invariants.len())
    {
        let (a0, a1) = (
            first.invariants.as_slice()[i],
            last.invariants.as_slice()[i],
        );
        w(
            out,
            format_args!("{name} initial {a0} final {a1} drift {:e}", (a1 - a0).abs()),
        )?;
    }
    if let Some(d) = last.equilibrium_distance {
        w(out, format_args!("equilibrium_distance {d:e}"))?;
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        write_field_csv(create(dir, "field.csv")?, res.model.as_ref(), &tr.field)?;
        write_macro_csv(create(dir, "macro.csv")?, res.model.as_ref(), &tr.field)?;
        write_diagnostics_csv(create(dir, "diagnostics.csv")?, tr)?;
        w(out, format_args!("wrote {}", dir.display()))?;
    }
    Ok(())
}

fn convergence<W: Write>(a: &ConvergenceArgs, out: &mut W) -> Result<()> {
    let kind: ProblemKind = a.example.parse()?;
    let tableaus = a
        .tableaus
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(load_tableau)
        .collect::<Result<Vec<_>>>()?;
    let eps = parse_number_list(&a.eps, "--eps")?;
    let mut study = ConvergenceStudy::new(kind, tableaus, eps);
    if a.paper_scale {
        study = study.paper_scale();
    }
    if let Some(c) = &a.cfls {
        study.cfls = parse_number_list(c, "--cfls")?;
    }
    if let Some(r) = a.reference_cfl {
        study.reference_cfl = r;
    }
    if let Some(n) = a.nx {
        study.problem.nx = n;
    }
    if let Some(p) = a.p {
        if p > 4 {
            return Err(Error::config("`--p` must lie in 0..=4"));
        }
        study.problem.degree = p;
    }
    if let Some(t) = a.t_final {
        study.t_final = t;
    }
    study.error_on = a.error_on.parse::<ErrorOn>()?;
    if let Some(c) = &a.closure {
        study.closure = parse_closure(c)?;
    }
    if study.problem.nx == 0 {
        return Err(Error::config("`--nx` must be at least 1"));
    }
    let report = run_convergence(&study)?;
    match &a.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            report.write_rows_csv(BufWriter::new(f))?;
        }
        None => report.write_rows_csv(&mut *out)?,
    }
    w(out, format_args!(""))?;
    report.write_slopes_csv(&mut *out)
}
