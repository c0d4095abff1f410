//! Parallel spectral-radius scans and axis parsing.

use std::io::Write;

use rayon::prelude::*;
use sldirk_core::stability::{linspace, scan_point, Amplifier, ScanGrid, ScanResult};
use sldirk_core::ButcherTableau;

use crate::error::{Error, Result};
use crate::keyvalue::parse_number;

/// Axis values from a comma-separated list of items, each either a single
/// number or `lo:hi:n` (`n` equispaced points). Numbers accept `pi`,
/// `<x>pi` and `inf`, e.g. `0:2pi:401` or `0:10:101,inf`.
pub fn parse_axis(text: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_number(x, what)?),
            [lo, hi, n] => {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::config(format!("`{what}`: bad point count in `{item}`")))?;
                let (lo, hi) = (parse_number(lo, what)?, parse_number(hi, what)?);
                if !(lo.is_finite() && hi.is_finite()) || n == 0 {
                    return Err(Error::config(format!(
                        "`{what}`: range `{item}` needs finite ends and n >= 1"
                    )));
                }
                out.extend(linspace(lo, hi, n));
            }
            _ => {
                return Err(Error::config(format!(
                    "`{what}`: expected a value or lo:hi:n, got `{item}`"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::config(format!("`{what}`: empty axis")));
    }
    Ok(out)
}

/// Like [`sldirk_core::stability::scan`], evaluated on the rayon pool.
/// Row order is the sequential scan order.
pub fn parallel_scan(t: &ButcherTableau, grid: &ScanGrid) -> Result<ScanResult> {
    grid.check()?;
    let amp = Amplifier::new(t)?;
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|i| scan_point(&amp, grid.point(i)))
        .collect();
    Ok(ScanResult {
        tableau: amp.tableau_name().to_string(),
        rows,
    })
}

/// Columns `b, k_dt, xi, lambda1_abs, lambda2_abs, rho`.
pub fn write_scan_csv<W: Write>(w: W, res: &ScanResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["b", "k_dt", "xi", "lambda1_abs", "lambda2_abs", "rho"])?;
    for r in &res.rows {
        out.write_record([
            r.point.b.to_string(),
            r.point.k_dt.to_string(),
            r.point.xi.to_string(),
            r.lambda1_abs.to_string(),
            r.lambda2_abs.to_string(),
            r.rho().to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("scan csv", e))?;
    Ok(())
}
