//! Tableau files:
//!
//! ```text
//! name   = my-dirk
//! stages = 2
//! a      = 0.5 0    0.5 0.5     # row-major, s*s entries
//! c      = 0.5 1
//! b      = 0.5 0.5              # optional, defaults to the last row of a
//! ```

use std::fmt::Write as _;
use std::path::Path;

use sldirk_core::{lookup, ButcherTableau};

use crate::error::{Error, Result};
use crate::keyvalue::KeyValues;

pub fn parse_tableau(text: &str, default_name: &str) -> Result<ButcherTableau> {
    let kv = KeyValues::parse(text)?;
    kv.check_keys(&["name", "stages", "a", "b", "c"])?;
    let name = kv.get("name").unwrap_or(default_name).to_string();
    let a = kv
        .parse_list("a")?
        .ok_or_else(|| Error::config("tableau file: missing `a`"))?;
    let c = kv
        .parse_list("c")?
        .ok_or_else(|| Error::config("tableau file: missing `c`"))?;
    let s = match kv.parse_usize("stages")? {
        Some(s) => s,
        None => c.len(),
    };
    if s == 0 {
        return Err(Error::config("tableau file: `stages` must be positive"));
    }
    if a.len() != s * s {
        return Err(Error::config(format!(
            "tableau file: `a` has {} entries, expected {} for {s} stages",
            a.len(),
            s * s
        )));
    }
    let b = match kv.parse_list("b")? {
        Some(b) => b,
        None => a[(s - 1) * s..].to_vec(),
    };
    Ok(ButcherTableau::new(&name, a, b, c)?)
}

pub fn format_tableau(t: &ButcherTableau) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", t.name());
    let _ = writeln!(out, "stages = {}", t.stages());
    let _ = writeln!(out, "a = {}", join(t.a_matrix()));
    let _ = writeln!(out, "c = {}", join(t.c()));
    let _ = writeln!(out, "b = {}", join(t.b()));
    out
}

/// A catalog name, or else a path to a tableau file.
pub fn load_tableau(spec: &str) -> Result<ButcherTableau> {
    if let Some(t) = lookup(spec) {
        return Ok(t);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::config(format!(
            "`{spec}` is neither a catalog tableau ({}) nor a readable file",
            sldirk_core::butcher::CATALOG_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(spec, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    parse_tableau(&text, &stem)
}
