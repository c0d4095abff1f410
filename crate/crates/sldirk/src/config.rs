//! Simulation configuration, from a key-value file and/or CLI flags.
//!
//! Recognized keys: `model`, `tableau`, `eps`, `cfl`, `nx`, `p`, `nv`,
//! `vmax`, `T`, `out`, plus `b`, `closure` (`implicit` or `unit-diagonal`)
//! and `maxwellian` (`conservative` or `analytic`).

use std::path::{Path, PathBuf};

use sldirk_core::sl::StageClosure;

use crate::error::{Error, Result};
use crate::keyvalue::KeyValues;
use crate::problems::{Problem, ProblemKind};

pub const CONFIG_KEYS: [&str; 13] = [
    "model",
    "tableau",
    "eps",
    "cfl",
    "nx",
    "p",
    "nv",
    "vmax",
    "t",
    "out",
    "b",
    "closure",
    "maxwellian",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub problem: Problem,
    /// Catalog name or tableau file.
    pub tableau: String,
    pub eps: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// Output directory for CSV files.
    pub out: Option<PathBuf>,
    pub closure: StageClosure,
}

pub fn parse_closure(s: &str) -> Result<StageClosure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "implicit" => Ok(StageClosure::Implicit),
        "unit-diagonal" | "unit" => Ok(StageClosure::UnitDiagonal),
        other => Err(Error::config(format!(
            "unknown closure `{other}` (expected implicit or unit-diagonal)"
        ))),
    }
}

impl SimConfig {
    pub fn new(kind: ProblemKind) -> Self {
        Self {
            problem: Problem::new(kind),
            tableau: "DIRK3-B10".into(),
            eps: 1e-2,
            cfl: 0.5,
            t_final: kind.default_t_final(),
            out: None,
            closure: StageClosure::Implicit,
        }
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(&CONFIG_KEYS)?;
        let kind: ProblemKind = kv
            .get("model")
            .ok_or_else(|| Error::config("missing `model`"))?
            .parse()?;
        let mut cfg = Self::new(kind);
        cfg.apply(kv)?;
        Ok(cfg)
    }

    /// Overrides fields with the keys present in `kv` (except `model`).
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        if let Some(t) = kv.get("tableau") {
            self.tableau = t.to_string();
        }
        if let Some(x) = kv.parse_f64("eps")? {
            self.eps = x;
        }
        if let Some(x) = kv.parse_f64("cfl")? {
            self.cfl = x;
        }
        if let Some(x) = kv.parse_f64("t")? {
            self.t_final = x;
        }
        if let Some(x) = kv.parse_f64("b")? {
            self.problem.b = x;
        }
        if let Some(x) = kv.parse_f64("vmax")? {
            self.problem.vmax = x;
        }
        if let Some(n) = kv.parse_usize("nx")? {
            self.problem.nx = n;
        }
        if let Some(n) = kv.parse_usize("p")? {
            self.problem.degree = n;
        }
        if let Some(n) = kv.parse_usize("nv")? {
            self.problem.nv = n;
        }
        if let Some(o) = kv.get("out") {
            self.out = Some(PathBuf::from(o));
        }
        if let Some(c) = kv.get("closure") {
            self.closure = parse_closure(c)?;
        }
        if let Some(m) = kv.get("maxwellian") {
            self.problem.analytic_maxwellian = match m.to_ascii_lowercase().as_str() {
                "conservative" => false,
                "analytic" => true,
                other => {
                    return Err(Error::config(format!(
                        "unknown maxwellian `{other}` (expected conservative or analytic)"
                    )))
                }
            };
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, what: &str| {
            if x > 0.0 && !x.is_nan() {
                Ok(())
            } else {
                Err(Error::config(format!("`{what}` must be positive, got {x}")))
            }
        };
        positive(self.eps, "eps")?;
        positive(self.cfl, "cfl")?;
        positive(self.t_final, "T")?;
        if !self.cfl.is_finite() || !self.t_final.is_finite() {
            return Err(Error::config("`cfl` and `T` must be finite"));
        }
        if self.problem.nx == 0 {
            return Err(Error::config("`nx` must be at least 1"));
        }
        if self.problem.degree > 4 {
            return Err(Error::config("`p` must lie in 0..=4"));
        }
        if self.problem.kind == ProblemKind::Bgk {
            if self.problem.nv == 0 {
                return Err(Error::config("`nv` must be at least 1"));
            }
            positive(self.problem.vmax, "vmax")?;
        } else if !(0.0..=1.0).contains(&self.problem.b) {
            return Err(Error::config("`b` must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full_config() {
        let kv = KeyValues::parse(
            "model = bgk\ntableau = DIRK2\neps = 1e-6\ncfl = 2\nnx = 40\np = 1\nnv = 50\nvmax = 10\nT = 0.01\nout = /tmp/x\nmaxwellian = analytic",
        )
        .unwrap();
        let cfg = SimConfig::from_key_values(&kv).unwrap();
        assert_eq!(cfg.problem.kind, ProblemKind::Bgk);
        assert_eq!(cfg.tableau, "DIRK2");
        assert_eq!(cfg.eps, 1e-6);
        assert_eq!(cfg.problem.nx, 40);
        assert_eq!(cfg.problem.nv, 50);
        assert_eq!(cfg.t_final, 0.01);
        assert!(cfg.problem.analytic_maxwellian);
        cfg.validate().unwrap();
    }

    #[test]
    fn defaults_and_errors() {
        let cfg = SimConfig::from_key_values(&KeyValues::parse("model = 5.2").unwrap()).unwrap();
        assert_eq!(cfg.problem.b, 0.2);
        assert_eq!(cfg.t_final, 0.2);
        assert!(SimConfig::from_key_values(&KeyValues::parse("eps = 1").unwrap()).is_err());
        assert!(
            SimConfig::from_key_values(&KeyValues::parse("model = linear\nzzz = 1").unwrap())
                .is_err()
        );
        let mut bad = cfg.clone();
        bad.eps = -1.0;
        assert!(bad.validate().is_err());
        bad = cfg;
        bad.problem.degree = 7;
        assert!(bad.validate().is_err());
    }
}
