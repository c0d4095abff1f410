//! Plain-text `key = value` files. `#` starts a comment; blank lines are
//! ignored; keys are case-insensitive and may appear once.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=').or_else(|| line.split_once(':')) else {
                return Err(Error::config(format!(
                    "line {}: expected `key = value`",
                    i + 1
                )));
            };
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::config(format!("line {}: empty key", i + 1)));
            }
            if entries
                .insert(key.clone(), (i + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::config(format!(
                    "line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Errors on any key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, (line, _)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::config(format!(
                    "line {line}: unknown key `{key}` (expected one of {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_number(v, key)).transpose()
    }

    pub fn parse_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::config(format!("`{key}`: expected a count, got `{v}`")))
            })
            .transpose()
    }

    /// Whitespace- or comma-separated numbers.
    pub fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_number_list(v, key)).transpose()
    }
}

/// A real number, also accepting `inf`, `pi` and `<x>pi`.
pub fn parse_number(text: &str, what: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || Error::config(format!("`{what}`: cannot parse `{text}` as a number"));
    match t.as_str() {
        "inf" | "infinity" | "+inf" => return Ok(f64::INFINITY),
        "pi" => return Ok(std::f64::consts::PI),
        _ => {}
    }
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*');
        let x: f64 = head.parse().map_err(|_| bad())?;
        return Ok(x * std::f64::consts::PI);
    }
    t.parse().map_err(|_| bad())
}

pub fn parse_number_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(s, what))
        .collect()
}
