//! Layered settings: command-line flag, then config file, then default.
//!
//! The config file is flat TOML: one `key = value` per line, keys spelled
//! like the long flags (`alpha`, `phi-prime`, `res`, ...). Angles are in
//! units of pi unless `radians = true` or `--radians` is given.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

/// Bad flags or config file; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type UsageResult<T> = Result<T, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Every key any subcommand understands.
pub const KNOWN_KEYS: &[&str] = &[
    "radians",
    "out-dir",
    "prefix",
    // wigner
    "state",
    "alpha",
    "alpha-phase",
    "bounds",
    "res",
    // protocol
    "mode",
    "phi",
    "phi-prime",
    "delta-tau",
    "delta-tau-prime",
    "eta-a",
    "theta-a",
    "eta-b",
    "theta-b",
    "eta-a-prime",
    "theta-a-prime",
    "eta-b-prime",
    "theta-b-prime",
    "align",
    "scan-res",
    // decohere
    "kt-max",
    "kt-steps",
    "snapshots",
    "oracle-check",
    // probe
    "g",
    "t-max",
    "samples",
    "states",
    "oracle",
];

#[derive(Debug, Default, Clone)]
pub struct Settings {
    file: toml::Table,
    radians: bool,
}

impl Settings {
    pub fn load(path: Option<&Path>, radians_flag: bool) -> UsageResult<Self> {
        let file = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
            }
        };
        let mut s = Self {
            file,
            radians: false,
        };
        s.radians = radians_flag || s.bool("radians", None, false)?;
        Ok(s)
    }

    pub fn radians(&self) -> bool {
        self.radians
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        self.file.get(key)
    }

    pub fn f64(&self, key: &str, flag: Option<f64>, default: f64) -> UsageResult<f64> {
        let v = match flag {
            Some(v) => v,
            None => match self.lookup(key) {
                None => default,
                Some(toml::Value::Float(x)) => *x,
                Some(toml::Value::Integer(i)) => *i as f64,
                Some(other) => {
                    return Err(usage(format!(
                        "config key '{key}' must be a number, got {other}"
                    )))
                }
            },
        };
        if !v.is_finite() {
            return Err(usage(format!("'{key}' must be finite")));
        }
        Ok(v)
    }

    /// Angle in radians; flag and file values are in units of pi unless radians mode is on.
    pub fn angle(&self, key: &str, flag: Option<f64>, default_in_pi: f64) -> UsageResult<f64> {
        let explicit = flag.is_some() || self.lookup(key).is_some();
        let v = self.f64(key, flag, default_in_pi)?;
        Ok(if explicit && self.radians { v } else { v * PI })
    }

    pub fn usize(&self, key: &str, flag: Option<usize>, default: usize) -> UsageResult<usize> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.lookup(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(other) => Err(usage(format!(
                "config key '{key}' must be a non-negative integer, got {other}"
            ))),
        }
    }

    pub fn bool(&self, key: &str, flag: Option<bool>, default: bool) -> UsageResult<bool> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.lookup(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(other) => Err(usage(format!(
                "config key '{key}' must be true or false, got {other}"
            ))),
        }
    }

    pub fn string(&self, key: &str, flag: Option<&str>, default: &str) -> UsageResult<String> {
        if let Some(v) = flag {
            return Ok(v.to_string());
        }
        match self.lookup(key) {
            None => Ok(default.to_string()),
            Some(toml::Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(usage(format!(
                "config key '{key}' must be a string, got {other}"
            ))),
        }
    }

    /// Comma-separated on the command line, an array or a comma-separated string in the file.
    pub fn f64_list(
        &self,
        key: &str,
        flag: Option<&str>,
        default: &[f64],
    ) -> UsageResult<Vec<f64>> {
        if let Some(text) = flag {
            return parse_list(key, text);
        }
        match self.lookup(key) {
            None => Ok(default.to_vec()),
            Some(toml::Value::String(s)) => parse_list(key, s),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::Float(x) => Ok(*x),
                    toml::Value::Integer(i) => Ok(*i as f64),
                    other => Err(usage(format!(
                        "'{key}' entries must be numbers, got {other}"
                    ))),
                })
                .collect(),
            Some(other) => Err(usage(format!(
                "config key '{key}' must be a list of numbers, got {other}"
            ))),
        }
    }
}

fn parse_list(key: &str, text: &str) -> UsageResult<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("'{key}': cannot parse '{s}' as a number")))
        })
        .collect()
}

/// Parse and check a flat config file.
pub fn parse_config(text: &str) -> Result<toml::Table, String> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let known: BTreeSet<&str> = KNOWN_KEYS.iter().copied().collect();
    for (k, v) in &table {
        if !known.contains(k.as_str()) {
            return Err(format!("unknown key '{k}'"));
        }
        if matches!(v, toml::Value::Table(_)) {
            return Err(format!(
                "key '{k}': sections are not supported, the file is flat"
            ));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str, radians: bool) -> Settings {
        let mut s = Settings {
            file: parse_config(text).unwrap(),
            radians: false,
        };
        s.radians = radians || s.bool("radians", None, false).unwrap();
        s
    }

    #[test]
    fn precedence() {
        let s = settings("alpha = 3\nres = 101\n", false);
        assert_eq!(s.f64("alpha", Some(5.0), 1.0).unwrap(), 5.0);
        assert_eq!(s.f64("alpha", None, 1.0).unwrap(), 3.0);
        assert_eq!(s.f64("bounds", None, 7.5).unwrap(), 7.5);
        assert_eq!(s.usize("res", None, 11).unwrap(), 101);
        assert_eq!(s.usize("res", Some(9), 11).unwrap(), 9);
    }

    #[test]
    fn angles() {
        let s = settings("phi = 0.5\n", false);
        assert!((s.angle("phi", None, 0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((s.angle("theta-a", None, 0.25).unwrap() - PI / 4.0).abs() < 1e-15);
        let r = settings("phi = 0.5\nradians = true\n", false);
        assert_eq!(r.angle("phi", None, 0.0).unwrap(), 0.5);
        // defaults stay in units of pi regardless of mode
        assert!((r.angle("theta-a", None, 0.25).unwrap() - PI / 4.0).abs() < 1e-15);
        let f = settings("", true);
        assert_eq!(f.angle("phi", Some(1.0), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config("nonsense = 1").is_err());
        assert!(parse_config("[wigner]\nalpha = 1").is_err());
        assert!(parse_config("alpha = ").is_err());
        let s = settings("alpha = \"five\"", false);
        assert!(s.f64("alpha", None, 1.0).is_err());
    }

    #[test]
    fn lists() {
        let s = settings("snapshots = [0, 0.1, 0.5]\nstates = \"compass,cat\"", false);
        assert_eq!(
            s.f64_list("snapshots", None, &[]).unwrap(),
            vec![0.0, 0.1, 0.5]
        );
        assert_eq!(
            s.f64_list("snapshots", Some("1, 2"), &[]).unwrap(),
            vec![1.0, 2.0]
        );
        assert!(s.f64_list("snapshots", Some("1,x"), &[]).is_err());
        assert_eq!(s.string("states", None, "").unwrap(), "compass,cat");
    }
}
