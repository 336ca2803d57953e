//! `key=value` run configuration.
//!
//! Entries are separated by whitespace or newlines; `#` starts a comment.
//! Values are resolved as defaults, then the file, then command-line
//! overrides, each later source replacing earlier ones.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::solver::{Scheme, SolverConfig};

/// Accepted keys, in the order they are echoed.
pub const KEYS: [&str; 9] = [
    "radius",
    "nu",
    "dt",
    "horizon",
    "omega",
    "scheme",
    "seed",
    "sample-every",
    "output",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves `file` then `overrides` on top of the defaults, reporting
    /// every problem at once.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut errors = Vec::new();
        let mut pairs = Vec::new();
        if let Some(text) = file {
            let (p, e) = split_pairs(text);
            pairs.extend(p);
            errors.extend(e);
        }
        pairs.extend(overrides.iter().cloned());

        let mut cfg = RunConfig::default();
        for (key, value) in &pairs {
            if let Err(msg) = cfg.set(key, value) {
                errors.push(msg);
            }
        }
        if let Err(Error::InvalidConfig(v)) = cfg.solver.validate() {
            errors.extend(v);
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::InvalidConfig(errors))
        }
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.solver;
        match key {
            "radius" => s.radius = parse(key, value, "an integer >= 1")?,
            "nu" => s.nu = parse(key, value, "a number > 0")?,
            "dt" => s.dt = parse(key, value, "a number > 0")?,
            "horizon" => s.horizon = parse(key, value, "a number > 0")?,
            "omega" => s.omega = parse(key, value, "a number >= 0")?,
            "seed" => s.seed = parse(key, value, "an unsigned integer")?,
            "sample-every" => s.sample_every = parse(key, value, "an integer >= 1")?,
            "scheme" => s.scheme = value.parse::<Scheme>().map_err(|e| format!("scheme: {e}"))?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(format!("{key}: unknown key (accepted: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Fully resolved configuration as `key=value` lines.
    pub fn resolved_lines(&self) -> Vec<String> {
        let s = &self.solver;
        let mut out = vec![
            format!("radius={}", s.radius),
            format!("nu={}", s.nu),
            format!("dt={}", s.dt),
            format!("horizon={}", s.horizon),
            format!("omega={}", s.omega),
            format!("scheme={}", s.scheme),
            format!("seed={}", s.seed),
            format!("sample-every={}", s.sample_every),
        ];
        if let Some(p) = &self.output {
            out.push(format!("output={}", p.display()));
        }
        out
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: expected {expected}, got '{value}'"))
}

/// Splits configuration text into `(key, value)` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let (pairs, errors) = split_pairs(text);
    if errors.is_empty() {
        Ok(pairs)
    } else {
        Err(Error::InvalidConfig(errors))
    }
}

fn split_pairs(text: &str) -> (Vec<(String, String)>, Vec<String>) {
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            match token.split_once('=') {
                Some((k, v)) if !k.is_empty() => pairs.push((k.to_string(), v.to_string())),
                _ => errors.push(format!("'{token}': expected key=value")),
            }
        }
    }
    (pairs, errors)
}

/// Configuration from text alone.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::resolve(Some(text), &[])
}
