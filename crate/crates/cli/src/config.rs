//! Run configuration: flat `key = value` text or JSON.

use std::collections::BTreeMap;
use std::fmt;

use fdlab::{BCutoff, QuadConfig};
use serde::{Deserialize, Serialize};

use crate::suites;

/// Upper bound on |n| for Heisenberg suites.
pub const MAX_N_HEIS: i64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Suite ids or glob patterns such as `axb.*`.
    pub suites: Vec<String>,
    pub seed: u64,
    pub quad: QuadConfig,
    /// Per-suite (`axb.leibniz`) or per-check (`axb.orthogonality/cross`) tolerances.
    pub tolerances: BTreeMap<String, f64>,
    /// Overrides every suite's default corpus size when set.
    pub corpus_size: Option<usize>,
    pub max_n_heis: i64,
    pub max_n_su2: usize,
    pub out_path: Option<String>,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: vec!["*".into()],
            seed: 42,
            quad: QuadConfig::default().with_rel_tol(1e-8),
            tolerances: BTreeMap::new(),
            corpus_size: None,
            max_n_heis: 3,
            max_n_su2: 4,
            out_path: None,
            tol_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse '{v}'")))
}

impl RunConfig {
    /// JSON when the text starts with `{`, key-value lines otherwise.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON config: {e}")))
        } else {
            Self::parse_kv(text)
        }
    }

    fn parse_kv(text: &str) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "suites" => {
                    c.suites = value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect()
                }
                "seed" => c.seed = num(key, value)?,
                "corpus_size" => c.corpus_size = Some(num(key, value)?),
                "max_n_heis" => c.max_n_heis = num(key, value)?,
                "max_n_su2" => c.max_n_su2 = num(key, value)?,
                "out" | "out_path" => c.out_path = Some(value.to_string()),
                "tol_scale" => c.tol_scale = num(key, value)?,
                "quad.rel_tol" => c.quad.rel_tol = num(key, value)?,
                "quad.abs_tol" => c.quad.abs_tol = num(key, value)?,
                "quad.base_order" => c.quad.base_order = num(key, value)?,
                "quad.max_panels" => c.quad.max_panels = num(key, value)?,
                "quad.osc_panels_per_period" => c.quad.osc_panels_per_period = num(key, value)?,
                "quad.b_cutoff" => c.quad.b_cutoff = parse_cutoff(value)?,
                _ => match key.strip_prefix("tol.") {
                    Some(id) => {
                        c.tolerances.insert(id.to_string(), num(key, value)?);
                    }
                    None => return err(format!("line {}: unknown key '{key}'", lineno + 1)),
                },
            }
        }
        Ok(c)
    }

    /// Checks ranges and resolves suite patterns; returns the selected ids in order.
    pub fn validate(&self) -> Result<Vec<&'static str>, ConfigError> {
        self.quad
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return err("tol_scale must be positive");
        }
        if !(1..=MAX_N_HEIS).contains(&self.max_n_heis) {
            return err(format!("max_n_heis must be in 1..={MAX_N_HEIS}"));
        }
        if self.max_n_su2 > fdlab::su2::MAX_IRREP {
            return err(format!("max_n_su2 must be at most {}", fdlab::su2::MAX_IRREP));
        }
        for (k, v) in &self.tolerances {
            let suite = k.split('/').next().unwrap_or(k);
            if suites::find(suite).is_none() {
                return err(format!("tolerance for unknown suite '{suite}'"));
            }
            if !(*v > 0.0) {
                return err(format!("tolerance for '{k}' must be positive"));
            }
        }
        select(&self.suites)
    }
}

fn parse_cutoff(v: &str) -> Result<BCutoff, ConfigError> {
    match v.split_once(':') {
        Some(("fixed", b)) => Ok(BCutoff::Fixed { b: num("quad.b_cutoff", b)? }),
        Some(("certified", t)) => Ok(BCutoff::Certified {
            target_tail: num("quad.b_cutoff", t)?,
        }),
        _ => err(format!("quad.b_cutoff: expected fixed:<B> or certified:<tail>, got '{v}'")),
    }
}

/// Suite ids matching any pattern, in registry order. Every pattern must match something.
pub fn select(patterns: &[String]) -> Result<Vec<&'static str>, ConfigError> {
    if patterns.is_empty() {
        return err("no suites selected");
    }
    let mut keep = vec![false; suites::ALL.len()];
    for p in patterns {
        let pat = glob::Pattern::new(p).map_err(|e| ConfigError(format!("bad suite pattern '{p}': {e}")))?;
        let mut hit = false;
        for (i, s) in suites::ALL.iter().enumerate() {
            if pat.matches(s.id) {
                keep[i] = true;
                hit = true;
            }
        }
        if !hit {
            return err(format!("unknown suite '{p}'"));
        }
    }
    Ok(suites::ALL
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(s, _)| s.id)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_round_trip() {
        let c = RunConfig::parse(
            "# comment\nsuites = su2.*, axb.nonvanishing\nseed = 7\nquad.b_cutoff = fixed:40\ntol.su2.schur = 1e-9\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.quad.b_cutoff, BCutoff::Fixed { b: 40.0 });
        assert_eq!(c.tolerances["su2.schur"], 1e-9);
        let ids = c.validate().unwrap();
        assert!(ids.contains(&"axb.nonvanishing"));
        assert!(ids.iter().filter(|s| s.starts_with("su2.")).count() > 3);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&json).unwrap(), c);
    }

    #[test]
    fn unknown_things_are_rejected() {
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("{\"bogus\": 1}").is_err());
        let c = RunConfig::parse("suites = nosuch.*").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::parse("tol.nosuch = 1e-3").unwrap();
        assert!(c.validate().is_err());
    }
}
