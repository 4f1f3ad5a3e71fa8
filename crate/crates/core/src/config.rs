//! Flat `key = value` run configuration.
//!
//! `#` starts a comment, blank lines are ignored, keys may appear at most once and unknown keys are
//! rejected. List values are comma separated.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::ConfigError;
use crate::rates::{DEFAULT_TAU_POINTS, DEFAULT_THETA_POINTS};
use crate::stats::{DEFAULT_BINS, DEFAULT_SNAPSHOT_TIMES};

pub const DEFAULT_SEED: u64 = 20_221_022;

/// (key, meaning, default) for every recognised key.
pub const KEYS: &[(&str, &str, &str)] = &[
    (
        "tau_c_over_period",
        "scattering time over precession period, t_c/(2π/ω)",
        "20",
    ),
    ("n_paths", "number of Monte Carlo paths", "100000"),
    ("tau_end", "simulation horizon in units of t_c", "2"),
    (
        "snapshot_times",
        "comma-separated snapshot times in units of t_c",
        "0, 0.2, 0.6, 1, 2",
    ),
    ("n_theta_bins", "bins of the theta histograms", "50"),
    (
        "n_theta_grid",
        "theta' quadrature points of the rate table",
        "2048",
    ),
    ("n_tau_grid", "tau points of the rate table", "4096"),
    (
        "master_seed",
        "64-bit seed (decimal or 0x-prefixed hex)",
        "20221022",
    ),
    ("output_dir", "directory receiving the run artifacts", "out"),
    (
        "sweep",
        "comma-separated tau_c_over_period values; one subdirectory per value",
        "(none)",
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tau_c_over_period: f64,
    pub n_paths: usize,
    pub tau_end: f64,
    pub snapshot_times: Vec<f64>,
    pub n_theta_bins: usize,
    pub n_theta_grid: usize,
    pub n_tau_grid: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub sweep: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tau_c_over_period: 20.0,
            n_paths: 100_000,
            tau_end: 2.0,
            snapshot_times: DEFAULT_SNAPSHOT_TIMES.to_vec(),
            n_theta_bins: DEFAULT_BINS,
            n_theta_grid: DEFAULT_THETA_POINTS,
            n_tau_grid: DEFAULT_TAU_POINTS,
            master_seed: DEFAULT_SEED,
            output_dir: PathBuf::from("out"),
            sweep: Vec::new(),
        }
    }
}

impl RunConfig {
    /// τ_c = ωt_c = 2π·(t_c/(2π/ω)).
    pub fn tau_c(&self) -> f64 {
        2.0 * PI * self.tau_c_over_period
    }

    /// Horizon in dimensionless time ωt.
    pub fn tau_end_abs(&self) -> f64 {
        self.tau_end * self.tau_c()
    }

    /// Rate-table range: 4τ_c, extended to the horizon if that is longer.
    pub fn tau_max(&self) -> f64 {
        (4.0 * self.tau_c()).max(self.tau_end_abs())
    }

    /// Cross-field checks not tied to a single line.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: String| ConfigError::Invalid {
            key: key.into(),
            reason,
        };
        if !(self.tau_c_over_period > 0.0 && self.tau_c_over_period.is_finite()) {
            return Err(invalid(
                "tau_c_over_period",
                "must be positive and finite".into(),
            ));
        }
        if !(self.tau_end > 0.0 && self.tau_end.is_finite()) {
            return Err(invalid("tau_end", "must be positive and finite".into()));
        }
        for &(key, v) in &[
            ("n_paths", self.n_paths),
            ("n_theta_bins", self.n_theta_bins),
        ] {
            if v == 0 {
                return Err(invalid(key, "must be positive".into()));
            }
        }
        for &(key, v) in &[
            ("n_theta_grid", self.n_theta_grid),
            ("n_tau_grid", self.n_tau_grid),
        ] {
            if v < 2 {
                return Err(invalid(key, "needs at least 2 points".into()));
            }
        }
        if self.snapshot_times.is_empty() {
            return Err(invalid("snapshot_times", "needs at least one time".into()));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(0.0..=self.tau_end).contains(*t))
        {
            return Err(invalid(
                "snapshot_times",
                format!("{t} lies outside [0, tau_end = {}]", self.tau_end),
            ));
        }
        if let Some(r) = self.sweep.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(invalid("sweep", format!("{r} is not a positive ratio")));
        }
        Ok(())
    }

    /// Renders the configuration in the file format; `validate_config` reads it back unchanged.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "tau_c_over_period = {}", self.tau_c_over_period);
        let _ = writeln!(s, "n_paths = {}", self.n_paths);
        let _ = writeln!(s, "tau_end = {}", self.tau_end);
        let _ = writeln!(s, "snapshot_times = {}", list(&self.snapshot_times));
        let _ = writeln!(s, "n_theta_bins = {}", self.n_theta_bins);
        let _ = writeln!(s, "n_theta_grid = {}", self.n_theta_grid);
        let _ = writeln!(s, "n_tau_grid = {}", self.n_tau_grid);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        if !self.sweep.is_empty() {
            let _ = writeln!(s, "sweep = {}", list(&self.sweep));
        }
        s
    }
}

fn value_err(line: usize, key: &str, expected: &'static str, found: &str) -> ConfigError {
    ConfigError::Value {
        line,
        key: key.into(),
        expected,
        found: found.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(value_err(line, key, "a finite number", v)),
    }
}

fn parse_positive_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match parse_f64(line, key, v) {
        Ok(x) if x > 0.0 => Ok(x),
        _ => Err(value_err(line, key, "a positive number", v)),
    }
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    match v.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(value_err(line, key, "a positive integer", v)),
    }
}

fn parse_seed(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse::<u64>(),
    };
    parsed.map_err(|_| value_err(line, key, "an unsigned 64-bit integer", v))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|item| {
            let item = item.trim();
            match item.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(value_err(
                    line,
                    key,
                    "a comma-separated list of numbers",
                    item,
                )),
            }
        })
        .collect()
}

/// Parses configuration text. Missing keys take their defaults; an empty text gives
/// `RunConfig::default()`.
pub fn validate_config(raw: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw_line) in raw.lines().enumerate() {
        let line = idx + 1;
        let text = raw_line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw_line.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: raw_line.to_string(),
            });
        }
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.into(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.into(),
            });
        }
        match key {
            "tau_c_over_period" => cfg.tau_c_over_period = parse_positive_f64(line, key, value)?,
            "n_paths" => cfg.n_paths = parse_count(line, key, value)?,
            "tau_end" => cfg.tau_end = parse_positive_f64(line, key, value)?,
            "snapshot_times" => cfg.snapshot_times = parse_list(line, key, value)?,
            "n_theta_bins" => cfg.n_theta_bins = parse_count(line, key, value)?,
            "n_theta_grid" => cfg.n_theta_grid = parse_count(line, key, value)?,
            "n_tau_grid" => cfg.n_tau_grid = parse_count(line, key, value)?,
            "master_seed" => cfg.master_seed = parse_seed(line, key, value)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err(value_err(line, key, "a path", value));
                }
                cfg.output_dir = PathBuf::from(value);
            }
            "sweep" => cfg.sweep = parse_list(line, key, value)?,
            _ => unreachable!("key list checked above"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a list of dimensionless times such as `pi, 2pi, 3.5π, 10*pi, 7`.
pub fn parse_tau_list(raw: &str) -> Result<Vec<f64>, String> {
    let taus = raw
        .split(',')
        .map(|item| {
            parse_pi_multiple(item.trim()).ok_or_else(|| format!("cannot read {item:?} as a time"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(format!("times must be positive, got {t}"));
    }
    Ok(taus)
}

fn parse_pi_multiple(item: &str) -> Option<f64> {
    let lower = item.to_ascii_lowercase();
    let stripped = lower.strip_suffix("π").or_else(|| lower.strip_suffix("pi"));
    match stripped {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>().ok()?
            };
            Some(c * PI)
        }
        None => item.parse::<f64>().ok(),
    }
}
