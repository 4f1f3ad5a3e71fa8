use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical kernels and the Monte Carlo engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error(
        "theta' grid of {points} points cannot resolve the broadened delta at tau = {tau} \
         (largest resolvable tau is {max_tau})"
    )]
    Unresolved {
        points: usize,
        tau: f64,
        max_tau: f64,
    },

    #[error("transition weight underflows for theta = {theta}, tau_f = {tau_f}")]
    DegenerateWeight { theta: f64, tau_f: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Config file problems. `line` is 1-based; 0 means the error is not tied to a line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { line: usize, key: String },

    #[error("line {line}: `{key}` expects {expected}, found {found:?}")]
    Value {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },

    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::Syntax { .. } => None,
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Value { key, .. }
            | ConfigError::Invalid { key, .. } => Some(key),
        }
    }
}

/// Top-level failure of an experiment run.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Numerical(#[from] Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            _ => 1,
        }
    }
}
