//! Run configuration: tolerances, horizons and sampling densities shared by
//! the library entry points and the command-line tools.
//!
//! Values come from (highest precedence first) explicit setters / CLI flags,
//! a `key = value` configuration file, and the built-in defaults.

use crate::field::Tolerances;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
}

/// Tunable parameters with their defaults.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RunConfig {
    /// Distance below which a point counts as on the switching manifold.
    pub on_sigma_tol: f64,
    /// Threshold on Lie derivatives for tangency classification.
    pub tangency_tol: f64,
    /// Time step of the generic integrator.
    pub integration_step: f64,
    /// Default forward horizon for branch enumeration.
    pub horizon: f64,
    /// Maximum number of branches explored before truncation.
    pub branch_budget: usize,
    /// Sample points per arc for Hausdorff/portrait work.
    pub samples_per_arc: usize,
    /// Materialization window for the infinite family's lattice.
    pub window: u32,
    /// Seed for all randomized verification runs.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            on_sigma_tol: 1e-9,
            tangency_tol: 1e-9,
            integration_step: 1e-3,
            horizon: 10.0,
            branch_budget: 256,
            samples_per_arc: 512,
            window: 64,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            on_sigma: self.on_sigma_tol,
            tangency: self.tangency_tol,
        }
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(
            key: &str,
            value: &str,
            line: usize,
        ) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::BadValue {
                line,
                key: key.to_string(),
                message: e.to_string(),
            })
        }
        match key {
            "on_sigma_tol" => self.on_sigma_tol = num(key, value, line)?,
            "tangency_tol" => self.tangency_tol = num(key, value, line)?,
            "integration_step" => self.integration_step = num(key, value, line)?,
            "horizon" => self.horizon = num(key, value, line)?,
            "branch_budget" => self.branch_budget = num(key, value, line)?,
            "samples_per_arc" => self.samples_per_arc = num(key, value, line)?,
            "window" => self.window = num(key, value, line)?,
            "seed" => self.seed = num(key, value, line)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Parses a `key = value` document (`#` starts a comment) on top of the
    /// current values.
    pub fn merge_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.apply(key.trim(), value.trim(), i + 1)?;
        }
        Ok(())
    }

    pub fn from_str_document(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }
}
