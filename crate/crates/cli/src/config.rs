//! JSON run configuration.
//!
//! ```json
//! {
//!   "prior": { "kind": "gaussian", "mean": 0.0, "variance": 1.0 },
//!   "beta_grid": { "min": 0.1, "max": 10.0, "points": 16, "spacing": "log" },
//!   "quadrature": { "fd_step": 1e-3 },
//!   "oracle": { "mc_samples": 1000000, "seed": 42 }
//! }
//! ```
//!
//! `beta_grid` may instead list explicit values: `{ "values": [0.5, 1, 2] }`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thermomi::{InputDistribution, OracleConfig, PriorSpec, QuadratureConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl BetaGrid {
    pub fn range(min: f64, max: f64, points: usize, spacing: Spacing) -> Self {
        Self { min: Some(min), max: Some(max), points: Some(points), spacing, values: None }
    }

    pub fn values(values: &[f64]) -> Self {
        Self { values: Some(values.to_vec()), ..Self::default() }
    }

    /// Expands the grid into strictly increasing positive β values.
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let mut betas = match &self.values {
            Some(values) => {
                if self.min.is_some() || self.max.is_some() || self.points.is_some() {
                    return Err(config("beta_grid", "give either `values` or `min`/`max`/`points`, not both"));
                }
                if values.is_empty() {
                    return Err(CliError::Config("beta grid empty".into()));
                }
                for (i, &b) in values.iter().enumerate() {
                    if !(b > 0.0 && b.is_finite()) {
                        return Err(config(&format!("beta_grid.values[{i}]"), "must be positive and finite"));
                    }
                }
                values.clone()
            }
            None => self.expand_range()?,
        };
        betas.sort_by(f64::total_cmp);
        betas.dedup();
        Ok(betas)
    }

    fn expand_range(&self) -> Result<Vec<f64>, CliError> {
        let points = self.points.ok_or_else(|| config("beta_grid.points", "missing"))?;
        if points == 0 {
            return Err(CliError::Config("beta grid empty".into()));
        }
        let min = self.min.ok_or_else(|| config("beta_grid.min", "missing"))?;
        let max = self.max.ok_or_else(|| config("beta_grid.max", "missing"))?;
        if !(min > 0.0 && min.is_finite()) {
            return Err(config("beta_grid.min", "must be positive and finite"));
        }
        if !(max >= min && max.is_finite()) {
            return Err(config("beta_grid.max", "must be finite and not below min"));
        }
        if points == 1 {
            return Ok(vec![min]);
        }
        let last = (points - 1) as f64;
        let mut out: Vec<f64> = (0..points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => min + (max - min) * t,
                    Spacing::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
                }
            })
            .collect();
        out[0] = min;
        out[points - 1] = max;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub prior: PriorSpec,
    pub beta_grid: BetaGrid,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Makes `verify` require the classical route to match the generalized
    /// one. Expected to fail for non-equiprobable priors.
    #[serde(default)]
    pub strict_classical: bool,
}

/// A config that passed every field check.
#[derive(Debug, Clone)]
pub struct Validated {
    pub raw: RunConfig,
    pub prior: InputDistribution,
    pub betas: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(self) -> Result<Validated, CliError> {
        let prior = InputDistribution::try_from(self.prior.clone())
            .map_err(|e| config("prior", &e.to_string()))?;
        self.quadrature.validate().map_err(|e| prefixed("quadrature", e))?;
        self.oracle.validate().map_err(|e| prefixed("oracle", e))?;
        let betas = self.beta_grid.resolve()?;
        Ok(Validated { raw: self, prior, betas })
    }
}

fn config(field: &str, reason: &str) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn prefixed(section: &str, e: thermomi::Error) -> CliError {
    match e {
        thermomi::Error::InvalidConfig { field, reason } => config(&format!("{section}.{field}"), &reason),
        other => config(section, &other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_both_ends() {
        let g = BetaGrid::range(0.1, 10.0, 16, Spacing::Log).resolve().unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[15], 10.0);
        let r = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_grid() {
        let g = BetaGrid::range(1.0, 2.0, 5, Spacing::Linear).resolve().unwrap();
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn values_are_sorted_and_deduplicated() {
        let g = BetaGrid::values(&[2.0, 0.5, 1.0, 2.0]).resolve().unwrap();
        assert_eq!(g, vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn empty_grids_are_rejected() {
        for grid in [BetaGrid::values(&[]), BetaGrid::range(0.1, 1.0, 0, Spacing::Log)] {
            let err = grid.resolve().unwrap_err();
            assert_eq!(err.to_string(), "beta grid empty");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn bad_fields_are_named() {
        let err = BetaGrid::values(&[1.0, -1.0]).resolve().unwrap_err();
        assert!(err.to_string().contains("beta_grid.values[1]"), "{err}");

        let text = r#"{"prior": {"kind": "gaussian", "mean": 0, "variance": 1},
                       "beta_grid": {"values": [1]},
                       "quadrature": {"fd_step": 0.5}}"#;
        let err = RunConfig::from_json(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("quadrature.fd_step"), "{err}");

        let text = r#"{"prior": {"kind": "discrete", "atoms": [[1, 0.5], [1, 0.5]]},
                       "beta_grid": {"values": [1]}}"#;
        let err = RunConfig::from_json(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().starts_with("prior:"), "{err}");

        let text = r#"{"prior": {"kind": "gaussian", "mean": 0, "variance": 1},
                       "beta_grid": {"values": [1]}, "quadratur": {}}"#;
        let err = RunConfig::from_json(text).unwrap_err();
        assert!(err.to_string().contains("quadratur"), "{err}");
    }

    #[test]
    fn oracle_seed_key() {
        let text = r#"{"prior": {"kind": "gaussian", "mean": 0, "variance": 1},
                       "beta_grid": {"values": [1]},
                       "oracle": {"mc_samples": 200000, "seed": 7}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.oracle.rng_seed, 7);
        assert_eq!(cfg.oracle.mc_samples, 200_000);
    }
}
