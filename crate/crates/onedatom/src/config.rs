//! Run configuration: JSON config files with flat keys matching the CLI flag
//! names. Flags override file values; per-experiment defaults fill the rest.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PowerGrid, ThreeLevelParams, TimeGrid, TwoLevelParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid value: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Transient,
    SteadySweep,
    QdSweep,
    Threshold,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A fully specified run: experiment, parameter overrides, grid settings and
/// output destination. Unset fields fall back to the experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub gamma_star: Option<f64>,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub delta_l: Option<f64>,
    #[serde(default)]
    pub g2: Option<f64>,
    #[serde(default)]
    pub gamma_xx: Option<f64>,
    #[serde(default)]
    pub p_min: Option<f64>,
    #[serde(default)]
    pub p_max: Option<f64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            gamma: None,
            beta: None,
            gamma_star: None,
            xi: None,
            p: None,
            delta_l: None,
            g2: None,
            gamma_xx: None,
            p_min: None,
            p_max: None,
            points: None,
            t_max: None,
            steps: None,
            out: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_file(path: &PathBuf) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.clone(), source })?;
        serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.clone(), source })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Overlays `self` (the higher-precedence source, e.g. flags) on top of
    /// `base` (e.g. a config file).
    pub fn overlay(self, base: Self) -> Self {
        Self {
            experiment: self.experiment,
            gamma: self.gamma.or(base.gamma),
            beta: self.beta.or(base.beta),
            gamma_star: self.gamma_star.or(base.gamma_star),
            xi: self.xi.or(base.xi),
            p: self.p.or(base.p),
            delta_l: self.delta_l.or(base.delta_l),
            g2: self.g2.or(base.g2),
            gamma_xx: self.gamma_xx.or(base.gamma_xx),
            p_min: self.p_min.or(base.p_min),
            p_max: self.p_max.or(base.p_max),
            points: self.points.or(base.points),
            t_max: self.t_max.or(base.t_max),
            steps: self.steps.or(base.steps),
            out: self.out.or(base.out),
            format: self.format,
        }
    }

    /// Two-level parameters with experiment defaults for unset fields.
    pub fn two_level_params(&self) -> Result<TwoLevelParams, ConfigError> {
        let defaults = match self.experiment {
            // incoherently pumped steady-state runs default to ξ = 3γ
            Experiment::SteadySweep | Experiment::Threshold => {
                TwoLevelParams { xi: 3.0, ..Default::default() }
            }
            _ => TwoLevelParams::default(),
        };
        let params = TwoLevelParams {
            gamma: self.gamma.unwrap_or(defaults.gamma),
            beta: self.beta.unwrap_or(defaults.beta),
            gamma_star: self.gamma_star.unwrap_or(defaults.gamma_star),
            xi: self.xi.unwrap_or(defaults.xi),
            p: self.p.unwrap_or(defaults.p),
            delta_l: self.delta_l.unwrap_or(defaults.delta_l),
        };
        params.validate().map_err(|errs| ConfigError::Invalid(errs.join("; ")))?;
        Ok(params)
    }

    /// Three-level parameters; the sweep default is the pumped cascade
    /// (Λ²/Δ = 4Γ_X, Γ_XX = 2Γ_X).
    pub fn three_level_params(&self) -> Result<ThreeLevelParams, ConfigError> {
        let params = ThreeLevelParams {
            gamma_x: self.gamma.unwrap_or(1.0),
            gamma_xx: self.gamma_xx.unwrap_or(2.0),
            g2: self.g2.unwrap_or(4.0),
            delta_2ph: 0.0,
            beta: self.beta.unwrap_or(1.0),
            p: self.p.unwrap_or(0.0),
            gamma_star: self.gamma_star.unwrap_or(0.0),
        };
        params.validate().map_err(|errs| ConfigError::Invalid(errs.join("; ")))?;
        Ok(params)
    }

    pub fn time_grid(&self, params: &TwoLevelParams) -> Result<TimeGrid, ConfigError> {
        let t_max = self.t_max.unwrap_or(10.0 / params.gamma);
        let grid = match self.steps {
            Some(n_steps) => TimeGrid::new(t_max, n_steps),
            None => TimeGrid::with_step(t_max, params.default_time_step()),
        };
        grid.validate().map_err(|errs| ConfigError::Invalid(errs.join("; ")))?;
        Ok(grid)
    }

    pub fn power_grid(&self) -> Result<PowerGrid, ConfigError> {
        let defaults = PowerGrid::default();
        let grid = PowerGrid {
            p_min: self.p_min.unwrap_or(defaults.p_min),
            p_max: self.p_max.unwrap_or(defaults.p_max),
            n_points: self.points.unwrap_or(defaults.n_points),
            include_zero: true,
        };
        grid.validate().map_err(|errs| ConfigError::Invalid(errs.join("; ")))?;
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact() {
        let mut cfg = RunConfig::new(Experiment::Transient);
        cfg.p = Some(30.0);
        cfg.gamma_star = Some(10.0);
        cfg.out = Some(PathBuf::from("fig2.csv"));
        cfg.format = OutputFormat::Json;
        let parsed: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = serde_json::from_str::<RunConfig>(
            r#"{"experiment": "transient", "pump": 3.0}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("pump"));
    }

    #[test]
    fn kebab_case_keys() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"experiment": "steady-sweep", "gamma-star": 10.0, "p-max": 100.0}"#,
        )
        .unwrap();
        assert_eq!(cfg.gamma_star, Some(10.0));
        assert_eq!(cfg.p_max, Some(100.0));
    }

    #[test]
    fn overlay_precedence() {
        let mut file = RunConfig::new(Experiment::Transient);
        file.p = Some(1.0);
        file.xi = Some(2.0);
        let mut flags = RunConfig::new(Experiment::Transient);
        flags.p = Some(30.0);
        let merged = flags.overlay(file);
        assert_eq!(merged.p, Some(30.0));
        assert_eq!(merged.xi, Some(2.0));
    }

    #[test]
    fn steady_sweep_defaults_to_pumped_atom() {
        let cfg = RunConfig::new(Experiment::SteadySweep);
        let params = cfg.two_level_params().unwrap();
        assert_eq!(params.xi, 3.0);
        assert_eq!(params.beta, 1.0);
    }

    #[test]
    fn invalid_value_names_the_key() {
        let mut cfg = RunConfig::new(Experiment::Transient);
        cfg.beta = Some(1.5);
        let err = cfg.two_level_params().unwrap_err();
        assert!(err.to_string().contains("beta out of [0,1]"));
    }
}
