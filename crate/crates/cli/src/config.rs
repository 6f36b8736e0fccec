//! Instance configuration files.

use std::fmt;

use fex_core::{GroupElement, GroupSpec, PointSet};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bounds,
    Alpha,
    Chain,
    Khinchin,
    Sweep,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Bounds => "bounds",
            Mode::Alpha => "alpha",
            Mode::Chain => "chain",
            Mode::Khinchin => "khinchin",
            Mode::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

fn default_grid() -> u32 {
    32
}
fn default_budget() -> usize {
    2000
}
fn default_samples() -> usize {
    1000
}
fn default_khinchin_n_max() -> usize {
    10
}
fn default_grid_budget() -> f64 {
    fex_core::extension::DEFAULT_GRID_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub group: Vec<i64>,
    #[serde(rename = "K", alias = "k", alias = "points", default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<i64>>>,
    #[serde(default = "default_grid", alias = "grid")]
    pub phase_grid: u32,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Base set for the peak function; the greedy set is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_set: Option<Vec<Vec<i64>>>,
    /// Largest point-set size in sweep mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Seeds for sweep mode; defaults to `[seed]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Number of random vectors in khinchin mode.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_khinchin_n_max")]
    pub khinchin_n_max: usize,
    /// Explicit vectors for khinchin mode, each entry `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default = "default_grid_budget")]
    pub grid_budget: f64,
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|err| {
            let path = err.path().to_string();
            let inner = err.into_inner();
            CliError::config(
                if path == "." { "config".to_string() } else { format!("config field `{path}`") },
                format!("{inner} (line {}, column {})", inner.line(), inner.column()),
            )
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(&self.group).map_err(|e| CliError::config("config field `group`", e.to_string()))
    }

    pub fn point_set(&self, spec: &GroupSpec) -> Result<PointSet> {
        let raw = self
            .points
            .as_ref()
            .ok_or_else(|| CliError::config("config field `K`", "required for this mode"))?;
        PointSet::from_residues(spec, raw).map_err(|e| CliError::config("config field `K`", e.to_string()))
    }

    pub fn base_set(&self, spec: &GroupSpec) -> Result<Option<Vec<GroupElement>>> {
        self.base_set
            .as_ref()
            .map(|raw| {
                raw.iter()
                    .map(|r| spec.element(r))
                    .collect::<fex_core::Result<Vec<_>>>()
                    .map_err(|e| CliError::config("config field `base_set`", e.to_string()))
            })
            .transpose()
    }

    pub fn sweep_seeds(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| vec![self.seed])
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(CliError::config(
                    "config field `schema_version`",
                    format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
                ));
            }
        }
        if self.grid_budget.is_nan() || self.grid_budget <= 0.0 {
            return Err(CliError::config("config field `grid_budget`", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_applied() {
        let cfg = InstanceConfig::from_json(r#"{"group":[8],"K":[[0],[3]],"mode":"bounds"}"#).unwrap();
        assert_eq!(cfg.phase_grid, 32);
        assert_eq!(cfg.budget, 2000);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.mode, Some(Mode::Bounds));
        assert_eq!(cfg.sweep_seeds(), vec![0]);
    }

    #[test]
    fn errors_name_the_field_and_line() {
        let err = InstanceConfig::from_json("{\n  \"group\": [8],\n  \"budget\": \"many\"\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("budget") && msg.contains("line 3"), "{msg}");
        assert_eq!(err.exit_code(), 1);

        let err = InstanceConfig::from_json(r#"{"group":[8],"colour":1}"#).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn invalid_points_are_config_errors() {
        let cfg = InstanceConfig::from_json(r#"{"group":[8],"K":[[0],[9]]}"#).unwrap();
        let spec = cfg.spec().unwrap();
        assert_eq!(cfg.point_set(&spec).unwrap_err().exit_code(), 1);
        let cfg = InstanceConfig::from_json(r#"{"group":[8],"K":[[1],[1]]}"#).unwrap();
        assert!(cfg.point_set(&spec).is_err());
        let cfg = InstanceConfig::from_json(r#"{"group":[0]}"#).unwrap();
        assert!(cfg.spec().is_err());
    }
}
