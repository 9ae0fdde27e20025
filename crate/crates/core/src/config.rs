//! JSON run configuration.
//!
//! A config file is a flat JSON object. Every key is optional and unknown keys
//! are rejected:
//!
//! ```json
//! {
//!   "kind": "avg_sum_rate",
//!   "master_seed": 42,
//!   "trials": 10000,
//!   "n_bs_values": [16, 32, 64],
//!   "policy": "gain",
//!   "grid": { "abs_psi12_min": 0.01, "abs_psi12_max": 1.0, "abs_psi12_points": 200,
//!             "alpha12_min": 1.0, "alpha12_max": 10.0, "alpha12_points": 200 },
//!   "carrier_frequency_hz": 28e9,
//!   "cell_radius_m": 200,
//!   "num_nlos_paths": 10,
//!   "max_aod_difference_deg": 10,
//!   "min_distance_m": 10,
//!   "tx_power_dbm": 30,
//!   "noise_power_dbm": -88,
//!   "n_ue": 8,
//!   "element_spacing": 0.5,
//!   "shadowing": false
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ScenarioConfig;
use crate::experiments::{ExperimentKind, ExperimentSpec, GridSpec};
use crate::rates::FeasibilityPolicy;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bs_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<FeasibilityPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_nlos_paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_aod_difference_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ue: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadowing: Option<bool>,
}

impl ConfigFile {
    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::ConfigParse {
            path: origin.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, path)
    }

    /// Fully populated file describing `spec`.
    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        let s = &spec.scenario;
        Self {
            kind: Some(spec.kind),
            master_seed: Some(spec.master_seed),
            trials: Some(spec.trials),
            n_bs_values: Some(spec.n_bs_values.clone()),
            policy: Some(spec.policy),
            grid: spec.grid.clone(),
            carrier_frequency_hz: Some(s.carrier_frequency_hz),
            cell_radius_m: Some(s.cell_radius_m),
            num_nlos_paths: Some(s.num_nlos_paths),
            max_aod_difference_deg: Some(s.max_aod_difference_deg),
            min_distance_m: Some(s.min_distance_m),
            tx_power_dbm: Some(s.tx_power_dbm),
            noise_power_dbm: Some(s.noise_power_dbm),
            n_ue: Some(s.n_ue),
            element_spacing: Some(s.element_spacing),
            shadowing: Some(s.shadowing),
        }
    }

    /// Fills unspecified keys with defaults and validates. `kind` overrides
    /// the file's own `kind`; with neither, the average sum-rate study is
    /// assumed.
    pub fn resolve(&self, kind: Option<ExperimentKind>) -> Result<ExperimentSpec> {
        let kind = kind.or(self.kind).unwrap_or(ExperimentKind::AvgSumRate);
        let mut spec = ExperimentSpec::new(kind);
        let d = ScenarioConfig::default();
        spec.scenario = ScenarioConfig {
            carrier_frequency_hz: self.carrier_frequency_hz.unwrap_or(d.carrier_frequency_hz),
            cell_radius_m: self.cell_radius_m.unwrap_or(d.cell_radius_m),
            num_nlos_paths: self.num_nlos_paths.unwrap_or(d.num_nlos_paths),
            max_aod_difference_deg: self
                .max_aod_difference_deg
                .unwrap_or(d.max_aod_difference_deg),
            min_distance_m: self.min_distance_m.unwrap_or(d.min_distance_m),
            tx_power_dbm: self.tx_power_dbm.unwrap_or(d.tx_power_dbm),
            noise_power_dbm: self.noise_power_dbm.unwrap_or(d.noise_power_dbm),
            n_ue: self.n_ue.unwrap_or(d.n_ue),
            element_spacing: self.element_spacing.unwrap_or(d.element_spacing),
            shadowing: self.shadowing.unwrap_or(d.shadowing),
        };
        if let Some(seed) = self.master_seed {
            spec.master_seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(n_bs) = &self.n_bs_values {
            spec.n_bs_values = n_bs.clone();
        }
        if let Some(policy) = self.policy {
            spec.policy = policy;
        }
        if let Some(grid) = &self.grid {
            spec.grid = Some(grid.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Reads a config file and resolves it against the defaults.
pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    ConfigFile::read(path)?.resolve(None)
}

/// Serializes `spec` in the config-file schema.
pub fn spec_to_json(spec: &ExperimentSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ConfigFile::from_spec(spec))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentSpec,
    pub output_path: PathBuf,
    pub format: OutputFormat,
    /// Worker threads; `None` uses all cores. Does not affect results.
    pub threads: Option<usize>,
}
