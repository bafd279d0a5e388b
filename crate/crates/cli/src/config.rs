//! Run configuration: built-in defaults, an optional preset, a flat TOML
//! file, then command-line overrides, each layer replacing the previous.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dfs_core::dynamics::TrapParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "Hz")]
    Hertz,
}

impl FrequencyUnit {
    fn to_rad_per_s(self, value: f64) -> f64 {
        match self {
            FrequencyUnit::RadPerSecond => value,
            FrequencyUnit::Hertz => 2.0 * PI * value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    #[serde(rename = "n")]
    FockN,
    Eta,
    Rabi,
    TrapFreq,
    Detuning,
}

/// Fully resolved settings. Every report embeds this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    /// Unit of `rabi`, `trap_freq` and `detuning` as written.
    pub frequency_unit: FrequencyUnit,
    pub rabi: f64,
    pub eta: f64,
    pub trap_freq: f64,
    pub detuning: f64,
    pub fock_n: u32,
    pub sweep_param: SweepParam,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_steps: usize,
    /// Ladder evolution horizon in predicted Rabi periods.
    pub horizon_cycles: f64,
    /// Half-angle of the two-pair evolution inside the CNOT sequence.
    pub cnot_theta: f64,
    /// Number of input phases, uniform in [0, 2π).
    pub theta_steps: usize,
    pub shuttle_latency: f64,
    pub paper_table: bool,
    pub sigmas: Vec<f64>,
    pub samples: usize,
    /// Relative phase of the encoded pair state used by `dephase`.
    pub dfs_theta: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            frequency_unit: FrequencyUnit::RadPerSecond,
            rabi: 1.0,
            eta: 0.02,
            trap_freq: 1.0,
            detuning: 1.0,
            fock_n: 0,
            sweep_param: SweepParam::FockN,
            sweep_min: 0.0,
            sweep_max: 5.0,
            sweep_steps: 6,
            horizon_cycles: 1.5,
            cnot_theta: dfs_core::gates::CNOT_THETA,
            theta_steps: 8,
            shuttle_latency: 0.0,
            paper_table: false,
            sigmas: vec![0.0, 0.5, 1.0, 2.0],
            samples: 10_000,
            dfs_theta: PI / 4.0,
            seed: 1,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

/// Parameter set used for the published gate-time estimate.
pub fn paper_preset() -> RunConfig {
    RunConfig {
        preset: Some("paper".into()),
        frequency_unit: FrequencyUnit::Hertz,
        rabi: 500e3,
        eta: dfs_core::dynamics::ETA_SQRT_READING,
        trap_freq: 5e6,
        detuning: 5e6,
        fock_n: 0,
        ..RunConfig::default()
    }
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    match name {
        "paper" => Ok(paper_preset()),
        "default" => Ok(RunConfig::default()),
        other => Err(CliError::Config(format!("unknown preset {other:?}"))),
    }
}

impl RunConfig {
    /// Overlays the keys of a flat TOML document.
    pub fn merge_toml(&mut self, text: &str) -> Result<(), CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(format!("config parse error: {e}")))?;
        for (key, value) in table {
            if value.is_table() {
                return Err(CliError::Config(format!(
                    "config must be flat; {key:?} is a table"
                )));
            }
            self.set_value(&key, value)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.merge_toml(&text)
    }

    /// Applies one `key=value` override; the value uses TOML syntax, with
    /// bare words accepted as strings.
    pub fn set_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override {assignment:?} is not key=value")))?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        self.set_value(key, value)
    }

    fn set_value(&mut self, key: &str, value: toml::Value) -> Result<(), CliError> {
        let mut doc = serde_json::to_value(&*self).expect("config serializes");
        let fields = doc.as_object_mut().expect("config is an object");
        if !fields.contains_key(key) {
            return Err(CliError::Config(format!("unknown config key {key:?}")));
        }
        let mut json = serde_json::to_value(&value)
            .map_err(|e| CliError::Config(format!("{key}: {e}")))?;
        // integers are accepted wherever a float is expected
        if fields[key].is_f64() {
            if let Some(i) = json.as_i64() {
                json = serde_json::json!(i as f64);
            }
        }
        if let (Some(items), true) = (json.as_array_mut(), fields[key].is_array()) {
            for item in items.iter_mut() {
                if let Some(i) = item.as_i64() {
                    *item = serde_json::json!(i as f64);
                }
            }
        }
        fields.insert(key.to_string(), json);
        *self = serde_json::from_value(doc)
            .map_err(|e| CliError::Config(format!("invalid value for {key}: {e}")))?;
        Ok(())
    }

    /// Base trap parameters in rad/s.
    pub fn trap_params(&self) -> Result<TrapParams, CliError> {
        let u = self.frequency_unit;
        TrapParams::new(
            u.to_rad_per_s(self.rabi),
            self.eta,
            u.to_rad_per_s(self.trap_freq),
            u.to_rad_per_s(self.detuning),
            self.fock_n,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Sweep grid values, `sweep_steps` points from min to max inclusive.
    pub fn sweep_values(&self) -> Result<Vec<f64>, CliError> {
        if self.sweep_steps == 0 {
            return Err(CliError::Config("sweep_steps must be at least 1".into()));
        }
        if !(self.sweep_min.is_finite() && self.sweep_max.is_finite()) {
            return Err(CliError::Config("sweep bounds must be finite".into()));
        }
        if self.sweep_steps == 1 {
            return Ok(vec![self.sweep_min]);
        }
        let span = self.sweep_max - self.sweep_min;
        Ok((0..self.sweep_steps)
            .map(|k| self.sweep_min + span * k as f64 / (self.sweep_steps - 1) as f64)
            .collect())
    }

    /// Trap parameters with the swept quantity replaced by `value`.
    pub fn params_at(&self, value: f64) -> Result<TrapParams, CliError> {
        let mut cfg = self.clone();
        match self.sweep_param {
            SweepParam::FockN => {
                if value < 0.0 || (value - value.round()).abs() > 1e-9 {
                    return Err(CliError::Config(format!(
                        "sweep value {value} is not a vibrational quantum number"
                    )));
                }
                cfg.fock_n = value.round() as u32;
            }
            SweepParam::Eta => cfg.eta = value,
            SweepParam::Rabi => cfg.rabi = value,
            SweepParam::TrapFreq => cfg.trap_freq = value,
            SweepParam::Detuning => cfg.detuning = value,
        }
        cfg.trap_params()
    }

    pub fn thetas(&self) -> Result<Vec<f64>, CliError> {
        if self.theta_steps == 0 {
            return Err(CliError::Config("theta_steps must be at least 1".into()));
        }
        Ok((0..self.theta_steps)
            .map(|k| 2.0 * PI * k as f64 / self.theta_steps as f64)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_layer_overrides_defaults() {
        let mut cfg = RunConfig::default();
        cfg.merge_toml("eta = 0.05\nfock_n = 3\nsigmas = [0, 1.5]\nformat = \"json\"")
            .unwrap();
        assert_eq!(cfg.eta, 0.05);
        assert_eq!(cfg.fock_n, 3);
        assert_eq!(cfg.sigmas, [0.0, 1.5]);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn bad_files_are_config_errors() {
        let mut cfg = RunConfig::default();
        assert!(cfg.merge_toml("eta = ").is_err());
        assert!(cfg.merge_toml("nonsense = 1").is_err());
        assert!(cfg.merge_toml("eta = \"big\"").is_err());
        assert!(cfg.merge_toml("[section]\neta = 1").is_err());
    }

    #[test]
    fn overrides_parse_toml_or_bare_words() {
        let mut cfg = RunConfig::default();
        cfg.set_override("cnot_theta=0.785").unwrap();
        cfg.set_override("frequency_unit = Hz").unwrap();
        cfg.set_override("sweep_param=eta").unwrap();
        assert_eq!(cfg.cnot_theta, 0.785);
        assert_eq!(cfg.frequency_unit, FrequencyUnit::Hertz);
        assert_eq!(cfg.sweep_param, SweepParam::Eta);
        assert!(cfg.set_override("seed").is_err());
    }

    #[test]
    fn hertz_are_converted() {
        let p = paper_preset().trap_params().unwrap();
        assert!((p.rabi() - 2.0 * PI * 5e5).abs() < 1e-6);
        assert!((p.trap_freq() - 10.0 * p.rabi()).abs() < 1e-6);
    }

    #[test]
    fn sweep_grid() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.sweep_values().unwrap(), [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(cfg.params_at(4.0).unwrap().fock_n(), 4);
        assert!(cfg.params_at(1.5).is_err());
        let single = RunConfig {
            sweep_steps: 1,
            ..RunConfig::default()
        };
        assert_eq!(single.sweep_values().unwrap(), [0.0]);
    }

    #[test]
    fn invalid_physics_is_a_config_error() {
        let cfg = RunConfig {
            detuning: 3.0,
            ..RunConfig::default()
        };
        assert!(matches!(cfg.trap_params(), Err(CliError::Config(_))));
    }
}
