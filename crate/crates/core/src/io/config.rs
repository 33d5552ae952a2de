use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    measured_grid, Calibration, OperatingPoint, SimSettings, MEASURED_OD, MEASURED_PUMPS,
    MEASURED_TEMPERATURES,
};
use crate::detection::{DetectorConfig, HistogramConfig, SimError};
use crate::model::{ModelError, SourceParams};
use crate::waveform::WaveformGrid;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("`{key}`: {message}")]
    Range { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub pumps_mw: Vec<f64>,
    pub temperatures_c: Vec<f64>,
    /// α′ for each entry of `temperatures_c`.
    pub od: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            pumps_mw: MEASURED_PUMPS.to_vec(),
            temperatures_c: MEASURED_TEMPERATURES.to_vec(),
            od: MEASURED_OD.to_vec(),
        }
    }
}

impl SweepSection {
    pub fn points(&self) -> Vec<OperatingPoint> {
        if self.temperatures_c == MEASURED_TEMPERATURES && self.od == MEASURED_OD {
            return measured_grid(&self.pumps_mw);
        }
        self.temperatures_c
            .iter()
            .zip(&self.od)
            .flat_map(|(&t, &od)| {
                self.pumps_mw
                    .iter()
                    .map(move |&p| OperatingPoint::new(p, t, od))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            formats: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub physics: SourceParams,
    pub detector: DetectorConfig,
    pub calibration: Calibration,
    pub histogram: HistogramConfig,
    pub grid: WaveformGrid,
    /// Operating point used by `simulate`.
    pub scenario: OperatingPoint,
    pub sweep: SweepSection,
    pub sim: SimSettings,
    pub output: OutputSection,
}

fn range(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        key: key.to_string(),
        message: message.into(),
    }
}

fn sim_error(section: &str, e: SimError) -> ConfigError {
    let msg = e.to_string();
    let key = msg
        .split(" = ")
        .next()
        .and_then(|s| s.rsplit(' ').next())
        .unwrap_or("");
    range(format!("{section}.{key}").trim_end_matches('.'), msg)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Err(ModelError::InvalidParameter {
            name,
            value,
            expected,
        }) = self.physics.validate()
        {
            return Err(range(
                &format!("physics.{name}"),
                format!("{value} violates {expected}"),
            ));
        }
        self.detector
            .validate()
            .map_err(|e| sim_error("detector", e))?;
        self.histogram
            .n_bins()
            .map_err(|e| sim_error("histogram", e))?;
        self.grid
            .validate()
            .map_err(|e| range("grid", e.to_string()))?;
        self.calibration.validate().map_err(|e| {
            let msg = e.to_string();
            let key = msg
                .split("calibration.")
                .nth(1)
                .and_then(|s| s.split(' ').next())
                .unwrap_or("");
            range(&format!("calibration.{key}"), msg)
        })?;
        self.scenario
            .validate()
            .map_err(|e| range("scenario", e.to_string()))?;
        let s = &self.sweep;
        if s.pumps_mw.is_empty() || s.temperatures_c.is_empty() {
            return Err(range(
                "sweep",
                "pumps_mw and temperatures_c must be nonempty",
            ));
        }
        if s.od.len() != s.temperatures_c.len() {
            return Err(range("sweep.od", "needs one entry per temperature"));
        }
        if let Some(p) = s.pumps_mw.iter().find(|p| !(0.0..=64.0).contains(*p)) {
            return Err(range("sweep.pumps_mw", format!("{p} outside [0, 64]")));
        }
        if let Some(od) = s.od.iter().find(|v| !(**v > 0.0)) {
            return Err(range("sweep.od", format!("{od} must be > 0")));
        }
        if !(self.sim.duration_s > 0.0 && self.sim.duration_s.is_finite()) {
            return Err(range(
                "sim.duration_s",
                format!("{} must be > 0", self.sim.duration_s),
            ));
        }
        if self.sim.seed > i64::MAX as u64 {
            return Err(range(
                "sim.seed",
                format!("{} exceeds the TOML integer range", self.sim.seed),
            ));
        }
        if let Some(tc) = self.sim.coherence_time_s {
            if !(tc > 0.0) {
                return Err(range("sim.coherence_time_s", format!("{tc} must be > 0")));
            }
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    RunConfig::from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn negative_alpha_names_key() {
        let err = RunConfig::from_toml("[physics]\nalpha = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("physics.alpha"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            RunConfig::from_toml("[physics]\nalfa = 1.0\n"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn detector_key_named() {
        let err = RunConfig::from_toml("[detector]\neff_as = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("detector.eff_as"), "{err}");
    }
}
