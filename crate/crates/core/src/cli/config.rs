use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::diagnostics::DivergenceThresholds;
use crate::nlsolve::SolverConfig;
use crate::scenario::{Geometry, Scenario};

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment: a scenario plus everything needed to run and judge it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub refinement: RefinementConfig,
    #[serde(default)]
    pub alpha_policy: AlphaPolicy,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { half_width: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementConfig {
    /// Points per axis, coarse to fine, each a doubling. Empty selects the
    /// default schedule for the dimension.
    pub levels: Vec<usize>,
    /// End of the nonlinear run; defaults to `1.1·t*`.
    pub t_end: Option<f64>,
    /// Which levels get the `dt/2` rerun.
    pub richardson: RichardsonPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RichardsonPolicy {
    #[default]
    All,
    Coarsest,
    Off,
}

/// How the amplitude `α` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaPolicy {
    /// Use the scenario's `alpha` as given.
    Fixed,
    /// Largest `α` whose predicted Duhamel size `T^e (α n)^p` stays below a
    /// tenth of the linear peak `α P`, times `margin`.
    Auto { margin: f64 },
}

impl Default for AlphaPolicy {
    fn default() -> Self {
        AlphaPolicy::Auto { margin: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Minimum growth of the near-locus maximum per doubling.
    pub growth: f64,
    /// Cauchy tolerance for far-region values between levels.
    pub cauchy: f64,
    /// Allowed relative spread of `max_t ‖D‖∞` across levels.
    pub duhamel_tolerance: f64,
    /// Far region: distance from the singular set greater than this.
    pub far_radius: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        let t = DivergenceThresholds::default();
        Self { growth: t.growth, cauchy: t.cauchy, duhamel_tolerance: 0.05, far_radius: 0.5 }
    }
}

impl DiagnosticsConfig {
    pub fn thresholds(&self) -> DivergenceThresholds {
        DivergenceThresholds { growth: self.growth, cauchy: self.cauchy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 || !(self.start <= self.stop) {
            return Err(CliError::Config(format!(
                "empty axis range [{}, {}] with {} points",
                self.start, self.stop, self.count
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.start + step * k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dim: usize,
    pub geometry: Geometry,
    pub p: AxisRange,
    pub s: AxisRange,
    /// Run the full pipeline on every feasible cell.
    #[serde(default)]
    pub run_cells: bool,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Config = serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                config.schema_version
            )));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_json(&text)
    }

    pub fn levels(&self) -> Vec<usize> {
        if !self.refinement.levels.is_empty() {
            return self.refinement.levels.clone();
        }
        match self.scenario.dim {
            1 => vec![1024, 2048, 4096],
            2 => vec![256, 512, 1024],
            _ => vec![32, 64, 128],
        }
    }

    pub fn t_end(&self) -> f64 {
        self.refinement.t_end.unwrap_or(1.1 * self.scenario.t_star.abs())
    }
}
