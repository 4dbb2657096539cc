//! Run configuration: a TOML key tree with units in the key names.

use std::path::{Path, PathBuf};

use gradcat_core::eos::{builtin, DeclaredConstants, EntropyProfile, PressureLaw, ProfileShape, StateBox};
use gradcat_core::pipeline::Scenario;
use gradcat_core::riccati::Direction;
use gradcat_core::solver::{Boundary, Grid, InitialData, DEFAULT_CFL};
use gradcat_core::thermo::{MuConvention, Thermo};
use gradcat_core::{ParamMap, ParamValue};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl ConfigError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosConfig {
    pub law: String,
    #[serde(default)]
    pub params: ParamMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub k: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub k1: f64,
    pub k2: f64,
    /// `l₁ … l₈`.
    pub l: [f64; 8],
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let d = DeclaredConstants::default();
        Self {
            k: d.k,
            a: d.a,
            k1: d.k1,
            k2: d.k2,
            l: d.l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    pub profile: String,
    /// Rate `r` of the weight `m = exp(r·S)`; defaults to the law's own rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_rate: Option<f64>,
    #[serde(default)]
    pub params: ParamMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_left: f64,
    pub x_right: f64,
    pub cells: usize,
    pub boundary: Boundary,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub family: String,
    #[serde(default)]
    pub params: ParamMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon_time: f64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel_gradient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_floor_volume: Option<f64>,
    #[serde(default = "default_threshold_samples")]
    pub threshold_samples: usize,
    /// Replaces the estimated threshold `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_override: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_eps() -> f64 {
    0.05
}

fn default_threshold_samples() -> usize {
    24
}

fn default_max_steps() -> usize {
    1_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Every `stride_steps`-th stored level goes to the trajectory CSV; the last always does.
    #[serde(default = "default_stride")]
    pub stride_steps: usize,
}

fn default_stride() -> usize {
    10
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("run"),
            stride_steps: default_stride(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    #[serde(default)]
    pub seeds_x: Vec<f64>,
    #[serde(default)]
    pub direction: DirectionName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionName {
    #[default]
    Forward,
    Backward,
}

impl From<DirectionName> for Direction {
    fn from(d: DirectionName) -> Self {
        match d {
            DirectionName::Forward => Direction::Forward,
            DirectionName::Backward => Direction::Backward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionName {
    #[default]
    FixedTau,
    FixedH,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub tau_range_volume: [f64; 2],
    #[serde(default = "default_check_samples")]
    pub samples_per_axis: usize,
    #[serde(default)]
    pub mu_convention: ConventionName,
}

fn default_check_samples() -> usize {
    17
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tau_range_volume: [0.1, 10.0],
            samples_per_axis: default_check_samples(),
            mu_convention: ConventionName::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub eos: EosConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    pub entropy: EntropyConfig,
    pub grid: GridConfig,
    pub initial: InitialConfig,
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub trace: TraceConfig,
    #[serde(default)]
    pub check: CheckConfig,
}

/// Reads a config file as a raw key tree, so sweeps can edit it before parsing.
pub fn load_tree(path: &Path) -> Result<toml::Table, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse::<toml::Table>().map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn from_tree(tree: toml::Table, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::Value::Table(tree)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Invalid(e.to_string()))?;
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Makes a relative custom-table file path relative to the config file.
    fn resolve_paths(&mut self, base: &Path) {
        if let Some(ParamValue::Text(file)) = self.initial.params.get_mut("file") {
            let p = Path::new(file.as_str());
            if p.is_relative() {
                *file = base.join(p).to_string_lossy().into_owned();
            }
        }
    }

    pub fn law(&self) -> Result<PressureLaw, ConfigError> {
        let function = builtin(&self.eos.law, &self.eos.params).map_err(ConfigError::invalid)?;
        let c = &self.constants;
        let constants = DeclaredConstants {
            k: c.k,
            a: c.a,
            k1: c.k1,
            k2: c.k2,
            l: c.l,
        };
        constants.validate().map_err(ConfigError::invalid)?;
        Ok(PressureLaw::new(function, constants))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid.x_left, self.grid.x_right)
    }

    pub fn profile(&self, law: &PressureLaw) -> Result<EntropyProfile, ConfigError> {
        let shape = ProfileShape::from_params(&self.entropy.profile, &self.entropy.params).map_err(ConfigError::invalid)?;
        let rate = match self.entropy.weight_rate {
            Some(r) => r,
            None => law.function.weight_rate().ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "law {} has no default weight rate; set entropy.weight_rate",
                    self.eos.law
                ))
            })?,
        };
        EntropyProfile::new(shape, rate, self.domain()).map_err(ConfigError::invalid)
    }

    pub fn thermo(&self) -> Result<Thermo, ConfigError> {
        let law = self.law()?;
        let profile = self.profile(&law)?;
        Ok(Thermo::new(law, profile))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.grid.x_left, self.grid.x_right, self.grid.cells, self.grid.boundary).map_err(ConfigError::invalid)
    }

    pub fn initial(&self) -> Result<InitialData, ConfigError> {
        let family = self.initial.family.as_str();
        if family == "custom-table" {
            let file = match self.initial.params.get("file") {
                Some(ParamValue::Text(f)) => f.clone(),
                Some(_) => return Err(ConfigError::Invalid("initial.params.file must be a path".into())),
                None => return Err(ConfigError::Invalid("custom-table needs initial.params.file".into())),
            };
            let rows = read_table(Path::new(&file))?;
            return InitialData::from_rows(&rows).map_err(ConfigError::invalid);
        }
        InitialData::from_params(family, &self.initial.params).map_err(ConfigError::invalid)
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let r = &self.run;
        if !(r.horizon_time > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "run.horizon_time must be positive, got {}",
                r.horizon_time
            )));
        }
        if !(r.epsilon > 0.0 && r.epsilon < 1.0) {
            return Err(ConfigError::Invalid(format!("run.epsilon must lie in (0, 1), got {}", r.epsilon)));
        }
        if !(self.grid.cfl > 0.0) {
            return Err(ConfigError::Invalid(format!("grid.cfl must be positive, got {}", self.grid.cfl)));
        }
        let mut sc = Scenario::new(self.thermo()?, self.grid()?, self.initial()?, r.horizon_time);
        sc.sentinel = r.sentinel_gradient;
        sc.eps = r.epsilon;
        sc.cfl = self.grid.cfl;
        sc.tau_floor = r.tau_floor_volume;
        sc.threshold_samples = r.threshold_samples;
        sc.n_override = r.threshold_override;
        sc.max_steps = r.max_steps;
        Ok(sc)
    }

    pub fn check_box(&self) -> Result<StateBox, ConfigError> {
        let [lo, hi] = self.check.tau_range_volume;
        StateBox::new((lo, hi), self.domain()).map_err(ConfigError::invalid)
    }

    pub fn mu_convention(&self) -> MuConvention {
        match self.check.mu_convention {
            ConventionName::FixedTau => MuConvention::FixedTau,
            ConventionName::FixedH => MuConvention::FixedH,
        }
    }
}

/// Rows `x, τ, u` from a CSV file with a header line.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>, ConfigError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::Invalid(format!("{} row {}: {e}", path.display(), i + 2)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Sets a dotted key such as `initial.params.amplitude` in a key tree.
pub fn set_key(tree: &mut toml::Table, key: &str, value: f64) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut table = tree;
    for p in path {
        table = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(format!("sweep axis {key}: {p} is not a table")))?;
    }
    let v = match table.get(*last) {
        Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        Some(toml::Value::Integer(_)) => {
            return Err(ConfigError::Invalid(format!("sweep axis {key} takes integers, got {value}")))
        }
        Some(toml::Value::Float(_)) | None => toml::Value::Float(value),
        Some(other) => {
            return Err(ConfigError::Invalid(format!(
                "sweep axis {key} holds a {}, not a number",
                other.type_str()
            )))
        }
    };
    table.insert(last.to_string(), v);
    Ok(())
}
