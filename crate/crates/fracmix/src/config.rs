//! Experiment configuration: a TOML document whose keys are usually written
//! flat with dotted sections (`grid.I = 200`).
//!
//! A top-level `preset = "<name>"` key starts from one of the built-in
//! presets and lets the remaining keys override it. Unknown keys are errors
//! in strict mode and warnings otherwise.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracmix_core::initial::Profile;
use fracmix_core::spectrum::KrylovOptions;
use fracmix_core::{DiffusiveGrid, EnergyVariant, GridSpec, MaterialParams, NewmarkParams};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::presets;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("unknown preset `{0}` (available: {avail})", avail = presets::NAMES.join(", "))]
    UnknownPreset(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub lx: f64,
    pub ly: f64,
    #[serde(rename = "I")]
    pub nx: usize,
    #[serde(rename = "J")]
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialConfig {
    pub rho1: f64,
    pub rho2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    /// Zero-order coupling coefficient of `alpha (u - v)`.
    pub coupling: f64,
    /// Fractional order in (0, 1).
    pub order: f64,
    #[serde(default)]
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiffusiveConfig {
    pub modes: usize,
    pub spacing: f64,
}

impl Default for DiffusiveConfig {
    fn default() -> Self {
        Self {
            modes: 100,
            spacing: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewmarkConfig {
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
}

impl Default for NewmarkConfig {
    fn default() -> Self {
        Self {
            beta: 0.25,
            gamma: 0.5,
            dt: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VariantConfig {
    #[default]
    Quadrature,
    Paper,
}

impl From<VariantConfig> for EnergyVariant {
    fn from(v: VariantConfig) -> Self {
        match v {
            VariantConfig::Quadrature => EnergyVariant::Quadrature,
            VariantConfig::Paper => EnergyVariant::Paper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub t_final: f64,
    /// Record the energy every `cadence` steps.
    pub cadence: usize,
    /// `false` drops every diffusive mode.
    pub damping: bool,
    pub energy_variant: VariantConfig,
    pub snapshot_times: Vec<f64>,
    pub snapshot_format: SnapshotFormat,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            cadence: 1,
            damping: true,
            energy_variant: VariantConfig::Quadrature,
            snapshot_times: Vec::new(),
            snapshot_format: SnapshotFormat::Csv,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Serializable mirror of [`Profile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileConfig {
    #[default]
    Zero,
    Gaussian {
        center: [f64; 2],
        sigma: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Cone {
        center: [f64; 2],
        radius: f64,
    },
    Bump6 {
        center: [f64; 2],
        radius: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl From<ProfileConfig> for Profile {
    fn from(p: ProfileConfig) -> Self {
        match p {
            ProfileConfig::Zero => Profile::Zero,
            ProfileConfig::Gaussian {
                center,
                sigma,
                amplitude,
            } => Profile::Gaussian {
                center,
                sigma,
                amplitude,
            },
            ProfileConfig::Cone { center, radius } => Profile::Cone { center, radius },
            ProfileConfig::Bump6 { center, radius } => Profile::Bump6 { center, radius },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialConfig {
    pub u0: ProfileConfig,
    pub v0: ProfileConfig,
    pub u1: ProfileConfig,
    pub v1: ProfileConfig,
}

impl Default for InitialConfig {
    /// The two Gaussians of the first example: one on the x axis for `u`,
    /// one on the y axis for `v`, both at rest.
    fn default() -> Self {
        Self {
            u0: ProfileConfig::Gaussian {
                center: [0.5, 0.0],
                sigma: 0.01,
                amplitude: 1.0,
            },
            v0: ProfileConfig::Gaussian {
                center: [0.0, 0.5],
                sigma: 0.01,
                amplitude: 1.0,
            },
            u1: ProfileConfig::Zero,
            v1: ProfileConfig::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    #[default]
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumConfig {
    pub solver: SolverKind,
    /// Eigenvalues requested from the Krylov solver.
    pub k: usize,
    pub seed: u64,
    pub max_restarts: usize,
    pub tol: f64,
    pub dense_limit: usize,
    /// Mode counts for the dominant-eigenvalue trend table; empty skips it.
    pub mode_counts: Vec<usize>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        let k = KrylovOptions::new(6);
        Self {
            solver: SolverKind::Dense,
            k: k.k,
            seed: k.seed,
            max_restarts: k.max_restarts,
            tol: k.tol,
            dense_limit: fracmix_core::sparse::DEFAULT_DENSE_LIMIT,
            mode_counts: Vec::new(),
        }
    }
}

impl SpectrumConfig {
    pub fn krylov_options(&self) -> KrylovOptions {
        KrylovOptions {
            k: self.k,
            max_restarts: self.max_restarts,
            tol: self.tol,
            subspace: None,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct DecayConfig {
    /// `[t_min, t_max]` of the log-log fit run after a simulation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub material: MaterialConfig,
    #[serde(default)]
    pub diffusive: DiffusiveConfig,
    #[serde(default)]
    pub newmark: NewmarkConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub decay: DecayConfig,
}

impl ExperimentConfig {
    pub fn grid_spec(&self) -> fracmix_core::Result<GridSpec> {
        GridSpec::new(self.grid.lx, self.grid.ly, self.grid.nx, self.grid.ny)
    }

    /// Builds the material parameters; this is where an indefinite
    /// elasticity matrix gets reported.
    pub fn material_params(&self) -> fracmix_core::Result<MaterialParams> {
        let m = &self.material;
        MaterialParams::new(
            m.rho1, m.rho2, m.a11, m.a12, m.a22, m.coupling, m.order, m.eta,
        )
    }

    pub fn newmark_params(&self) -> fracmix_core::Result<NewmarkParams> {
        NewmarkParams::new(self.newmark.beta, self.newmark.gamma, self.newmark.dt)
    }

    /// The configured mode grid, or an empty one with damping off.
    pub fn mode_grid(&self) -> fracmix_core::Result<DiffusiveGrid> {
        if self.run.damping {
            DiffusiveGrid::new(
                self.material.order,
                self.diffusive.modes,
                self.diffusive.spacing,
            )
        } else {
            DiffusiveGrid::empty(self.material.order)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let wrap = |e: fracmix_core::Error| ConfigError::Invalid(e.to_string());
        self.grid_spec().map_err(wrap)?;
        self.material_params().map_err(wrap)?;
        self.newmark_params().map_err(wrap)?;
        self.mode_grid().map_err(wrap)?;
        for p in [
            self.initial.u0,
            self.initial.v0,
            self.initial.u1,
            self.initial.v1,
        ] {
            Profile::from(p).validate().map_err(wrap)?;
        }
        let r = &self.run;
        if !(r.t_final >= 0.0 && r.t_final.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "run.t_final must be non-negative, got {}",
                r.t_final
            )));
        }
        if r.cadence == 0 {
            return Err(ConfigError::Invalid(
                "run.cadence must be at least 1".into(),
            ));
        }
        if let Some(t) = r
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= r.t_final))
        {
            return Err(ConfigError::Invalid(format!(
                "run.snapshot_times entry {t} lies outside [0, {}]",
                r.t_final
            )));
        }
        if self.spectrum.k == 0 {
            return Err(ConfigError::Invalid("spectrum.k must be at least 1".into()));
        }
        if let Some([a, b]) = self.decay.window {
            if !(a > 0.0 && b > a) {
                return Err(ConfigError::Invalid(format!(
                    "decay.window must satisfy 0 < t_min < t_max, got [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }
}

/// Reads and validates a configuration file in strict mode.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, true)
}

/// Parses configuration text, expanding a `preset` key if present.
pub fn parse_config(text: &str, strict: bool) -> Result<ExperimentConfig, ConfigError> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    if let Some(name) = table.remove("preset") {
        let name = name
            .as_str()
            .ok_or_else(|| ConfigError::Parse("`preset` must be a string".into()))?
            .to_owned();
        let base = presets::preset(&name).ok_or(ConfigError::UnknownPreset(name.clone()))?;
        let mut merged = Table::try_from(&base).map_err(|e| ConfigError::Parse(e.to_string()))?;
        merge(&mut merged, table);
        table = merged;
        log::info!("expanded preset `{name}`");
    }
    let mut unknown = Vec::new();
    let cfg: ExperimentConfig =
        serde_ignored::deserialize(Value::Table(table), |path| unknown.push(path.to_string()))
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
    if !unknown.is_empty() {
        if strict {
            return Err(ConfigError::UnknownKeys(unknown));
        }
        for k in &unknown {
            log::warn!("ignoring unknown configuration key `{k}`");
        }
    }
    cfg.validate()?;
    if !cfg
        .material_params()
        .map(|p| p.elasticity_ok())
        .unwrap_or(true)
    {
        log::warn!(
            "elasticity matrix is not positive definite (a11 = {}, a11 a22 - a12^2 = {}); \
             the stiffness may be indefinite and the energy unbounded",
            cfg.material.a11,
            cfg.material.a11 * cfg.material.a22 - cfg.material.a12 * cfg.material.a12
        );
    }
    log::debug!("effective configuration:\n{}", emit_config(&cfg));
    Ok(cfg)
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Writes every field as a flat `section.key = value` line, with sections
/// separated by blank lines. The output parses back to the same config.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let table = Table::try_from(cfg).expect("configuration serializes to TOML");
    let mut out = String::new();
    for (section, value) in &table {
        let mut lines = Vec::new();
        flatten(section, value, &mut lines);
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out.push('\n');
    }
    out.pop();
    out
}

fn flatten(prefix: &str, value: &Value, lines: &mut Vec<String>) {
    match value {
        Value::Table(t) => {
            for (k, v) in t {
                flatten(&format!("{prefix}.{}", key(k)), v, lines);
            }
        }
        v => {
            let mut s = String::new();
            let _ = write!(s, "{prefix} = {v}");
            lines.push(s);
        }
    }
}

fn key(k: &str) -> String {
    if !k.is_empty()
        && k.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        k.to_owned()
    } else {
        Value::String(k.to_owned()).to_string()
    }
}
