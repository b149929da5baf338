//! Scenario configuration, read from TOML and overridden by flags.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "SEPQ_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Aerts,
    Chsh,
    Models,
    ProductTest,
    Epr,
    NoCloning,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Aerts => "aerts",
            Scenario::Chsh => "chsh",
            Scenario::Models => "models",
            Scenario::ProductTest => "product-test",
            Scenario::Epr => "epr",
            Scenario::NoCloning => "no-cloning",
        }
    }

    pub fn default_samples(self) -> u64 {
        match self {
            Scenario::Aerts => 10_000,
            Scenario::Chsh => 100_000,
            Scenario::Models => 10_000,
            Scenario::ProductTest => 1_000,
            Scenario::Epr => 10_000,
            Scenario::NoCloning => 1,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Named two-qubit states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TwoQubitState {
    Singlet,
    PsiPlus,
    PhiPlus,
    #[serde(rename = "product-00")]
    #[value(name = "product-00")]
    Product00,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    All,
    RodDice,
    Vessels,
    Rock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AertsParams {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Indices of the side-A basis outcomes forming `I`.
    pub subset_a: Vec<usize>,
    pub subset_b: Vec<usize>,
    /// Measure in Haar-random bases instead of the computational ones.
    pub random_basis: bool,
    pub tol: f64,
}

impl Default for AertsParams {
    fn default() -> Self {
        Self {
            dim_a: 2,
            dim_b: 2,
            subset_a: vec![0],
            subset_b: vec![0],
            random_basis: false,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChshParams {
    pub state: TwoQubitState,
    pub angles_a: [f64; 2],
    pub angles_b: [f64; 2],
}

impl Default for ChshParams {
    fn default() -> Self {
        let (a, b) = sepq_core::bell::optimal_singlet_angles();
        Self {
            state: TwoQubitState::Singlet,
            angles_a: a,
            angles_b: b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelsParams {
    pub model: ModelChoice,
    pub rock_angles_a: [f64; 2],
    pub rock_angles_b: [f64; 2],
    /// Angles `k·2π/(grid_points − 1)` searched for the rock's largest |S|.
    pub grid_points: usize,
    /// Fragment directions enumerated for the rock's hidden variable.
    pub directions: usize,
}

impl Default for ModelsParams {
    fn default() -> Self {
        let (a, b) = sepq_core::bell::optimal_singlet_angles();
        Self {
            model: ModelChoice::All,
            rock_angles_a: a,
            rock_angles_b: b,
            grid_points: 17,
            directions: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProductTestParams {
    pub cube_states: Vec<String>,
}

impl Default for ProductTestParams {
    fn default() -> Self {
        Self {
            cube_states: vec!["intact".into(), "wet".into(), "burned".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EprParams {
    pub state: TwoQubitState,
    pub observables: Vec<String>,
}

impl Default for EprParams {
    fn default() -> Self {
        Self {
            state: TwoQubitState::Singlet,
            observables: vec!["Z".into(), "X".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoCloningParams {
    /// One of `0`, `1`, `+`, `-`, `+i`, `-i`.
    pub psi: String,
    pub phi: String,
}

impl Default for NoCloningParams {
    fn default() -> Self {
        Self {
            psi: "0".into(),
            phi: "+".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default = "max_dim")]
    pub max_dim: usize,
    #[serde(default)]
    pub aerts: AertsParams,
    #[serde(default)]
    pub chsh: ChshParams,
    #[serde(default)]
    pub models: ModelsParams,
    #[serde(default)]
    pub product_test: ProductTestParams,
    #[serde(default)]
    pub epr: EprParams,
    #[serde(default)]
    pub no_cloning: NoCloningParams,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn max_dim() -> usize {
    sepq_core::hilbert::DEFAULT_MAX_DIM
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario,
            seed: None,
            samples: None,
            max_dim: max_dim(),
            aerts: AertsParams::default(),
            chsh: ChshParams::default(),
            models: ModelsParams::default(),
            product_test: ProductTestParams::default(),
            epr: EprParams::default(),
            no_cloning: NoCloningParams::default(),
        }
    }

    /// Parse a TOML document. A missing `scenario` is taken from `scenario`;
    /// a different one is an error.
    pub fn from_toml(text: &str, scenario: Scenario) -> Result<Self, CliError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::config("config", e.message().to_string()))?;
        match table.get("scenario") {
            None => {
                table.insert("scenario".into(), toml::Value::String(scenario.name().into()));
            }
            Some(toml::Value::String(s)) if s == scenario.name() => {}
            Some(other) => {
                return Err(CliError::config(
                    "scenario",
                    format!("file names scenario {other}, command line asks for `{scenario}`"),
                ))
            }
        }
        let cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(field_of(&e), e.message().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path, scenario: Scenario) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Fill `seed` (flag, file, `SEPQ_SEED`, then 42) and `samples`, and
    /// validate.
    pub fn resolve(mut self, env_seed: Option<&str>) -> Result<Self, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.seed.is_none() {
            self.seed = Some(match env_seed {
                Some(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| CliError::config(SEED_ENV, format!("`{s}` is not an unsigned 64-bit integer")))?,
                None => DEFAULT_SEED,
            });
        }
        let samples = self.samples.unwrap_or_else(|| self.scenario.default_samples());
        if samples == 0 {
            return Err(CliError::config("samples", "must be positive"));
        }
        self.samples = Some(samples);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        let a = &self.aerts;
        if a.dim_a == 0 || a.dim_b == 0 {
            return Err(CliError::config("aerts.dim_a", "dimensions must be positive"));
        }
        if a.dim_a * a.dim_b > self.max_dim {
            return Err(CliError::config(
                "aerts.dim_a",
                format!("space dimension {} exceeds max_dim {}", a.dim_a * a.dim_b, self.max_dim),
            ));
        }
        if let Some(k) = a.subset_a.iter().find(|&&k| k >= a.dim_a) {
            return Err(CliError::config("aerts.subset_a", format!("index {k} out of range")));
        }
        if let Some(k) = a.subset_b.iter().find(|&&k| k >= a.dim_b) {
            return Err(CliError::config("aerts.subset_b", format!("index {k} out of range")));
        }
        if !(a.tol > 0.0 && a.tol < 1.0) {
            return Err(CliError::config("aerts.tol", "must lie in (0, 1)"));
        }
        let m = &self.models;
        if m.grid_points < 2 {
            return Err(CliError::config("models.grid_points", "need at least 2 grid points"));
        }
        if m.directions == 0 {
            return Err(CliError::config("models.directions", "must be positive"));
        }
        for s in &self.product_test.cube_states {
            if !["intact", "wet", "burned"].contains(&s.as_str()) {
                return Err(CliError::config("product_test.cube_states", format!("unknown state `{s}`")));
            }
        }
        if self.epr.observables.is_empty() {
            return Err(CliError::config("epr.observables", "need at least one observable"));
        }
        for o in &self.epr.observables {
            sepq_core::product_test::EprObservable::parse(o)
                .map_err(|_| CliError::config("epr.observables", format!("unknown observable `{o}`")))?;
        }
        for (field, name) in [("no_cloning.psi", &self.no_cloning.psi), ("no_cloning.phi", &self.no_cloning.phi)] {
            crate::scenarios::qubit_state(name).map_err(|_| CliError::config(field, format!("unknown state `{name}`")))?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or_else(|| self.scenario.default_samples())
    }
}

/// Best-effort name of the offending key in a TOML error.
fn field_of(e: &toml::de::Error) -> String {
    let msg = e.message();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(start) = msg.find(marker) {
            let rest = &msg[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "config".to_string()
}
