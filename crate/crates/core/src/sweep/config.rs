use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disorder::{DisorderSpec, SeedPlan};
use crate::error::{Error, Result};
use crate::initial::{same_site, superposition, two_site, InputEntry, InputSpec};
use crate::model::{LatticeSpec, Statistics, TwoBosonState};
use crate::observables::LEAKAGE_MARGIN;
use crate::propagator::TimeGrid;

pub const DEFAULT_REALIZATIONS: usize = 200;
pub const DEFAULT_BASE_SEED: u64 = 0x5EED_2014;
pub const DEFAULT_U_GRID: [f64; 17] = [
    0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0, 12.0, -12.0, 16.0, -16.0, 20.0, -20.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Pr,
    Gamma,
    Density,
    Leakage,
    /// Per-realization PR trajectories.
    Realizations,
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Pr, Observable::Gamma, Observable::Density, Observable::Leakage]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKind {
    SameSite {
        site: i64,
    },
    TwoSite {
        sites: [i64; 2],
        #[serde(default)]
        statistics: Statistics,
    },
    Superposition {
        entries: Vec<InputEntry>,
        #[serde(default)]
        statistics: Statistics,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialStateConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: InitialKind,
}

impl InitialStateConfig {
    pub fn build(&self, lattice: &LatticeSpec) -> Result<TwoBosonState> {
        match &self.kind {
            InitialKind::SameSite { site } => same_site(lattice, *site),
            InitialKind::TwoSite { sites, statistics } => two_site(lattice, sites[0], sites[1], *statistics),
            InitialKind::Superposition { entries, statistics } => superposition(
                lattice,
                &InputSpec {
                    entries: entries.clone(),
                    statistics: *statistics,
                },
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
}

fn default_seed() -> u64 {
    DEFAULT_BASE_SEED
}

fn default_realizations() -> usize {
    DEFAULT_REALIZATIONS
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self {
            base_seed: DEFAULT_BASE_SEED,
            realizations: DEFAULT_REALIZATIONS,
        }
    }
}

fn default_sites() -> usize {
    LatticeSpec::DEFAULT_SITES
}

fn default_u_grid() -> Vec<f64> {
    DEFAULT_U_GRID.to_vec()
}

fn default_margin() -> usize {
    LEAKAGE_MARGIN
}

fn default_true() -> bool {
    true
}

/// One sweep over interaction strengths and disorder realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default = "default_u_grid")]
    pub u_values: Vec<f64>,
    pub disorder: DisorderSpec,
    #[serde(default)]
    pub time: TimeGrid,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default = "default_margin")]
    pub leakage_margin: usize,
    #[serde(default = "default_true")]
    pub feasibility_warnings: bool,
    #[serde(default)]
    pub export_design: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub initial_states: Vec<InitialStateConfig>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.sites).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn seed_plan(&self) -> Result<SeedPlan> {
        SeedPlan::new(self.seeds.base_seed, self.seeds.realizations).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn wants(&self, observable: Observable) -> bool {
        self.observables.contains(&observable)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }

    /// Builds every initial state, failing on the first invalid one.
    pub fn build_states(&self) -> Result<Vec<TwoBosonState>> {
        let lattice = self.lattice()?;
        self.initial_states
            .iter()
            .map(|s| {
                s.build(&lattice)
                    .map_err(|e| Error::Config(format!("initial state '{}': {e}", s.name)))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return cfg(format!("name '{}' must be non-empty [A-Za-z0-9_-]", self.name));
        }
        let lattice = self.lattice()?;
        if self.u_values.is_empty() {
            return cfg("u_values must not be empty".into());
        }
        if let Some(u) = self.u_values.iter().find(|u| !u.is_finite()) {
            return cfg(format!("non-finite interaction {u}"));
        }
        self.disorder.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.time.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.seed_plan()?;
        if 2 * self.leakage_margin >= lattice.sites() {
            return cfg(format!("leakage_margin {} must be below L/2", self.leakage_margin));
        }
        if self.initial_states.is_empty() {
            return cfg("at least one initial state is required".into());
        }
        let mut names = HashSet::new();
        for s in &self.initial_states {
            if s.name.is_empty() || s.name.contains([',', '"', '\n']) {
                return cfg(format!("invalid initial-state name '{}'", s.name));
            }
            if !names.insert(s.name.as_str()) {
                return cfg(format!("duplicate initial-state name '{}'", s.name));
            }
        }
        for (cfg_state, state) in self.initial_states.iter().zip(self.build_states()?) {
            if state.statistics() != Statistics::Bosonic {
                return cfg(format!(
                    "initial state '{}': sweeps use the symmetric pair basis and need bosonic statistics",
                    cfg_state.name
                ));
            }
        }
        Ok(())
    }
}
