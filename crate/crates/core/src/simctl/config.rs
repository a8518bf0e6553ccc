use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{AtgEnvironment, RadioParams};
use crate::deployment::{hex_cell_count, PlacementGrid, ServiceArea};
use crate::error::{Error, Result};
use crate::mobility::MobilityParams;
use crate::placement::LearningConfig;

/// Which network is simulated. The names follow the full-size layout; at
/// desk scale `aerial18plus1` means "all but one ground BS, plus the aerial".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BaselineMode {
    /// Every ground BS on, no aerial BS.
    #[serde(rename = "ground19")]
    Ground19,
    /// One ground BS switched off after the threshold snapshot, one aerial BS added.
    #[default]
    #[serde(rename = "aerial18plus1")]
    Aerial18Plus1,
}

/// How a triggered slot picks the aerial position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    QLearning,
    /// Brute force over the grid; refused above `oracle_state_limit`.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "paper")]
    Paper,
    #[serde(rename = "desk")]
    Desk,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Paper => "paper",
            Preset::Desk => "desk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_y: usize,
    pub n_h: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_users: usize,
    /// Hexagonal rings around the center cell; 2 rings give 19 sites.
    pub n_rings: usize,
    /// seconds
    pub t_min: f64,
    /// seconds
    pub sim_duration: f64,
    pub baseline_mode: BaselineMode,
    /// Ground BS switched off in aerial mode; absent means the center cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disabled_bs: Option<usize>,
    #[serde(default)]
    pub solver: Solver,
    /// dBm
    pub ground_tx_power: f64,
    /// dBm
    pub aerial_tx_power: f64,
    /// m
    pub antenna_height: f64,
    pub oracle_state_limit: usize,
    pub area: ServiceArea,
    pub grid: GridSpec,
    pub env: AtgEnvironment,
    pub radio: RadioParams,
    pub mobility: MobilityParams,
    pub learning: LearningConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::preset(Preset::Paper)
    }
}

impl ScenarioConfig {
    pub fn preset(preset: Preset) -> Self {
        let paper = Self {
            seed: 1,
            n_users: 300,
            n_rings: 2,
            t_min: 10.0,
            sim_duration: 100.0,
            baseline_mode: BaselineMode::Aerial18Plus1,
            disabled_bs: None,
            solver: Solver::QLearning,
            ground_tx_power: 46.0,
            aerial_tx_power: 36.0,
            antenna_height: 25.0,
            oracle_state_limit: 100_000,
            area: ServiceArea::default(),
            grid: GridSpec {
                n_x: 21,
                n_y: 21,
                n_h: 11,
            },
            env: AtgEnvironment::urban(),
            radio: RadioParams::default(),
            mobility: MobilityParams::default(),
            learning: LearningConfig::default(),
        };
        match preset {
            Preset::Paper => paper,
            Preset::Desk => Self {
                n_users: 100,
                n_rings: 1,
                sim_duration: 300.0,
                grid: GridSpec { n_x: 5, n_y: 5, n_h: 3 },
                ..paper
            },
        }
    }

    /// Overlays a TOML document on `base`. Keys missing from the document keep
    /// the base value; unknown keys are rejected.
    pub fn overlay_toml(base: &ScenarioConfig, text: &str, origin: &Path) -> Result<Self> {
        let mut merged = toml::Table::try_from(base).map_err(|e| Error::format(origin, e))?;
        let overlay: toml::Table = text.parse().map_err(|e| Error::format(origin, e))?;
        merge_tables(&mut merged, overlay);
        let cfg: ScenarioConfig = merged.try_into().map_err(|e| Error::format(origin, e))?;
        Ok(cfg)
    }

    pub fn load(base: &ScenarioConfig, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::overlay_toml(base, &text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    pub fn placement_grid(&self) -> Result<PlacementGrid> {
        PlacementGrid::new(self.area, self.grid.n_x, self.grid.n_y, self.grid.n_h)
    }

    pub fn ground_bs_count(&self) -> usize {
        hex_cell_count(self.n_rings)
    }

    pub fn disabled_id(&self) -> usize {
        self.disabled_bs.unwrap_or(0)
    }

    /// Number of slot boundaries after the initial instant.
    pub fn n_slots(&self) -> usize {
        (self.sim_duration / self.t_min + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_min must be positive, got {}", self.t_min)));
        }
        if !(self.sim_duration >= self.t_min && self.sim_duration.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sim_duration ({}) must be at least t_min ({})",
                self.sim_duration, self.t_min
            )));
        }
        for (name, v) in [
            ("ground_tx_power", self.ground_tx_power),
            ("aerial_tx_power", self.aerial_tx_power),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        self.area.validate()?;
        self.placement_grid()?;
        self.env.validate()?;
        self.radio.validate()?;
        self.mobility.validate()?;
        self.learning.validate()?;
        let n_bs = self.ground_bs_count();
        if self.baseline_mode == BaselineMode::Aerial18Plus1 && self.disabled_id() >= n_bs {
            return Err(Error::InvalidConfig(format!(
                "disabled_bs {} does not exist ({} ground BSs)",
                self.disabled_id(),
                n_bs
            )));
        }
        Ok(())
    }
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
