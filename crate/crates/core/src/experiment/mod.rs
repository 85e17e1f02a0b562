//! Experiment configuration, built-in presets and the sweep runners behind
//! the `uav-irs-noma` command line tool.
//!
//! A config is a TOML file with one table per concern:
//!
//! ```toml
//! mode = "both"            # analytic | mc | both
//! weight_mode = "binomial" # binomial | paper-literal
//!
//! [network]                # every NetworkParams field
//! tx_power_watts = 30.0
//! # ...
//!
//! [elevation]              # degrees at this boundary, radians inside
//! kind = "deterministic"
//! degrees = 15.0
//!
//! [sweep]
//! kind = "power-ratio"     # power-ratio | elevation | assoc-stats | optimize-elevation
//! ratios = [0.5, 1.0, 2.0]
//! irs_elements = [8, 16]
//!
//! [sim]                    # optional, SimConfig defaults apply
//! trials = 100000
//! seed = 24301
//!
//! [output]                 # optional
//! csv = "power.csv"
//! svg = "power.svg"
//! ```

mod run;
mod table;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use run::{run, run_assoc_stats, run_elevation_sweep, run_optimize, run_power_sweep, Check, RunOutput};
pub use table::{emit_csv, emit_svg, Marker, ResultTable, Series, SeriesStyle};

use crate::coverage::{WeightMode, MAX_IRS_ELEMENTS};
use crate::error::{Error, Result};
use crate::montecarlo::{SimConfig, EDGE_BAND, MIN_INTERIOR_BSS};
use crate::network::{ElevationModel, NetworkParams};

/// Which estimators a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Analytic,
    Mc,
    #[default]
    Both,
}

impl RunMode {
    pub fn analytic(self) -> bool {
        matches!(self, RunMode::Analytic | RunMode::Both)
    }

    pub fn montecarlo(self) -> bool {
        matches!(self, RunMode::Mc | RunMode::Both)
    }
}

impl std::str::FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(RunMode::Analytic),
            "mc" => Ok(RunMode::Mc),
            "both" => Ok(RunMode::Both),
            other => Err(Error::Config(format!("unknown mode `{other}` (expected analytic, mc or both)"))),
        }
    }
}

/// Elevation-angle model in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElevationConfig {
    Deterministic { degrees: f64 },
    Uniform { lo_degrees: f64, hi_degrees: f64 },
}

impl Default for ElevationConfig {
    fn default() -> Self {
        ElevationConfig::Deterministic { degrees: 15.0 }
    }
}

impl ElevationConfig {
    pub fn to_model(self) -> Result<ElevationModel> {
        match self {
            ElevationConfig::Deterministic { degrees } => ElevationModel::deterministic(degrees.to_radians()),
            ElevationConfig::Uniform { lo_degrees, hi_degrees } => {
                ElevationModel::uniform(lo_degrees.to_radians(), hi_degrees.to_radians())
            }
        }
    }
}

/// What a run sweeps over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepConfig {
    /// `c_n` and `c_f` against `P_n / P_f` at the configured elevation.
    PowerRatio { ratios: Vec<f64>, irs_elements: Vec<u32> },
    /// `c_f` against a deterministic elevation angle at a fixed split.
    Elevation { angles_deg: Vec<f64>, irs_elements: Vec<u32>, p_near: f64, p_far: f64 },
    /// Association-count PMFs against simulation; `sim.trials` counts
    /// windows of radius `window_radius` metres.
    AssocStats { window_radius: f64, max_count: usize },
    /// Optimal deterministic elevation per element count.
    OptimizeElevation { irs_elements: Vec<u32>, p_near: f64, p_far: f64, grid_points: usize, resolution_deg: f64 },
}

impl SweepConfig {
    pub fn kind(&self) -> SweepKind {
        match self {
            SweepConfig::PowerRatio { .. } => SweepKind::PowerRatio,
            SweepConfig::Elevation { .. } => SweepKind::Elevation,
            SweepConfig::AssocStats { .. } => SweepKind::AssocStats,
            SweepConfig::OptimizeElevation { .. } => SweepKind::OptimizeElevation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    PowerRatio,
    Elevation,
    AssocStats,
    OptimizeElevation,
}

impl SweepKind {
    pub const ALL: [SweepKind; 4] =
        [SweepKind::PowerRatio, SweepKind::Elevation, SweepKind::AssocStats, SweepKind::OptimizeElevation];

    /// Name of the matching subcommand.
    pub fn command(self) -> &'static str {
        match self {
            SweepKind::PowerRatio => "power-sweep",
            SweepKind::Elevation => "elevation-sweep",
            SweepKind::AssocStats => "assoc-stats",
            SweepKind::OptimizeElevation => "optimize",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.command())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub weight_mode: WeightMode,
    pub network: NetworkParams,
    #[serde(default)]
    pub elevation: ElevationConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// 25 log-spaced ratios on `[0.1, 10]` plus the policy threshold 2.
pub fn default_power_ratios() -> Vec<f64> {
    let mut r: Vec<f64> = (0..25).map(|i| 10f64.powf(-1.0 + 2.0 * i as f64 / 24.0)).collect();
    r.push(2.0);
    r.sort_by(f64::total_cmp);
    r
}

/// `1°, 1.5°, …, 56°`.
pub fn default_elevation_angles() -> Vec<f64> {
    (0..=110).map(|i| 1.0 + 0.5 * i as f64).collect()
}

/// Smallest window radius giving `expected_interior` interior BSs.
pub fn window_radius_for(params: &NetworkParams, expected_interior: f64) -> f64 {
    (expected_interior / (std::f64::consts::PI * params.bs_density)).sqrt() / (1.0 - EDGE_BAND)
}

impl ExperimentConfig {
    /// Built-in preset for a subcommand, using the suburban network constants.
    pub fn preset(kind: SweepKind) -> Self {
        let network = NetworkParams::table1();
        let sim = SimConfig { seed: 24301, ..SimConfig::default() };
        let (mode, sweep, sim) = match kind {
            SweepKind::PowerRatio => (
                RunMode::Both,
                SweepConfig::PowerRatio { ratios: default_power_ratios(), irs_elements: vec![8, 16] },
                sim,
            ),
            SweepKind::Elevation => (
                RunMode::Analytic,
                SweepConfig::Elevation {
                    angles_deg: default_elevation_angles(),
                    irs_elements: vec![8, 16, 32],
                    p_near: 20.0,
                    p_far: 10.0,
                },
                SimConfig { trials: 20_000, ..sim },
            ),
            SweepKind::AssocStats => (
                RunMode::Both,
                SweepConfig::AssocStats {
                    window_radius: window_radius_for(&network, 200.0).ceil(),
                    max_count: 80,
                },
                SimConfig { trials: 500, ..sim },
            ),
            SweepKind::OptimizeElevation => (
                RunMode::Analytic,
                SweepConfig::OptimizeElevation {
                    irs_elements: vec![8, 16, 32],
                    p_near: 20.0,
                    p_far: 10.0,
                    grid_points: 181,
                    resolution_deg: 0.01,
                },
                sim,
            ),
        };
        ExperimentConfig {
            mode,
            weight_mode: WeightMode::Binomial,
            network,
            elevation: ElevationConfig::default(),
            sweep,
            sim,
            output: OutputConfig::default(),
        }
    }

    /// Parses and validates a TOML config.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML echo; parsing it back yields an equal config.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let at = |section: &str, e: Error| match e {
            Error::InvalidParameter { field, reason } => Error::Config(format!("{section}.{field}: {reason}")),
            Error::Domain(msg) => Error::Config(format!("{section}: {msg}")),
            other => other,
        };
        self.network.validate().map_err(|e| at("network", e))?;
        self.elevation.to_model().map_err(|e| at("elevation", e))?;
        if self.sim.seed > i64::MAX as u64 {
            return Err(Error::Config(format!("sim.seed: {} does not fit a TOML integer", self.sim.seed)));
        }
        if self.mode.montecarlo() {
            self.sim.validate().map_err(|e| at("sim", e))?;
            if !matches!(self.sweep, SweepConfig::AssocStats { .. }) {
                self.sim.check_truncation(&self.network).map_err(|e| at("sim", e))?;
            }
        }
        match &self.sweep {
            SweepConfig::PowerRatio { ratios, irs_elements } => {
                check_sorted("sweep.ratios", ratios, |r| r.is_finite() && r > 0.0, "> 0")?;
                check_elements(irs_elements)?;
            }
            SweepConfig::Elevation { angles_deg, irs_elements, p_near, p_far } => {
                check_sorted("sweep.angles_deg", angles_deg, |a| a > 0.0 && a < 90.0, "in (0, 90)")?;
                check_elements(irs_elements)?;
                self.check_split(*p_near, *p_far)?;
            }
            SweepConfig::AssocStats { window_radius, max_count } => {
                let interior = (1.0 - EDGE_BAND) * window_radius;
                let expected = self.network.bs_density * std::f64::consts::PI * interior * interior;
                if !(expected >= MIN_INTERIOR_BSS) {
                    return Err(Error::Config(format!(
                        "sweep.window_radius: {window_radius} m gives {expected:.1} expected interior BSs, need >= {MIN_INTERIOR_BSS} (try >= {:.0})",
                        window_radius_for(&self.network, MIN_INTERIOR_BSS).ceil()
                    )));
                }
                if *max_count < 1 {
                    return Err(Error::Config("sweep.max_count: must be >= 1".into()));
                }
            }
            SweepConfig::OptimizeElevation { irs_elements, p_near, p_far, grid_points, resolution_deg } => {
                check_elements(irs_elements)?;
                self.check_split(*p_near, *p_far)?;
                if *grid_points < 3 {
                    return Err(Error::Config("sweep.grid_points: must be >= 3".into()));
                }
                if !(resolution_deg.is_finite() && *resolution_deg > 0.0) {
                    return Err(Error::Config(format!("sweep.resolution_deg: must be > 0, got {resolution_deg}")));
                }
                if self.network.los_enhancement <= 1.0 {
                    return Err(Error::Config(
                        "network.los_enhancement: must exceed 1 for a non-empty elevation interval".into(),
                    ));
                }
                if self.mode == RunMode::Mc {
                    return Err(Error::Config("mode: optimize is analytic only".into()));
                }
            }
        }
        Ok(())
    }

    fn check_split(&self, p_near: f64, p_far: f64) -> Result<()> {
        crate::network::PowerSplit::new(p_near, p_far)
            .and_then(|s| s.check_against(&self.network))
            .map_err(|e| Error::Config(format!("sweep.p_near/p_far: {e}")))
    }
}

fn check_sorted(field: &str, values: &[f64], ok: impl Fn(f64) -> bool, expect: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{field}: must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !ok(**v)) {
        return Err(Error::Config(format!("{field}: value {v} must be {expect}")));
    }
    if let Some(w) = values.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!("{field}: must be strictly increasing ({} then {})", w[0], w[1])));
    }
    Ok(())
}

fn check_elements(values: &[u32]) -> Result<()> {
    let as_f64: Vec<f64> = values.iter().map(|&r| r as f64).collect();
    check_sorted("sweep.irs_elements", &as_f64, |r| r >= 1.0 && r <= MAX_IRS_ELEMENTS as f64, "in 1..=64")
}
