//! TOML run configuration.
//!
//! Every section and key is optional; missing values take the reference
//! defaults. Unknown keys are rejected.

use std::path::PathBuf;

use serde::Deserialize;

use crate::channel::ChannelParams;
use crate::coverage::CoverageSpec;
use crate::energy::AirframeParams;
use crate::error::{ensure, Error, Result};
use crate::experiment::{DesignGrid, ErrorPopulation, EstimatorMode, LinkMode, Scenario};
use crate::trajectory::{Trajectory, DEFAULT_CRUISE_SPEED};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub radius: f64,
    pub altitude: f64,
    pub n_waypoints: usize,
    pub hover_time: f64,
    pub cruise_speed: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            radius: 120.0,
            altitude: 200.0,
            n_waypoints: 3,
            hover_time: 5.0,
            cruise_speed: DEFAULT_CRUISE_SPEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub area_radius: f64,
    pub n_nodes: usize,
    pub sample_rate: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub link_mode: LinkMode,
    pub estimator: EstimatorMode,
    pub resample_population: bool,
    pub error_population: ErrorPopulation,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let s = Scenario::default();
        Self {
            area_radius: s.area_radius,
            n_nodes: s.n_nodes,
            sample_rate: s.sample_rate,
            n_trials: s.n_trials,
            seed: s.seed,
            link_mode: s.link_mode,
            estimator: s.estimator,
            resample_population: s.resample_population,
            error_population: s.error_population,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageConfig {
    pub delta: f64,
    pub resolution: Option<f64>,
    pub n_samples: usize,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        let c = CoverageSpec::default();
        Self {
            delta: c.delta,
            resolution: c.resolution,
            n_samples: c.n_samples,
        }
    }
}

/// Grids for the sweeps, the coverage table, the power curve and the
/// optimizer.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub h_step: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    /// Hover-time grid; the optimizer uses only the trajectory's hover time
    /// unless this is set.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    /// Waypoint counts; defaults to the trajectory's.
    pub m_list: Option<Vec<usize>>,
    pub v_max: f64,
    pub v_step: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            h_min: 50.0,
            h_max: 2000.0,
            h_step: 50.0,
            r_min: 50.0,
            r_max: 300.0,
            r_step: 10.0,
            t_min: None,
            t_max: None,
            t_step: None,
            m_list: None,
            v_max: 30.0,
            v_step: 0.5,
        }
    }
}

const HOVER_GRID: (f64, f64, f64) = (5.0, 100.0, 5.0);

impl GridConfig {
    pub fn altitudes(&self) -> Result<Vec<f64>> {
        inclusive_range("h", self.h_min, self.h_max, self.h_step)
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        inclusive_range("r", self.r_min, self.r_max, self.r_step)
    }

    pub fn speeds(&self) -> Result<Vec<f64>> {
        inclusive_range("v", 0.0, self.v_max, self.v_step)
    }

    fn hover_set(&self) -> bool {
        self.t_min.is_some() || self.t_max.is_some() || self.t_step.is_some()
    }

    pub fn hover_times(&self) -> Result<Vec<f64>> {
        inclusive_range(
            "t",
            self.t_min.unwrap_or(HOVER_GRID.0),
            self.t_max.unwrap_or(HOVER_GRID.1),
            self.t_step.unwrap_or(HOVER_GRID.2),
        )
    }

    pub fn waypoints(&self, fallback: usize) -> Result<Vec<usize>> {
        let list = self.m_list.clone().unwrap_or_else(|| vec![fallback]);
        if list.is_empty() {
            return Err(Error::EmptyGrid("m_list"));
        }
        for &m in &list {
            ensure(m >= 3, "m_list", "entries >= 3", m as f64)?;
        }
        Ok(list)
    }
}

/// `min, min + step, ...` up to `max` inclusive (with a 1e-9 relative slack).
fn inclusive_range(axis: &'static str, min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    let names = match axis {
        "h" => ("h_min", "h_step"),
        "r" => ("r_min", "r_step"),
        "t" => ("t_min", "t_step"),
        _ => ("v_max", "v_step"),
    };
    ensure(step > 0.0 && step.is_finite(), names.1, "> 0", step)?;
    ensure(
        min.is_finite() && max >= min,
        names.0,
        "finite and <= the matching max",
        min,
    )?;
    let n = ((max - min) / step * (1.0 + 1e-9)).floor() as usize + 1;
    Ok((0..n).map(|k| min + k as f64 * step).collect())
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Mission energy budget, J.
    pub budget_j: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelParams,
    pub airframe: AirframeParams,
    pub trajectory: TrajectoryConfig,
    pub scenario: ScenarioConfig,
    pub coverage: CoverageConfig,
    pub grid: GridConfig,
    pub optimize: OptimizeConfig,
    pub output_path: Option<PathBuf>,
}

/// Parses and validates a config document.
///
/// Syntax errors and unknown keys come from the TOML layer with the offending
/// key; range errors are prefixed with their section.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
    config.validate()?;
    Ok(config)
}

fn in_section<T>(section: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("[{section}] {e}")))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        in_section("channel", self.channel.validate())?;
        in_section("airframe", self.airframe.validate())?;
        in_section("trajectory", self.trajectory().map(|_| ()))?;
        in_section("scenario", self.scenario().validate())?;
        in_section("coverage", self.coverage_spec().validate())?;
        in_section("grid", self.grid_check())?;
        if let Some(b) = self.optimize.budget_j {
            in_section("optimize", ensure(b > 0.0, "budget_j", "> 0", b))?;
        }
        Ok(())
    }

    fn grid_check(&self) -> Result<()> {
        self.grid.altitudes()?;
        self.grid.radii()?;
        self.grid.speeds()?;
        self.grid.hover_times()?;
        self.grid.waypoints(self.trajectory.n_waypoints)?;
        Ok(())
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        let t = &self.trajectory;
        Trajectory::circular(t.radius, t.altitude, t.n_waypoints, t.hover_time)?
            .with_cruise_speed(t.cruise_speed)
    }

    pub fn coverage_spec(&self) -> CoverageSpec {
        CoverageSpec {
            delta: self.coverage.delta,
            resolution: self.coverage.resolution,
            n_samples: self.coverage.n_samples,
        }
    }

    pub fn scenario(&self) -> Scenario {
        let s = &self.scenario;
        Scenario {
            area_radius: s.area_radius,
            n_nodes: s.n_nodes,
            sample_rate: s.sample_rate,
            n_trials: s.n_trials,
            seed: s.seed,
            link_mode: s.link_mode,
            estimator: s.estimator,
            resample_population: s.resample_population,
            error_population: s.error_population,
            coverage: self.coverage_spec(),
        }
    }

    /// Grid searched by the optimizer.
    pub fn design_grid(&self) -> Result<DesignGrid> {
        Ok(DesignGrid {
            altitudes: self.grid.altitudes()?,
            radii: self.grid.radii()?,
            waypoints: self.grid.waypoints(self.trajectory.n_waypoints)?,
            hover_times: if self.grid.hover_set() {
                self.grid.hover_times()?
            } else {
                vec![self.trajectory.hover_time]
            },
        })
    }
}
