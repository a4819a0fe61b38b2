//! Subcommands behind the `uavloc` binary.
//!
//! Each subcommand writes one CSV table (the waypoint-count sweeps write one
//! per `M` when several are requested) and returns a one-line summary.
//! Numbers are printed with Rust's shortest round-trip formatting, which is
//! locale-independent.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use config::{
    parse_config, CoverageConfig, GridConfig, OptimizeConfig, RunConfig, ScenarioConfig,
    TrajectoryConfig,
};

use crate::coverage::{coverage_radius, localization_coverage};
use crate::error::Error;
use crate::experiment::{
    evaluate, optimize, sweep, Constraint, LinkMode, OptimizationOutcome, SweepAxis, SweepResult,
};
use crate::trajectory::Trajectory;

pub const POWER_HEADER: &str = "v_mps,induced_w,parasitic_w,blade_w,total_w";
pub const SWEEP_HEADER: &str =
    "swept_value,mean_pos_err_m,mean_range_err_m,energy_j,coverage_m2,covered_nodes";
pub const OPTIMIZE_HEADER: &str = "h_m,r_m,m_waypoints,t_h_s,mean_pos_err_m,energy_j,feasible";
pub const COVERAGE_HEADER: &str = "h_m,r_c_m,coverage_m2,covered_nodes";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    PowerCurve,
    SweepAltitude,
    SweepRadius,
    SweepHover,
    Coverage,
    Optimize,
    Evaluate,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::PowerCurve,
        Subcommand::SweepAltitude,
        Subcommand::SweepRadius,
        Subcommand::SweepHover,
        Subcommand::Coverage,
        Subcommand::Optimize,
        Subcommand::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::PowerCurve => "power-curve",
            Subcommand::SweepAltitude => "sweep-altitude",
            Subcommand::SweepRadius => "sweep-radius",
            Subcommand::SweepHover => "sweep-hover",
            Subcommand::Coverage => "coverage",
            Subcommand::Optimize => "optimize",
            Subcommand::Evaluate => "evaluate",
        }
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown subcommand `{s}`")))
    }
}

/// Command-line values that take precedence over the config document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    pub h_step: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_step: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub m_list: Option<Vec<usize>>,
    pub link_mode: Option<LinkMode>,
    pub budget: Option<f64>,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
}

impl Overrides {
    /// `config` with every set override applied, revalidated.
    pub fn apply(&self, config: &RunConfig) -> Result<RunConfig, Error> {
        let mut c = config.clone();
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.grid.h_min, self.h_min);
        set(&mut c.grid.h_max, self.h_max);
        set(&mut c.grid.h_step, self.h_step);
        set(&mut c.grid.r_min, self.r_min);
        set(&mut c.grid.r_max, self.r_max);
        set(&mut c.grid.r_step, self.r_step);
        c.grid.t_min = self.t_min.or(c.grid.t_min);
        c.grid.t_max = self.t_max.or(c.grid.t_max);
        c.grid.t_step = self.t_step.or(c.grid.t_step);
        if let Some(m) = &self.m_list {
            c.grid.m_list = Some(m.clone());
        }
        if let Some(seed) = self.seed {
            c.scenario.seed = seed;
        }
        if let Some(t) = self.trials {
            c.scenario.n_trials = t;
        }
        if let Some(mode) = self.link_mode {
            c.scenario.link_mode = mode;
        }
        c.optimize.budget_j = self.budget.or(c.optimize.budget_j);
        if let Some(out) = &self.out {
            c.output_path = Some(out.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no feasible design in the grid\n{0}")]
    Infeasible(String),
}

impl CliError {
    /// 1 for configuration and model errors, 3 for I/O, 4 for an infeasible
    /// optimization.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(_) => 1,
            CliError::Io { .. } => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Runs `cmd` with `overrides` applied to `config`, writing its CSV output.
pub fn run_subcommand(
    cmd: Subcommand,
    config: &RunConfig,
    overrides: &Overrides,
) -> Result<Report, CliError> {
    let config = overrides.apply(config)?;
    #[cfg(feature = "parallel")]
    if let Some(n) = overrides.workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
        return pool.install(|| dispatch(cmd, &config));
    }
    dispatch(cmd, &config)
}

fn dispatch(cmd: Subcommand, config: &RunConfig) -> Result<Report, CliError> {
    let out = config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cmd.name())));
    match cmd {
        Subcommand::PowerCurve => {
            let (csv, summary) = power_curve_table(config)?;
            write(&out, &csv)?;
            Ok(Report {
                files: vec![out],
                summary,
            })
        }
        Subcommand::SweepAltitude => {
            run_sweep(SweepAxis::Altitude, config.grid.altitudes()?, config, &out)
        }
        Subcommand::SweepRadius => run_sweep(SweepAxis::Radius, config.grid.radii()?, config, &out),
        Subcommand::SweepHover => run_sweep(
            SweepAxis::HoverTime,
            config.grid.hover_times()?,
            config,
            &out,
        ),
        Subcommand::Coverage => {
            let (csv, summary) = coverage_table(config)?;
            write(&out, &csv)?;
            Ok(Report {
                files: vec![out],
                summary,
            })
        }
        Subcommand::Evaluate => {
            let traj = config.trajectory()?;
            let mut row = evaluate(&traj, &config.scenario(), &config.channel, &config.airframe)?;
            row.swept_value = traj.altitude;
            write(&out, &sweep_csv(std::slice::from_ref(&row)))?;
            let summary = format!(
                "mean position error {:.3} m (range-vector {:.3} m), energy {:.1} J, coverage {:.1} m^2, {}/{} nodes covered",
                row.mean_error, row.mean_range_error, row.mission_energy, row.coverage_area, row.covered_nodes, row.n_nodes
            );
            Ok(Report {
                files: vec![out],
                summary,
            })
        }
        Subcommand::Optimize => run_optimize(config, &out),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Power decomposition over the speed grid, plus its summary.
pub fn power_curve_table(config: &RunConfig) -> Result<(String, String), Error> {
    let a = &config.airframe;
    let mut csv = format!("{POWER_HEADER}\n");
    for v in config.grid.speeds()? {
        let p = a.power_breakdown(v);
        writeln!(
            csv,
            "{v},{},{},{},{}",
            p.induced,
            p.parasitic,
            p.blade_profile,
            p.total()
        )
        .unwrap();
    }
    let v_star = a.optimal_cruise_speed();
    let summary = format!(
        "minimum power {:.1} W at v = {:.3} m/s; hover {:.1} W",
        a.forward_flight_power(v_star),
        v_star,
        a.hover_power()
    );
    Ok((csv, summary))
}

pub fn sweep_csv(rows: &[SweepResult]) -> String {
    let mut csv = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.swept_value,
            r.mean_error,
            r.mean_range_error,
            r.mission_energy,
            r.coverage_area,
            r.covered_nodes
        )
        .unwrap();
    }
    csv
}

/// `sweep.csv` becomes `sweep_m4.csv`.
fn suffixed(path: &Path, m: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_m{m}.{}", ext.to_string_lossy()),
        None => format!("{stem}_m{m}"),
    };
    path.with_file_name(name)
}

fn run_sweep(
    axis: SweepAxis,
    grid: Vec<f64>,
    config: &RunConfig,
    out: &Path,
) -> Result<Report, CliError> {
    let base = config.trajectory()?;
    let list = config.grid.waypoints(base.n_waypoints)?;
    let scenario = config.scenario();
    let mut files = Vec::new();
    let mut parts = Vec::new();
    for &m in &list {
        let traj = Trajectory {
            n_waypoints: m,
            ..base.clone()
        };
        let rows = sweep(
            axis,
            &grid,
            &traj,
            &scenario,
            &config.channel,
            &config.airframe,
        )?;
        let path = if list.len() == 1 {
            out.to_owned()
        } else {
            suffixed(out, m)
        };
        write(&path, &sweep_csv(&rows))?;
        files.push(path);
        let best = rows
            .iter()
            .min_by(|a, b| a.mean_error.total_cmp(&b.mean_error))
            .expect("nonempty grid");
        parts.push(format!(
            "M={m}: min mean position error {:.3} m at {} = {}, energy {:.1} J",
            best.mean_error,
            axis_name(axis),
            best.swept_value,
            best.mission_energy
        ));
    }
    Ok(Report {
        files,
        summary: parts.join("; "),
    })
}

fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Altitude => "h",
        SweepAxis::Radius => "R",
        SweepAxis::HoverTime => "t_h",
        SweepAxis::Waypoints => "M",
    }
}

/// Coverage radius, intersection area and covered nodes over the altitude grid.
pub fn coverage_table(config: &RunConfig) -> Result<(String, String), Error> {
    let base = config.trajectory()?;
    let spec = config.coverage_spec();
    let nodes = config.scenario().population(0);
    let mut csv = format!("{COVERAGE_HEADER}\n");
    let mut min: Option<(f64, f64)> = None;
    for h in config.grid.altitudes()? {
        let traj = Trajectory {
            altitude: h,
            ..base.clone()
        };
        let rc = coverage_radius(h, &spec, &config.channel)?;
        let cov = localization_coverage(&traj, &spec, &config.channel)?;
        let covered = nodes.iter().filter(|n| cov.covers(**n)).count();
        writeln!(csv, "{h},{},{},{covered}", rc.radius, cov.area).unwrap();
        if min.is_none_or(|(_, a)| cov.area < a) {
            min = Some((h, cov.area));
        }
    }
    let (h, area) = min.expect("nonempty grid");
    Ok((
        csv,
        format!("minimum localization coverage {area:.1} m^2 at h = {h}"),
    ))
}

pub fn optimize_csv(outcome: &OptimizationOutcome) -> String {
    let mut csv = format!("{OPTIMIZE_HEADER}\n");
    for c in &outcome.candidates {
        let d = &c.design;
        let err = c
            .result
            .as_ref()
            .map(|r| r.mean_error.to_string())
            .unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{err},{},{}",
            d.altitude,
            d.radius,
            d.n_waypoints,
            d.hover_time,
            c.mission_energy,
            c.feasible()
        )
        .unwrap();
    }
    csv
}

fn run_optimize(config: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let budget = config
        .optimize
        .budget_j
        .ok_or_else(|| Error::Config("[optimize] missing `budget_j` (or pass --budget)".into()))?;
    let outcome = optimize(
        budget,
        &config.design_grid()?,
        &config.trajectory()?,
        &config.scenario(),
        &config.channel,
        &config.airframe,
    )?;
    write(out, &optimize_csv(&outcome))?;
    match outcome.best() {
        Some(best) => {
            let d = &best.design;
            let err = best
                .result
                .as_ref()
                .expect("feasible points are evaluated")
                .mean_error;
            Ok(Report {
                files: vec![out.to_owned()],
                summary: format!(
                    "best: h = {} m, R = {} m, M = {}, t_h = {} s; mean position error {err:.3} m, energy {:.1} J",
                    d.altitude, d.radius, d.n_waypoints, d.hover_time, best.mission_energy
                ),
            })
        }
        None => {
            let mut lines = String::new();
            for c in &outcome.candidates {
                let d = &c.design;
                let why: Vec<&str> = c
                    .violated
                    .iter()
                    .map(|v| match v {
                        Constraint::EnergyBudget => "energy budget",
                        Constraint::FullCoverage => "full coverage",
                    })
                    .collect();
                writeln!(
                    lines,
                    "h = {}, R = {}, M = {}, t_h = {}: violates {}",
                    d.altitude,
                    d.radius,
                    d.n_waypoints,
                    d.hover_time,
                    why.join(" and ")
                )
                .unwrap();
            }
            Err(CliError::Infeasible(lines.trim_end().to_owned()))
        }
    }
}
