//! Monte-Carlo evaluation, parameter sweeps and the grid optimizer.
//!
//! A run places `N` nodes uniformly in a disk, flies the trajectory once per
//! trial with fresh shadowing, and averages position and range-vector errors
//! over nodes and trials. Trials run in parallel under the `parallel` feature;
//! per-trial partial sums are reduced in trial order, so results do not depend
//! on the worker count.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, LinkClass, LinkGeometry};
use crate::coverage::{localization_coverage, CoverageResult, CoverageSpec};
use crate::energy::AirframeParams;
use crate::error::{ensure, Error, Result};
use crate::estimation::{
    estimate_distance, multilaterate, position_error, range_error, AnchorRange, RangeObservation,
};
use crate::geometry::Point2;
use crate::rng::{population_rng, trial_rng, SimRng};
use crate::trajectory::{HoverTime, Trajectory};

/// How the class of each UAV-node link is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkMode {
    /// Each link is LoS with probability `P_LoS(theta)`.
    Bernoulli,
    ConditionedLos,
    ConditionedNlos,
    /// Both classes are simulated on common draws and the per-node errors
    /// mixed with the node's mean `P_LoS` over its links.
    #[default]
    Averaged,
}

/// Which excess-loss mean the range estimator assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// The true class of each link.
    #[default]
    Genie,
    /// Always LoS.
    Blind,
}

/// Nodes whose errors enter the reported means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorPopulation {
    #[default]
    AllNodes,
    /// Only nodes inside the localization coverage; falls back to all nodes
    /// (and sets `SweepResult::coverage_empty`) when none are covered.
    Covered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Radius of the disk holding the nodes, m.
    pub area_radius: f64,
    pub n_nodes: usize,
    /// RSS samples per second of hover.
    pub sample_rate: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub link_mode: LinkMode,
    pub estimator: EstimatorMode,
    /// Draw a new population every trial instead of reusing trial 0's.
    pub resample_population: bool,
    pub error_population: ErrorPopulation,
    pub coverage: CoverageSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            area_radius: 200.0,
            n_nodes: 100,
            sample_rate: 2.0,
            n_trials: 1000,
            seed: 42,
            link_mode: LinkMode::default(),
            estimator: EstimatorMode::default(),
            resample_population: false,
            error_population: ErrorPopulation::default(),
            coverage: CoverageSpec::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.area_radius >= 0.0,
            "area_radius",
            ">= 0",
            self.area_radius,
        )?;
        ensure(self.n_nodes >= 1, "n_nodes", ">= 1", self.n_nodes as f64)?;
        ensure(self.n_trials >= 1, "n_trials", ">= 1", self.n_trials as f64)?;
        ensure(
            self.sample_rate > 0.0 && self.sample_rate.is_finite(),
            "sample_rate",
            "> 0",
            self.sample_rate,
        )?;
        self.coverage.validate()
    }

    /// `max(1, floor(rate * t_h))`: a zero hover still yields one sample.
    pub fn samples_for(&self, hover_time: f64) -> usize {
        ((self.sample_rate * hover_time).floor() as usize).max(1)
    }

    /// The population evaluated in `trial`.
    pub fn population(&self, trial: u64) -> Vec<Point2> {
        let stream = if self.resample_population { trial } else { 0 };
        let mut rng = population_rng(self.seed, stream);
        uniform_disk(&mut rng, self.n_nodes, self.area_radius)
    }
}

/// `n` points uniform in the disk of radius `radius` about the origin.
pub fn uniform_disk<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<Point2> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let phi: f64 = rng.random::<f64>() * 2.0 * PI;
            Point2::from_polar(radius * u.sqrt(), phi)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub swept_value: f64,
    /// Mean node position error, m.
    pub mean_error: f64,
    /// Mean range-vector error norm, m.
    pub mean_range_error: f64,
    pub mission_energy: f64,
    pub coverage_area: f64,
    /// Nodes of the trial-0 population inside the coverage region.
    pub covered_nodes: usize,
    pub n_nodes: usize,
    /// Standard error of `mean_error` across trials.
    pub mean_error_sem: f64,
    pub mean_range_error_sem: f64,
    pub coverage_empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub altitude: f64,
    pub radius: f64,
    pub n_waypoints: usize,
    pub hover_time: f64,
}

impl DesignPoint {
    /// Applies the design to `template`, keeping its center, phase and speed.
    pub fn apply(&self, template: &Trajectory) -> Result<Trajectory> {
        let traj = Trajectory {
            altitude: self.altitude,
            radius: self.radius,
            n_waypoints: self.n_waypoints,
            hover: HoverTime::Uniform(self.hover_time),
            ..template.clone()
        };
        traj.validate()?;
        Ok(traj)
    }

    /// The design of a uniform-hover trajectory.
    pub fn of(traj: &Trajectory) -> Self {
        Self {
            altitude: traj.altitude,
            radius: traj.radius,
            n_waypoints: traj.n_waypoints,
            hover_time: traj.hover_time(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Altitude,
    Radius,
    HoverTime,
    Waypoints,
}

impl SweepAxis {
    pub fn apply(self, base: &DesignPoint, value: f64) -> Result<DesignPoint> {
        let mut p = *base;
        match self {
            SweepAxis::Altitude => p.altitude = value,
            SweepAxis::Radius => p.radius = value,
            SweepAxis::HoverTime => p.hover_time = value,
            SweepAxis::Waypoints => {
                ensure(
                    value >= 3.0 && value.fract() == 0.0,
                    "n_waypoints",
                    "an integer >= 3",
                    value,
                )?;
                p.n_waypoints = value as usize;
            }
        }
        Ok(p)
    }
}

/// Per-trial sums; reduced in trial order.
#[derive(Debug, Clone, Copy, Default)]
struct TrialSums {
    position: f64,
    range: f64,
    count: usize,
}

/// Fixed inputs shared by every node of a trial.
struct Flight<'a> {
    traj: &'a Trajectory,
    anchors: Vec<Point2>,
    scenario: &'a Scenario,
    params: &'a ChannelParams,
}

impl Flight<'_> {
    /// Position and range-vector error of one node under one link class
    /// assignment.
    fn node_errors(
        &self,
        node: Point2,
        links: &[LinkGeometry],
        classes: &[LinkClass],
        normals: &[f64],
    ) -> Result<(f64, f64)> {
        let Flight {
            traj,
            anchors,
            scenario,
            params,
        } = self;
        let m = traj.n_waypoints;
        let mut fixes = Vec::with_capacity(m);
        let mut r_true = Vec::with_capacity(m);
        let mut r_hat = Vec::with_capacity(m);
        for i in 0..m {
            let n = scenario.samples_for(traj.hover_time(i));
            let rss = params.averaged_rss(&links[i], classes[i], n, normals[i]);
            let assumed_class = match scenario.estimator {
                EstimatorMode::Genie => classes[i],
                EstimatorMode::Blind => LinkClass::Los,
            };
            let obs = RangeObservation {
                waypoint_index: i,
                anchor: anchors[i],
                rss_avg: rss,
                assumed_class,
                n_samples: n,
            };
            let est = estimate_distance(&obs, traj.altitude, params);
            fixes.push(AnchorRange {
                anchor: anchors[i],
                range: est.horizontal,
            });
            r_true.push(links[i].horizontal);
            r_hat.push(est.horizontal);
        }
        let fix = multilaterate(&fixes, None)?;
        Ok((position_error(node, &fix), range_error(&r_true, &r_hat)?))
    }
}

fn run_trial(
    trial: u64,
    traj: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
    coverage: &CoverageResult,
) -> Result<TrialSums> {
    let nodes = scenario.population(trial);
    let mut rng: SimRng = trial_rng(scenario.seed, trial);
    let m = traj.n_waypoints;
    let flight = Flight {
        traj,
        anchors: traj.anchors(),
        scenario,
        params,
    };
    let restrict = scenario.error_population == ErrorPopulation::Covered
        && nodes.iter().any(|n| coverage.covers(*n));

    let mut sums = TrialSums::default();
    let mut links = Vec::with_capacity(m);
    let mut uniforms = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    for node in nodes {
        links.clear();
        uniforms.clear();
        normals.clear();
        // Every mode consumes the same draws, so modes share random numbers.
        for anchor in &flight.anchors {
            links.push(LinkGeometry::new(anchor.distance(&node), traj.altitude)?);
            uniforms.push(rng.random::<f64>());
            normals.push(rng.sample::<f64, _>(StandardNormal));
        }
        if restrict && !coverage.covers(node) {
            continue;
        }
        let forced = |class| vec![class; m];
        let (pos, range) = match scenario.link_mode {
            LinkMode::Bernoulli => {
                let classes: Vec<LinkClass> = links
                    .iter()
                    .zip(&uniforms)
                    .map(|(l, &u)| {
                        if u < params.p_los_unchecked(l.elevation) {
                            LinkClass::Los
                        } else {
                            LinkClass::Nlos
                        }
                    })
                    .collect();
                flight.node_errors(node, &links, &classes, &normals)?
            }
            LinkMode::ConditionedLos => {
                flight.node_errors(node, &links, &forced(LinkClass::Los), &normals)?
            }
            LinkMode::ConditionedNlos => {
                flight.node_errors(node, &links, &forced(LinkClass::Nlos), &normals)?
            }
            LinkMode::Averaged => {
                let (pl, rl) =
                    flight.node_errors(node, &links, &forced(LinkClass::Los), &normals)?;
                let (pn, rn) =
                    flight.node_errors(node, &links, &forced(LinkClass::Nlos), &normals)?;
                let p = links
                    .iter()
                    .map(|l| params.p_los_unchecked(l.elevation))
                    .sum::<f64>()
                    / m as f64;
                (p * pl + (1.0 - p) * pn, p * rl + (1.0 - p) * rn)
            }
        };
        sums.position += pos;
        sums.range += range;
        sums.count += 1;
    }
    Ok(sums)
}

fn run_trials(
    traj: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
    coverage: &CoverageResult,
) -> Result<Vec<TrialSums>> {
    let one = |k: usize| run_trial(k as u64, traj, scenario, params, coverage);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..scenario.n_trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..scenario.n_trials).map(one).collect()
    }
}

/// Mean over all node evaluations and the standard error of the per-trial
/// means.
fn pooled(trials: &[TrialSums], pick: impl Fn(&TrialSums) -> f64) -> (f64, f64) {
    let total: f64 = trials.iter().map(&pick).sum();
    let count: usize = trials.iter().map(|t| t.count).sum();
    let mean = total / count as f64;
    let t = trials.len();
    if t < 2 {
        return (mean, 0.0);
    }
    let means: Vec<f64> = trials.iter().map(|s| pick(s) / s.count as f64).collect();
    let m = means.iter().sum::<f64>() / t as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (t - 1) as f64;
    (mean, (var / t as f64).sqrt())
}

/// Runs the Monte-Carlo experiment for one trajectory.
///
/// `swept_value` is left at 0; `sweep` fills it in.
pub fn evaluate(
    traj: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
    airframe: &AirframeParams,
) -> Result<SweepResult> {
    traj.validate()?;
    scenario.validate()?;
    airframe.validate()?;
    let coverage = coverage_for(traj, scenario, params)?;
    let covered_nodes = count_covered(&coverage, &scenario.population(0));

    let trials = run_trials(traj, scenario, params, &coverage)?;
    let (mean_error, mean_error_sem) = pooled(&trials, |t| t.position);
    let (mean_range_error, mean_range_error_sem) = pooled(&trials, |t| t.range);
    if covered_nodes == 0 {
        log::warn!(
            "no node lies inside the localization coverage at h = {}",
            traj.altitude
        );
    }
    Ok(SweepResult {
        swept_value: 0.0,
        mean_error,
        mean_range_error,
        mission_energy: traj.mission_energy(airframe),
        coverage_area: coverage.area,
        covered_nodes,
        n_nodes: scenario.n_nodes,
        mean_error_sem,
        mean_range_error_sem,
        coverage_empty: covered_nodes == 0,
    })
}

/// Coverage computed with the scenario's spec. Shadowing-free channels have no
/// finite CRLB ratio, so the coverage is taken as the whole node disk.
fn coverage_for(
    traj: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
) -> Result<CoverageResult> {
    if params.los_sigma_scale == 0.0 && params.nlos_sigma_scale == 0.0 {
        let centers = traj.anchors();
        let reach = scenario.area_radius + traj.radius + traj.center.norm();
        return Ok(CoverageResult {
            per_waypoint_radius: vec![reach; centers.len()],
            area: PI * scenario.area_radius * scenario.area_radius,
            method: crate::coverage::CoverageMethod::Numeric,
            unbounded: true,
            centers,
        });
    }
    localization_coverage(traj, &scenario.coverage, params)
}

fn count_covered(coverage: &CoverageResult, nodes: &[Point2]) -> usize {
    nodes.iter().filter(|n| coverage.covers(**n)).count()
}

/// Evaluates `base` with `axis` replaced by each grid value, in grid order.
pub fn sweep(
    axis: SweepAxis,
    grid: &[f64],
    base: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
    airframe: &AirframeParams,
) -> Result<Vec<SweepResult>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid("sweep"));
    }
    let design = DesignPoint::of(base);
    grid.iter()
        .map(|&v| {
            let traj = axis.apply(&design, v)?.apply(base)?;
            let mut row = evaluate(&traj, scenario, params, airframe)?;
            row.swept_value = v;
            Ok(row)
        })
        .collect()
}

/// Candidate values for each design variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrid {
    pub altitudes: Vec<f64>,
    pub radii: Vec<f64>,
    pub waypoints: Vec<usize>,
    pub hover_times: Vec<f64>,
}

impl DesignGrid {
    /// Cartesian product, altitude outermost.
    pub fn points(&self) -> Vec<DesignPoint> {
        let mut out = Vec::new();
        for &altitude in &self.altitudes {
            for &radius in &self.radii {
                for &n_waypoints in &self.waypoints {
                    for &hover_time in &self.hover_times {
                        out.push(DesignPoint {
                            altitude,
                            radius,
                            n_waypoints,
                            hover_time,
                        });
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("altitudes", self.altitudes.is_empty()),
            ("radii", self.radii.is_empty()),
            ("waypoints", self.waypoints.is_empty()),
            ("hover_times", self.hover_times.is_empty()),
        ] {
            if empty {
                return Err(Error::EmptyGrid(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    EnergyBudget,
    /// Some node lies outside the localization coverage.
    FullCoverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub design: DesignPoint,
    pub mission_energy: f64,
    pub covered_nodes: usize,
    /// Constraints this point violates; empty when feasible.
    pub violated: Vec<Constraint>,
    /// Monte-Carlo result, present for feasible points only.
    pub result: Option<SweepResult>,
}

impl Candidate {
    pub fn feasible(&self) -> bool {
        self.violated.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationOutcome {
    /// Index into `candidates` of the chosen design.
    pub best: Option<usize>,
    pub candidates: Vec<Candidate>,
}

impl OptimizationOutcome {
    pub fn best(&self) -> Option<&Candidate> {
        self.best.map(|i| &self.candidates[i])
    }
}

/// Exhaustive search for the design with the lowest mean position error
/// subject to `mission_energy <= budget` and every node being covered.
///
/// Ties go to lower energy, then lower altitude. Only feasible points are
/// simulated.
pub fn optimize(
    budget: f64,
    grid: &DesignGrid,
    template: &Trajectory,
    scenario: &Scenario,
    params: &ChannelParams,
    airframe: &AirframeParams,
) -> Result<OptimizationOutcome> {
    ensure(budget > 0.0, "budget_j", "> 0", budget)?;
    grid.validate()?;
    scenario.validate()?;
    let nodes = scenario.population(0);

    let mut candidates = Vec::new();
    for design in grid.points() {
        let traj = design.apply(template)?;
        let energy = traj.mission_energy(airframe);
        let coverage = coverage_for(&traj, scenario, params)?;
        let covered = count_covered(&coverage, &nodes);
        let mut violated = Vec::new();
        if energy > budget {
            violated.push(Constraint::EnergyBudget);
        }
        if covered < scenario.n_nodes {
            violated.push(Constraint::FullCoverage);
        }
        let result = if violated.is_empty() {
            Some(evaluate(&traj, scenario, params, airframe)?)
        } else {
            None
        };
        candidates.push(Candidate {
            design,
            mission_energy: energy,
            covered_nodes: covered,
            violated,
            result,
        });
    }

    let key = |c: &Candidate| {
        let r = c.result.as_ref().map_or(f64::INFINITY, |r| r.mean_error);
        (r, c.mission_energy, c.design.altitude)
    };
    let best = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.feasible())
        .min_by(|(_, a), (_, b)| key(a).partial_cmp(&key(b)).expect("finite metrics"))
        .map(|(i, _)| i);
    Ok(OptimizationOutcome { best, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> Scenario {
        Scenario {
            n_trials: trials,
            n_nodes: 30,
            ..Scenario::default()
        }
    }

    fn baseline() -> Trajectory {
        Trajectory::circular(120.0, 200.0, 3, 5.0).unwrap()
    }

    #[test]
    fn samples_per_hover() {
        let s = Scenario::default();
        assert_eq!(s.samples_for(5.0), 10);
        assert_eq!(s.samples_for(2.7), 5);
        assert_eq!(s.samples_for(0.0), 1);
    }

    #[test]
    fn population_inside_disk_and_fixed() {
        let s = Scenario::default();
        let a = s.population(0);
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|p| p.norm() <= 200.0));
        assert_eq!(a, s.population(7));
        let r = Scenario {
            resample_population: true,
            ..s
        };
        assert_eq!(a, r.population(0));
        assert_ne!(a, r.population(7));
    }

    #[test]
    fn noiseless_errors_vanish() {
        let params = ChannelParams::default().without_shadowing();
        for mode in [LinkMode::Bernoulli, LinkMode::Averaged] {
            let s = Scenario {
                link_mode: mode,
                ..quick(3)
            };
            let r = evaluate(&baseline(), &s, &params, &AirframeParams::default()).unwrap();
            assert!(r.mean_error < 1e-3, "{mode:?}: {}", r.mean_error);
            assert!(r.mean_range_error < 1e-6);
            assert_eq!(r.covered_nodes, 30);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let s = quick(20);
        let r1 = evaluate(&baseline(), &s, &p, &a).unwrap();
        let r2 = evaluate(&baseline(), &s, &p, &a).unwrap();
        assert_eq!(r1, r2);
        let other = evaluate(&baseline(), &Scenario { seed: 7, ..s }, &p, &a).unwrap();
        assert_ne!(r1.mean_error, other.mean_error);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn worker_count_irrelevant() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let s = quick(40);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| evaluate(&baseline(), &s, &p, &a).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn los_beats_nlos() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let los = evaluate(
            &baseline(),
            &Scenario {
                link_mode: LinkMode::ConditionedLos,
                ..quick(50)
            },
            &p,
            &a,
        )
        .unwrap();
        let nlos = evaluate(
            &baseline(),
            &Scenario {
                link_mode: LinkMode::ConditionedNlos,
                ..quick(50)
            },
            &p,
            &a,
        )
        .unwrap();
        assert!(
            los.mean_error < nlos.mean_error,
            "{} vs {}",
            los.mean_error,
            nlos.mean_error
        );
    }

    #[test]
    fn averaged_lies_between_classes() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let at = |mode| {
            evaluate(
                &baseline(),
                &Scenario {
                    link_mode: mode,
                    ..quick(20)
                },
                &p,
                &a,
            )
            .unwrap()
            .mean_error
        };
        let (l, n, avg) = (
            at(LinkMode::ConditionedLos),
            at(LinkMode::ConditionedNlos),
            at(LinkMode::Averaged),
        );
        assert!(l <= avg && avg <= n, "{l} {avg} {n}");
    }

    #[test]
    fn energy_is_mission_energy() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let t = baseline();
        let r = evaluate(&t, &quick(2), &p, &a).unwrap();
        assert_eq!(r.mission_energy, t.mission_energy(&a));
    }

    #[test]
    fn covered_nodes_shrink_with_delta() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let mut last = usize::MAX;
        for delta in [20.0, 5.0, 2.0, 1.5, 1.1, 1.0] {
            let mut s = quick(1);
            s.coverage.delta = delta;
            let r = evaluate(&baseline(), &s, &p, &a).unwrap();
            assert!(r.covered_nodes <= last);
            last = r.covered_nodes;
        }
    }

    #[test]
    fn covered_population_falls_back() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let mut s = quick(3);
        s.error_population = ErrorPopulation::Covered;
        s.coverage.delta = 1e-6;
        let r = evaluate(&baseline(), &s, &p, &a).unwrap();
        assert!(r.coverage_empty);
        assert_eq!(r.covered_nodes, 0);
        let all = evaluate(
            &baseline(),
            &Scenario {
                error_population: ErrorPopulation::AllNodes,
                ..s
            },
            &p,
            &a,
        )
        .unwrap();
        assert_eq!(r.mean_error, all.mean_error);
    }

    #[test]
    fn sweep_fills_swept_value() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let rows = sweep(
            SweepAxis::Waypoints,
            &[3.0, 4.0],
            &baseline(),
            &quick(2),
            &p,
            &a,
        )
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.swept_value).collect::<Vec<_>>(),
            [3.0, 4.0]
        );
        assert!(rows[1].mission_energy != rows[0].mission_energy);
        assert!(sweep(SweepAxis::Waypoints, &[3.5], &baseline(), &quick(2), &p, &a).is_err());
        assert!(matches!(
            sweep(SweepAxis::Altitude, &[], &baseline(), &quick(2), &p, &a),
            Err(Error::EmptyGrid(_))
        ));
    }

    fn grid() -> DesignGrid {
        DesignGrid {
            altitudes: vec![200.0, 400.0],
            radii: vec![60.0, 120.0],
            waypoints: vec![3],
            hover_times: vec![5.0],
        }
    }

    #[test]
    fn optimize_infeasible_budget() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let out = optimize(1.0, &grid(), &baseline(), &quick(2), &p, &a).unwrap();
        assert!(out.best().is_none());
        assert!(out
            .candidates
            .iter()
            .all(|c| c.violated.contains(&Constraint::EnergyBudget)));
    }

    #[test]
    fn optimize_single_feasible_point() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let mut s = quick(2);
        s.coverage.delta = 1e6;
        let energy_small = Trajectory::circular(60.0, 200.0, 3, 5.0)
            .unwrap()
            .mission_energy(&a);
        let g = DesignGrid {
            altitudes: vec![200.0],
            ..grid()
        };
        let out = optimize(energy_small + 1.0, &g, &baseline(), &s, &p, &a).unwrap();
        assert_eq!(out.candidates.iter().filter(|c| c.feasible()).count(), 1);
        let best = out.best().unwrap();
        assert_eq!(best.design.radius, 60.0);
        assert!(out.candidates[1].result.is_none());
    }

    #[test]
    fn optimize_beats_grid_members() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let mut s = quick(10);
        s.coverage.delta = 1e6;
        let out = optimize(1e9, &grid(), &baseline(), &s, &p, &a).unwrap();
        let best = out.best().unwrap().result.as_ref().unwrap().mean_error;
        for c in &out.candidates {
            assert!(best <= c.result.as_ref().unwrap().mean_error);
        }
    }

    #[test]
    fn invalid_scenario_rejected() {
        let p = ChannelParams::default();
        let a = AirframeParams::default();
        let s = Scenario {
            n_nodes: 0,
            ..quick(1)
        };
        assert!(matches!(
            evaluate(&baseline(), &s, &p, &a),
            Err(Error::InvalidParameter {
                name: "n_nodes",
                ..
            })
        ));
    }
}
