//! Ranging CRLB and CRLB-bounded localization coverage.
//!
//! A waypoint covers the ground disk in which the spread of the RSS distance
//! estimator stays within `delta` times the CRLB. The localization coverage of
//! a trajectory is the intersection of those disks over all waypoints.
//!
//! For a single link class both sides of the coverage condition scale
//! linearly with `d` at fixed elevation, so the coverage radius is set by the
//! elevation angle alone and grows linearly with altitude.

use std::f64::consts::{LN_10, PI};

use crate::channel::{ChannelParams, LinkClass};
use crate::error::{ensure, Result};
use crate::geometry::Point2;
use crate::trajectory::Trajectory;

/// `ln(10) / 20`: converts a dB spread into a relative distance spread.
const DB_TO_NEPER: f64 = LN_10 / 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageSpec {
    /// Allowed ratio of estimator spread to the CRLB.
    pub delta: f64,
    /// Grid step for numeric intersection areas; `None` picks `min(r_c) / 500`.
    pub resolution: Option<f64>,
    /// RSS samples behind each distance estimate.
    pub n_samples: usize,
}

impl Default for CoverageSpec {
    fn default() -> Self {
        Self {
            delta: 2.0,
            resolution: None,
            n_samples: 1,
        }
    }
}

impl CoverageSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.delta > 0.0, "delta", "> 0", self.delta)?;
        if let Some(res) = self.resolution {
            ensure(res > 0.0, "resolution", "> 0", res)?;
        }
        ensure(
            self.n_samples >= 1,
            "n_samples",
            ">= 1",
            self.n_samples as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRadius {
    pub radius: f64,
    /// The condition held over the whole search bracket `[0, 100 h]`.
    pub unbounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    ClosedFormThree,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    pub per_waypoint_radius: Vec<f64>,
    pub area: f64,
    pub method: CoverageMethod,
    pub unbounded: bool,
    pub centers: Vec<Point2>,
}

impl CoverageResult {
    /// Whether `node` lies inside every waypoint's coverage disk.
    pub fn covers(&self, node: Point2) -> bool {
        self.centers
            .iter()
            .zip(&self.per_waypoint_radius)
            .all(|(c, r)| c.distance(&node) <= *r)
    }
}

/// Closed-form CRLB of the distance estimate for one link class, m.
pub fn crlb_sigma(d: f64, theta: f64, class: LinkClass, params: &ChannelParams) -> Result<f64> {
    ensure(d > 0.0, "distance", "> 0", d)?;
    let sigma = params.shadowing_sigma(theta, class)?;
    Ok(d * DB_TO_NEPER * sigma)
}

/// LoS/NLoS combination of the two class bounds with squared-probability weights, m.
pub fn crlb_avg(d: f64, theta: f64, params: &ChannelParams) -> Result<f64> {
    let p = params.p_los(theta)?;
    let los = crlb_sigma(d, theta, LinkClass::Los, params)?;
    let nlos = crlb_sigma(d, theta, LinkClass::Nlos, params)?;
    Ok((p * p * los * los + (1.0 - p).powi(2) * nlos * nlos).sqrt())
}

/// Numerical CRLB from the Fisher information of the received-power density.
///
/// The score `d/dd ln f(w | d)` is taken by central differences and its second
/// moment integrated with a midpoint rule of `points` nodes over +-12 sigma.
/// Independent of the closed form; used to validate it.
pub fn fisher_crlb_oracle(
    d: f64,
    theta: f64,
    class: LinkClass,
    params: &ChannelParams,
    points: usize,
) -> Result<f64> {
    ensure(d > 0.0, "distance", "> 0", d)?;
    ensure(points >= 2, "points", ">= 2", points as f64)?;
    let sigma = params.shadowing_sigma(theta, class)?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let mu = params.excess_mean(class);
    let k = params.free_space_constant();
    let c = params.link_budget_dbm;
    let norm = -(sigma * (2.0 * PI).sqrt()).ln();
    // ln of the received-power density at w for distance `dist`.
    let log_pdf = |w: f64, dist: f64| {
        let psi = -w - 20.0 * dist.log10() - k + c;
        norm - (psi - mu).powi(2) / (2.0 * sigma * sigma)
    };
    let center = c - 20.0 * d.log10() - k - mu;
    let half_width = 12.0 * sigma;
    let dw = 2.0 * half_width / points as f64;
    let h = d * 1e-5;
    let info: f64 = (0..points)
        .map(|i| {
            let w = center - half_width + (i as f64 + 0.5) * dw;
            let score = (log_pdf(w, d + h) - log_pdf(w, d - h)) / (2.0 * h);
            log_pdf(w, d).exp() * score * score * dw
        })
        .sum();
    Ok(1.0 / info.sqrt())
}

/// `beta^2 sigma^2 / n` for the log-normal distance estimator.
fn log_variance(theta: f64, class: LinkClass, n_samples: usize, params: &ChannelParams) -> f64 {
    (DB_TO_NEPER * params.sigma_unchecked(theta, class)).powi(2) / n_samples as f64
}

/// Standard deviation of `d_hat = d 10^(X/20)`, `X ~ N(0, sigma^2 / n)`, m.
pub fn estimator_std(
    d: f64,
    theta: f64,
    class: LinkClass,
    n_samples: usize,
    params: &ChannelParams,
) -> Result<f64> {
    ensure(d > 0.0, "distance", "> 0", d)?;
    ensure(n_samples >= 1, "n_samples", ">= 1", n_samples as f64)?;
    params.shadowing_sigma(theta, class)?;
    let x = log_variance(theta, class, n_samples, params);
    Ok(d * (x.exp() * x.exp_m1()).sqrt())
}

/// Standard deviation of the distance estimator when the link is LoS with
/// probability `P_LoS(theta)` and NLoS otherwise, m.
///
/// Law of total variance over the class: the within-class variances weighted
/// by the class probabilities plus the spread between the two class means.
pub fn mixture_std(d: f64, theta: f64, n_samples: usize, params: &ChannelParams) -> Result<f64> {
    let p = params.p_los(theta)?;
    let var = |class| -> Result<(f64, f64)> {
        let std = estimator_std(d, theta, class, n_samples, params)?;
        let mean = d * (log_variance(theta, class, n_samples, params) / 2.0).exp();
        Ok((std * std, mean))
    };
    let (var_los, mean_los) = var(LinkClass::Los)?;
    let (var_nlos, mean_nlos) = var(LinkClass::Nlos)?;
    let total = p * var_los + (1.0 - p) * var_nlos + p * (1.0 - p) * (mean_los - mean_nlos).powi(2);
    Ok(total.sqrt())
}

/// Whether a node at horizontal range `r` from a waypoint at altitude `h`
/// satisfies the coverage condition.
pub fn coverage_condition(
    r: f64,
    h: f64,
    spec: &CoverageSpec,
    params: &ChannelParams,
) -> Result<bool> {
    ensure(h > 0.0, "altitude", "> 0", h)?;
    ensure(r >= 0.0, "horizontal range", ">= 0", r)?;
    let d = h.hypot(r);
    let theta = h.atan2(r);
    let spread = mixture_std(d, theta, spec.n_samples, params)?;
    let bound = crlb_avg(d, theta, params)?;
    Ok(spread <= spec.delta * bound)
}

const SCAN_STEPS: usize = 4000;
const RADIUS_TOLERANCE: f64 = 0.1;

/// Largest `r` such that the coverage condition holds on all of `[0, r]`.
///
/// The bracket `[0, 100 h]` is scanned coarsely for the first failure, which
/// is then located by bisection to 0.1 m.
pub fn coverage_radius(
    h: f64,
    spec: &CoverageSpec,
    params: &ChannelParams,
) -> Result<CoverageRadius> {
    spec.validate()?;
    let cap = 100.0 * h;
    if !coverage_condition(0.0, h, spec, params)? {
        return Ok(CoverageRadius {
            radius: 0.0,
            unbounded: false,
        });
    }
    let step = cap / SCAN_STEPS as f64;
    let mut pass = 0.0;
    let mut fail = None;
    for i in 1..=SCAN_STEPS {
        let r = i as f64 * step;
        if coverage_condition(r, h, spec, params)? {
            pass = r;
        } else {
            fail = Some(r);
            break;
        }
    }
    let Some(mut fail) = fail else {
        return Ok(CoverageRadius {
            radius: cap,
            unbounded: true,
        });
    };
    while fail - pass > RADIUS_TOLERANCE {
        let mid = 0.5 * (pass + fail);
        if coverage_condition(mid, h, spec, params)? {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(CoverageRadius {
        radius: pass,
        unbounded: false,
    })
}

/// Intersection area of three equal disks of radius `r_c` centered on an
/// equilateral triangle with side `l`, m^2.
///
/// Zero, with a warning, once the disks no longer share a point
/// (`l > sqrt(3) r_c`).
pub fn coverage_area_three(r_c: f64, l: f64) -> f64 {
    if r_c <= 0.0 || l > 3f64.sqrt() * r_c {
        log::warn!("three-disk intersection is empty (r_c = {r_c}, l = {l})");
        return 0.0;
    }
    let r2 = r_c * r_c;
    let inner = (3.0 * r2 - 0.75 * l * l).max(0.0).sqrt();
    let c = (3.0 * r2 - 0.5 * l * l - l * inner).max(0.0).sqrt();
    let chord = (c / (2.0 * r_c)).min(1.0);
    3f64.sqrt() / 4.0 * c * c
        + 3.0 * (r2 * chord.asin() - c / 4.0 * (4.0 * r2 - c * c).max(0.0).sqrt())
}

/// Area of the intersection of disks by counting grid cells over the
/// bounding box of the smallest disk, m^2.
pub fn coverage_area_numeric(centers: &[Point2], radii: &[f64], resolution: f64) -> Result<f64> {
    if centers.len() != radii.len() {
        return Err(crate::Error::LengthMismatch {
            left: centers.len(),
            right: radii.len(),
        });
    }
    ensure(!centers.is_empty(), "centers", "nonempty", 0.0)?;
    ensure(resolution > 0.0, "resolution", "> 0", resolution)?;
    let (smallest, &r_min) = radii
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    if r_min <= 0.0 {
        return Ok(0.0);
    }
    let origin = centers[smallest];
    let cells = (2.0 * r_min / resolution).ceil().max(1.0) as usize;
    let cell = 2.0 * r_min / cells as f64;
    let radii_sq: Vec<f64> = radii.iter().map(|r| r * r).collect();

    let count_row = |i: usize| -> u64 {
        let y = origin.y - r_min + (i as f64 + 0.5) * cell;
        (0..cells)
            .filter(|&j| {
                let x = origin.x - r_min + (j as f64 + 0.5) * cell;
                centers
                    .iter()
                    .zip(&radii_sq)
                    .all(|(c, r2)| (x - c.x).powi(2) + (y - c.y).powi(2) <= *r2)
            })
            .count() as u64
    };

    #[cfg(feature = "parallel")]
    let inside: u64 = {
        use rayon::prelude::*;
        (0..cells).into_par_iter().map(count_row).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let inside: u64 = (0..cells).map(count_row).sum();

    Ok(inside as f64 * cell * cell)
}

/// Coverage radius at every waypoint and the area of their intersection.
///
/// Uses the three-disk closed form when `M = 3`, grid counting otherwise.
pub fn localization_coverage(
    traj: &Trajectory,
    spec: &CoverageSpec,
    params: &ChannelParams,
) -> Result<CoverageResult> {
    traj.validate()?;
    // All waypoints share the altitude, so the radius is the same at each.
    let rc = coverage_radius(traj.altitude, spec, params)?;
    let centers = traj.anchors();
    let radii = vec![rc.radius; centers.len()];
    let (area, method) = if traj.n_waypoints == 3 {
        (
            coverage_area_three(rc.radius, traj.leg_length()),
            CoverageMethod::ClosedFormThree,
        )
    } else if rc.radius <= 0.0 {
        (0.0, CoverageMethod::Numeric)
    } else {
        let res = spec.resolution.unwrap_or(rc.radius / 500.0);
        (
            coverage_area_numeric(&centers, &radii, res)?,
            CoverageMethod::Numeric,
        )
    };
    Ok(CoverageResult {
        per_waypoint_radius: radii,
        area,
        method,
        unbounded: rc.unbounded,
        centers,
    })
}

/// Small-spread approximation of `estimator_std`: `d beta sigma / sqrt(n)`.
pub fn first_order_std(d: f64, sigma_db: f64, n_samples: usize) -> f64 {
    d * DB_TO_NEPER * sigma_db / (n_samples as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn table1() -> ChannelParams {
        ChannelParams::default()
    }

    #[test]
    fn crlb_closed_form_values() {
        let p = table1();
        assert_relative_eq!(
            crlb_sigma(200.0, FRAC_PI_4, LinkClass::Los, &p).unwrap(),
            47.8660413643182,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            crlb_sigma(100.0, 0.0, LinkClass::Nlos, &p).unwrap(),
            100.0 * LN_10 / 20.0 * 30.0,
            epsilon = 1e-12
        );
        let one = crlb_sigma(150.0, 0.7, LinkClass::Nlos, &p).unwrap();
        let two = crlb_sigma(300.0, 0.7, LinkClass::Nlos, &p).unwrap();
        assert_relative_eq!(two, 2.0 * one, max_relative = 1e-14);
    }

    #[test]
    fn crlb_avg_weight_extremes() {
        let p = table1();
        let los = crlb_sigma(200.0, FRAC_PI_2, LinkClass::Los, &p).unwrap();
        assert_relative_eq!(
            crlb_avg(200.0, FRAC_PI_2, &p).unwrap(),
            los,
            max_relative = 1e-11
        );

        let never_los = ChannelParams {
            los_prob_scale: 1e300,
            los_prob_rate: 0.0,
            ..p
        };
        let nlos = crlb_sigma(200.0, 0.3, LinkClass::Nlos, &never_los).unwrap();
        assert_relative_eq!(
            crlb_avg(200.0, 0.3, &never_los).unwrap(),
            nlos,
            max_relative = 1e-12
        );

        // Equal class spreads at P_LoS = 1/2 give sigma / sqrt(2).
        let even = ChannelParams {
            los_prob_scale: 1.0,
            los_prob_rate: 0.0,
            nlos_sigma_scale: 10.0,
            nlos_sigma_decay: 2.0,
            ..p
        };
        let s = crlb_sigma(200.0, 0.4, LinkClass::Los, &even).unwrap();
        assert_relative_eq!(
            crlb_avg(200.0, 0.4, &even).unwrap(),
            s / 2f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn fisher_oracle_properties() {
        let p = table1();
        let base = fisher_crlb_oracle(250.0, 0.5, LinkClass::Los, &p, 200_000).unwrap();
        let halved = ChannelParams {
            los_sigma_scale: 5.0,
            ..p
        };
        let half = fisher_crlb_oracle(250.0, 0.5, LinkClass::Los, &halved, 200_000).unwrap();
        assert_relative_eq!(half, base / 2.0, max_relative = 1e-4);
        let shifted = ChannelParams {
            link_budget_dbm: -37.0,
            ..p
        };
        let moved = fisher_crlb_oracle(250.0, 0.5, LinkClass::Los, &shifted, 200_000).unwrap();
        assert_relative_eq!(moved, base, max_relative = 1e-4);
        let closed = crlb_sigma(250.0, 0.5, LinkClass::Los, &p).unwrap();
        assert_relative_eq!(base, closed, max_relative = 5e-3);
    }

    #[test]
    fn estimator_std_limits() {
        let p = table1();
        let quiet = p.without_shadowing();
        assert_eq!(
            estimator_std(300.0, 0.5, LinkClass::Los, 1, &quiet).unwrap(),
            0.0
        );

        // sigma = 0.1 dB: first-order expansion d beta sigma / sqrt(n).
        let theta = 0.0;
        let tiny = ChannelParams {
            los_sigma_scale: 0.1,
            ..p
        };
        let exact = estimator_std(300.0, theta, LinkClass::Los, 4, &tiny).unwrap();
        let approx = first_order_std(300.0, 0.1, 4);
        assert!((exact / approx - 1.0).abs() < 0.01);
    }

    #[test]
    fn estimator_std_matches_monte_carlo() {
        let p = table1();
        let (d, theta, n) = (400.0, 0.3, 3);
        let sigma = p.shadowing_sigma(theta, LinkClass::Nlos).unwrap();
        let mut rng = trial_rng(11, 0);
        let draws: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let x: f64 = rng.sample(StandardNormal);
                d * 10f64.powf(x * sigma / (n as f64).sqrt() / 20.0)
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        let expected = estimator_std(d, theta, LinkClass::Nlos, n, &p).unwrap();
        assert!(
            (var.sqrt() / expected - 1.0).abs() < 0.01,
            "{} vs {expected}",
            var.sqrt()
        );
    }

    #[test]
    fn estimator_never_beats_crlb() {
        let p = table1();
        for i in 0..=100 {
            let sigma = 0.1 + i as f64 * 0.099;
            let params = ChannelParams {
                los_sigma_scale: sigma,
                ..p
            };
            for n in [1, 4, 10] {
                let std = estimator_std(250.0, 0.0, LinkClass::Los, n, &params).unwrap();
                let bound =
                    crlb_sigma(250.0, 0.0, LinkClass::Los, &params).unwrap() / (n as f64).sqrt();
                assert!(std >= bound * (1.0 - 1e-12), "sigma {sigma} n {n}");
            }
        }
    }

    /// Scan oracle: first failure of the condition at 1 m steps.
    fn scan_radius(h: f64, spec: &CoverageSpec, p: &ChannelParams) -> f64 {
        let mut r = 0.0;
        while coverage_condition(r + 1.0, h, spec, p).unwrap() {
            r += 1.0;
        }
        r
    }

    #[test]
    fn coverage_radius_matches_scan() {
        let p = table1();
        let spec = CoverageSpec::default();
        for h in [100.0, 200.0, 450.0] {
            let rc = coverage_radius(h, &spec, &p).unwrap();
            assert!(!rc.unbounded);
            let scanned = scan_radius(h, &spec, &p);
            assert!(
                (rc.radius - scanned).abs() <= 1.0 + RADIUS_TOLERANCE,
                "{h}: {} vs {scanned}",
                rc.radius
            );
            assert!(rc.radius > 0.5 * h && rc.radius < 5.0 * h);
        }
    }

    #[test]
    fn coverage_radius_extremes() {
        let p = table1();
        let loose = CoverageSpec {
            delta: 1e9,
            ..Default::default()
        };
        let rc = coverage_radius(200.0, &loose, &p).unwrap();
        assert!(rc.unbounded);
        assert_eq!(rc.radius, 20_000.0);
        let strict = CoverageSpec {
            delta: 1e-9,
            ..Default::default()
        };
        assert_eq!(coverage_radius(200.0, &strict, &p).unwrap().radius, 0.0);
    }

    #[test]
    fn coverage_radius_monotone_in_delta_and_samples() {
        let p = table1();
        let mut last = 0.0;
        for delta in [1.2, 1.5, 2.0, 3.0, 5.0] {
            let spec = CoverageSpec {
                delta,
                ..Default::default()
            };
            let r = coverage_radius(200.0, &spec, &p).unwrap().radius;
            assert!(r >= last);
            last = r;
        }
        let mut last = 0.0;
        for n in [1, 2, 5, 10, 40] {
            let spec = CoverageSpec {
                n_samples: n,
                ..Default::default()
            };
            let r = coverage_radius(200.0, &spec, &p).unwrap().radius;
            assert!(r >= last - RADIUS_TOLERANCE, "n {n}: {r} < {last}");
            last = r;
        }
    }

    #[test]
    fn three_disk_closed_form() {
        assert_relative_eq!(
            coverage_area_three(100.0, 0.0),
            PI * 1e4,
            max_relative = 1e-9
        );
        assert!(coverage_area_three(100.0, 3f64.sqrt() * 100.0) < 1e-6);
        assert_eq!(coverage_area_three(100.0, 200.0), 0.0);
    }

    fn triangle(l: f64) -> Vec<Point2> {
        let circum = l / 3f64.sqrt();
        (0..3)
            .map(|k| Point2::from_polar(circum, k as f64 * 2.0 * PI / 3.0))
            .collect()
    }

    #[test]
    fn three_disk_matches_fine_grid() {
        let grid = coverage_area_numeric(&triangle(120.0), &[100.0; 3], 0.05).unwrap();
        let closed = coverage_area_three(100.0, 120.0);
        assert!((grid / closed - 1.0).abs() < 1e-3, "{grid} vs {closed}");
    }

    #[test]
    fn numeric_area_cases() {
        let single =
            coverage_area_numeric(&[Point2::new(5.0, -3.0)], &[80.0], 80.0 / 500.0).unwrap();
        assert!((single / (PI * 6400.0) - 1.0).abs() < 2e-3);
        let apart = coverage_area_numeric(
            &[Point2::new(0.0, 0.0), Point2::new(500.0, 0.0)],
            &[100.0, 100.0],
            0.5,
        )
        .unwrap();
        assert_eq!(apart, 0.0);
        assert!(coverage_area_numeric(&[Point2::ORIGIN], &[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn localization_coverage_geometry() {
        let p = table1();
        let spec = CoverageSpec::default();
        let t3 = Trajectory::circular(120.0, 200.0, 3, 5.0).unwrap();
        let c3 = localization_coverage(&t3, &spec, &p).unwrap();
        assert_eq!(c3.method, CoverageMethod::ClosedFormThree);
        let r = c3.per_waypoint_radius[0];
        assert!(c3.area > 0.0 && c3.area <= PI * r * r);
        assert!(c3.covers(Point2::ORIGIN));

        let t4 = Trajectory::circular(120.0, 200.0, 4, 5.0).unwrap();
        let c4 = localization_coverage(&t4, &spec, &p).unwrap();
        assert_eq!(c4.method, CoverageMethod::Numeric);
        assert!(c4.area > 0.0 && c4.area <= PI * r * r);

        let dot = Trajectory::circular(1e-6, 200.0, 3, 5.0).unwrap();
        let cd = localization_coverage(&dot, &spec, &p).unwrap();
        assert_relative_eq!(cd.area, PI * r * r, max_relative = 1e-6);

        // Low altitude with a wide circle: disks too small to meet.
        let low = Trajectory::circular(300.0, 40.0, 3, 5.0).unwrap();
        let cl = localization_coverage(&low, &spec, &p).unwrap();
        assert!(cl.per_waypoint_radius[0] < low.leg_length() / 3f64.sqrt());
        assert_eq!(cl.area, 0.0);
    }
}
