//! RSS ranging and multilateration.
//!
//! A waypoint's averaged RSS is inverted through the mean channel model into a
//! slant distance, projected onto the ground using the known altitude, and the
//! resulting horizontal ranges are fused by nonlinear least squares.

use crate::channel::{ChannelParams, LinkClass};
use crate::error::{ensure, Error, Result};
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeObservation {
    pub waypoint_index: usize,
    /// Ground projection of the waypoint.
    pub anchor: Point2,
    /// Time-averaged RSS, dBm.
    pub rss_avg: f64,
    /// Class whose mean excess loss is used for the inversion.
    pub assumed_class: LinkClass,
    pub n_samples: usize,
}

/// Estimated slant distance and its ground projection, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEstimate {
    pub slant: f64,
    pub horizontal: f64,
}

/// A horizontal range measured from a known ground anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorRange {
    pub anchor: Point2,
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionEstimate {
    pub position: Point2,
    /// `|r_hat_i - |p - a_i||` per anchor, in input order.
    pub range_residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Inverts the mean channel model: `d_hat = 10^((C - K - mu - rss) / 20)`.
///
/// The horizontal range is `sqrt(d_hat^2 - h^2)`, clamped to zero when the
/// estimated slant distance falls below the altitude.
pub fn estimate_distance(
    obs: &RangeObservation,
    altitude: f64,
    params: &ChannelParams,
) -> RangeEstimate {
    let exponent = (params.link_budget_dbm
        - params.free_space_constant()
        - params.excess_mean(obs.assumed_class)
        - obs.rss_avg)
        / 20.0;
    let slant = 10f64.powf(exponent);
    let horizontal = (slant * slant - altitude * altitude).max(0.0).sqrt();
    RangeEstimate { slant, horizontal }
}

/// Sum of squared range residuals at `p`.
pub fn objective(fixes: &[AnchorRange], p: Point2) -> f64 {
    fixes
        .iter()
        .map(|f| (p.distance(&f.anchor) - f.range).powi(2))
        .sum()
}

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-6;

/// Least-squares position from at least three anchor ranges.
///
/// Starts from `initial` or, by default, from the closed-form solution of the
/// differenced squared-range equations, then refines with Levenberg-Marquardt.
/// When one residual dwarfs the others (more than 10x the median) the solver
/// also restarts from four points around the anchor centroid and keeps the
/// lowest objective.
pub fn multilaterate(fixes: &[AnchorRange], initial: Option<Point2>) -> Result<PositionEstimate> {
    if fixes.len() < 3 {
        return Err(Error::Underdetermined(fixes.len()));
    }
    for f in fixes {
        ensure(
            f.range.is_finite() && f.range >= 0.0,
            "range",
            "finite and >= 0",
            f.range,
        )?;
    }
    let linear = linearized_fix(fixes)?;
    let start = initial.unwrap_or(linear);

    let mut best = refine(fixes, start);
    let residuals = residuals_abs(fixes, best.position);
    if has_outlier(&residuals) {
        let anchors: Vec<Point2> = fixes.iter().map(|f| f.anchor).collect();
        let centroid = Point2::centroid(&anchors);
        let spread =
            anchors.iter().map(|a| a.distance(&centroid)).sum::<f64>() / anchors.len() as f64;
        let half = spread / 2.0;
        for offset in [
            Point2::new(half, 0.0),
            Point2::new(-half, 0.0),
            Point2::new(0.0, half),
            Point2::new(0.0, -half),
        ] {
            let candidate = refine(fixes, centroid + offset);
            if candidate.objective < best.objective {
                best = candidate;
            }
        }
    }
    Ok(PositionEstimate {
        range_residuals: residuals_abs(fixes, best.position),
        position: best.position,
        converged: best.converged,
        iterations: best.iterations,
    })
}

fn residuals_abs(fixes: &[AnchorRange], p: Point2) -> Vec<f64> {
    fixes
        .iter()
        .map(|f| (p.distance(&f.anchor) - f.range).abs())
        .collect()
}

fn has_outlier(residuals: &[f64]) -> bool {
    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    sorted[n - 1] > 10.0 * median && sorted[n - 1] > 1e-9
}

/// Closed-form least-squares solution of `2 (a_i - a_0) . p = r_0^2 - r_i^2 + |a_i|^2 - |a_0|^2`.
fn linearized_fix(fixes: &[AnchorRange]) -> Result<Point2> {
    let a0 = fixes[0].anchor;
    let r0 = fixes[0].range;
    let (mut sxx, mut sxy, mut syy, mut bx, mut by) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut scale: f64 = 0.0;
    for f in &fixes[1..] {
        let ax = 2.0 * (f.anchor.x - a0.x);
        let ay = 2.0 * (f.anchor.y - a0.y);
        let rhs = r0 * r0 - f.range * f.range + f.anchor.x.powi(2) + f.anchor.y.powi(2)
            - a0.x.powi(2)
            - a0.y.powi(2);
        sxx += ax * ax;
        sxy += ax * ay;
        syy += ay * ay;
        bx += ax * rhs;
        by += ay * rhs;
        scale = scale.max(ax * ax + ay * ay);
    }
    let det = sxx * syy - sxy * sxy;
    if scale == 0.0 || det.abs() <= 1e-10 * scale * scale {
        return Err(Error::DegenerateGeometry);
    }
    Ok(Point2::new(
        (syy * bx - sxy * by) / det,
        (sxx * by - sxy * bx) / det,
    ))
}

struct Refined {
    position: Point2,
    objective: f64,
    converged: bool,
    iterations: usize,
}

fn refine(fixes: &[AnchorRange], start: Point2) -> Refined {
    let mut p = start;
    let mut cost = objective(fixes, p);
    let mut damping = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (mut jxx, mut jxy, mut jyy, mut gx, mut gy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for f in fixes {
            let dx = p.x - f.anchor.x;
            let dy = p.y - f.anchor.y;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist == 0.0 {
                continue;
            }
            let (ux, uy) = (dx / dist, dy / dist);
            let r = dist - f.range;
            jxx += ux * ux;
            jxy += ux * uy;
            jyy += uy * uy;
            gx += ux * r;
            gy += uy * r;
        }
        let hxx = jxx + damping * jxx.max(1e-12);
        let hyy = jyy + damping * jyy.max(1e-12);
        let det = hxx * hyy - jxy * jxy;
        if det <= 0.0 || !det.is_finite() {
            damping *= 4.0;
            continue;
        }
        let sx = -(hyy * gx - jxy * gy) / det;
        let sy = -(hxx * gy - jxy * gx) / det;
        let step = sx.hypot(sy);
        let candidate = Point2::new(p.x + sx, p.y + sy);
        let next = objective(fixes, candidate);
        if next < cost {
            p = candidate;
            cost = next;
            damping = (damping / 3.0).max(1e-12);
            if step < STEP_TOLERANCE {
                converged = true;
                break;
            }
        } else {
            if step < STEP_TOLERANCE {
                // No descent even for a vanishing step: stationary point.
                converged = true;
                break;
            }
            damping *= 4.0;
        }
    }
    Refined {
        position: p,
        objective: cost,
        converged,
        iterations,
    }
}

/// Norm of the range-vector error, `sqrt(sum |r_hat_i - r_i|^2)`.
pub fn range_error(r_true: &[f64], r_hat: &[f64]) -> Result<f64> {
    if r_true.len() != r_hat.len() {
        return Err(Error::LengthMismatch {
            left: r_true.len(),
            right: r_hat.len(),
        });
    }
    Ok(r_true
        .iter()
        .zip(r_hat)
        .map(|(t, h)| (h - t).powi(2))
        .sum::<f64>()
        .sqrt())
}

pub fn position_error(true_xy: Point2, est: &PositionEstimate) -> f64 {
    true_xy.distance(&est.position)
}

/// LoS-probability weighted error at elevation `theta`.
pub fn average_error(e_los: f64, e_nlos: f64, theta: f64, params: &ChannelParams) -> Result<f64> {
    ensure(e_los >= 0.0, "e_los", ">= 0", e_los)?;
    ensure(e_nlos >= 0.0, "e_nlos", ">= 0", e_nlos)?;
    let p = params.p_los(theta)?;
    Ok(p * e_los + (1.0 - p) * e_nlos)
}
