//! Browser bindings for the `www/` demo page.
//!
//! Each export returns a flat `Float64Array` of fixed-width rows so the page
//! can plot without any serialization layer.

use wasm_bindgen::prelude::*;

use uavloc::coverage::{coverage_radius, localization_coverage};
use uavloc::experiment::sweep;
use uavloc::{AirframeParams, ChannelParams, LinkMode, Scenario, SweepAxis, Trajectory};

/// `n + 1` evenly spaced values from `lo` to `hi`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect()
}

/// Rows of `v, induced, parasitic, blade, total` for a UAV of `mass_kg`.
pub fn power_rows(mass_kg: f64, v_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let a = AirframeParams {
        mass_kg,
        ..AirframeParams::default()
    };
    a.validate().map_err(|e| e.to_string())?;
    if v_max.is_nan() || v_max <= 0.0 {
        return Err("v_max must be > 0".into());
    }
    let mut out = Vec::with_capacity(5 * (steps + 1));
    for v in linspace(0.0, v_max, steps) {
        let p = a.power_breakdown(v);
        out.extend([v, p.induced, p.parasitic, p.blade_profile, p.total()]);
    }
    Ok(out)
}

/// Rows of `h, r_c, area` for a circular path of `n_waypoints` around the
/// origin.
pub fn coverage_rows(
    radius: f64,
    n_waypoints: usize,
    delta: f64,
    h_min: f64,
    h_max: f64,
    steps: usize,
) -> Result<Vec<f64>, String> {
    let p = ChannelParams::default();
    let mut spec = Scenario::default().coverage;
    spec.delta = delta;
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for h in linspace(h_min, h_max, steps) {
        let traj = Trajectory::circular(radius, h, n_waypoints, 0.0).map_err(|e| e.to_string())?;
        let rc = coverage_radius(h, &spec, &p).map_err(|e| e.to_string())?;
        let area = localization_coverage(&traj, &spec, &p)
            .map_err(|e| e.to_string())?
            .area;
        out.extend([h, rc.radius, area]);
    }
    Ok(out)
}

fn parse_mode(mode: &str) -> Result<LinkMode, String> {
    match mode {
        "bernoulli" => Ok(LinkMode::Bernoulli),
        "conditioned_los" => Ok(LinkMode::ConditionedLos),
        "conditioned_nlos" => Ok(LinkMode::ConditionedNlos),
        "averaged" => Ok(LinkMode::Averaged),
        other => Err(format!("unknown link mode `{other}`")),
    }
}

/// Monte-Carlo rows of `h, mean position error, mean range error, energy`.
#[allow(clippy::too_many_arguments)]
pub fn error_rows(
    radius: f64,
    n_waypoints: usize,
    hover_time: f64,
    link_mode: &str,
    trials: usize,
    seed: u64,
    h_min: f64,
    h_max: f64,
    steps: usize,
) -> Result<Vec<f64>, String> {
    let base =
        Trajectory::circular(radius, h_min, n_waypoints, hover_time).map_err(|e| e.to_string())?;
    let scenario = Scenario {
        n_trials: trials,
        seed,
        link_mode: parse_mode(link_mode)?,
        ..Scenario::default()
    };
    let grid = linspace(h_min, h_max, steps);
    let rows = sweep(
        SweepAxis::Altitude,
        &grid,
        &base,
        &scenario,
        &ChannelParams::default(),
        &AirframeParams::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| {
            [
                r.swept_value,
                r.mean_error,
                r.mean_range_error,
                r.mission_energy,
            ]
        })
        .collect())
}

#[wasm_bindgen(js_name = powerCurve)]
pub fn power_curve(mass_kg: f64, v_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    power_rows(mass_kg, v_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = coverageVsAltitude)]
pub fn coverage_vs_altitude(
    radius: f64,
    n_waypoints: usize,
    delta: f64,
    h_min: f64,
    h_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    coverage_rows(radius, n_waypoints, delta, h_min, h_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = errorVsAltitude)]
#[allow(clippy::too_many_arguments)]
pub fn error_vs_altitude(
    radius: f64,
    n_waypoints: usize,
    hover_time: f64,
    link_mode: &str,
    trials: usize,
    seed: u32,
    h_min: f64,
    h_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    error_rows(
        radius,
        n_waypoints,
        hover_time,
        link_mode,
        trials,
        seed.into(),
        h_min,
        h_max,
        steps,
    )
    .map_err(|e| JsError::new(&e))
}
