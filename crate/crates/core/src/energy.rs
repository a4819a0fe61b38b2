//! Rotary-wing propulsion power in hover and level forward flight.
//!
//! Total power is the sum of an induced term (lift), a parasitic drag term
//! growing with `v^3`, and a blade-profile term. The model assumes a small
//! tilt angle at every speed and ignores climb, descent and communication
//! power.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirframeParams {
    pub mass_kg: f64,
    /// Standard gravity, m/s^2.
    #[serde(rename = "g")]
    pub gravity: f64,
    /// Air density, kg/m^3.
    #[serde(rename = "rho")]
    pub air_density: f64,
    /// Drag coefficient times reference area.
    #[serde(rename = "c_ds")]
    pub drag_area: f64,
    /// Rotor disc area, m^2.
    #[serde(rename = "a_d")]
    pub disc_area: f64,
    /// Blade-profile power constant, W.
    #[serde(rename = "k_o")]
    pub blade_profile_w: f64,
    /// Rotor blade tip speed, m/s.
    #[serde(rename = "v_tip")]
    pub tip_speed: f64,
}

impl Default for AirframeParams {
    fn default() -> Self {
        Self {
            mass_kg: 5.0,
            gravity: 9.81,
            air_density: 1.225,
            drag_area: 0.4,
            disc_area: 0.25,
            blade_profile_w: 570.0,
            tip_speed: 100.0,
        }
    }
}

/// The three addends of the forward-flight power, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown {
    pub induced: f64,
    pub parasitic: f64,
    pub blade_profile: f64,
}

impl PowerBreakdown {
    pub fn total(&self) -> f64 {
        self.induced + self.parasitic + self.blade_profile
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

impl AirframeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass_kg", self.mass_kg),
            ("g", self.gravity),
            ("rho", self.air_density),
            ("c_ds", self.drag_area),
            ("a_d", self.disc_area),
            ("k_o", self.blade_profile_w),
            ("v_tip", self.tip_speed),
        ] {
            ensure(v > 0.0 && v.is_finite(), name, "> 0", v)?;
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.mass_kg * self.gravity
    }

    /// Mean induced velocity of the rotors at airspeed `v`, m/s.
    pub fn induced_velocity(&self, v: f64) -> f64 {
        let lift = self.weight() / (self.air_density * self.disc_area);
        let v2 = v * v;
        // -v^2 + sqrt(v^4 + L^2) cancels badly for large v; use the conjugate form.
        let numer = lift * lift / (v2 + (v2 * v2 + lift * lift).sqrt());
        (numer / 2.0).sqrt()
    }

    pub fn power_breakdown(&self, v: f64) -> PowerBreakdown {
        PowerBreakdown {
            induced: self.weight() * self.induced_velocity(v),
            parasitic: 0.5 * self.air_density * v.powi(3) * self.drag_area,
            blade_profile: self.blade_profile_w
                * (1.0 + 3.0 * v * v / (self.tip_speed * self.tip_speed)),
        }
    }

    pub fn forward_flight_power(&self, v: f64) -> f64 {
        self.power_breakdown(v).total()
    }

    pub fn hover_power(&self) -> f64 {
        self.blade_profile_w
            + (self.weight().powi(3) / (2.0 * self.air_density * self.disc_area)).sqrt()
    }

    /// Speed minimizing forward-flight power.
    pub fn optimal_cruise_speed(&self) -> f64 {
        minimize_on_half_line(|v| self.forward_flight_power(v), 1e-6)
    }

    /// Speed minimizing energy per meter flown, `P(v) / v`.
    pub fn max_range_speed(&self) -> f64 {
        // P(v)/v blows up at 0, so start the bracket just above it.
        let floor = 1e-3;
        floor + minimize_on_half_line(|v| self.forward_flight_power(v + floor) / (v + floor), 1e-6)
    }
}

/// Golden-section minimization of a unimodal `f` on `[0, inf)`.
///
/// The upper end of the bracket is doubled until `f` turns upward.
fn minimize_on_half_line(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let mut hi = 1.0;
    while f(2.0 * hi) < f(hi) && hi < 1e6 {
        hi *= 2.0;
    }
    let (mut a, mut b) = (0.0, 2.0 * hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const CRUISE: f64 = 40.0 / 3.6;

    #[test]
    fn induced_velocity_values() {
        let a = AirframeParams::default();
        assert_relative_eq!(a.induced_velocity(0.0), 8.948834150494758, epsilon = 1e-12);
        assert_relative_eq!(a.induced_velocity(11.11), 6.27595043578071, epsilon = 1e-9);
        let far = a.induced_velocity(1e3);
        let asymptote = a.weight() / (2.0 * a.air_density * a.disc_area * 1e3);
        assert_relative_eq!(far, asymptote, max_relative = 1e-6);
    }

    #[test]
    fn forward_flight_decomposition() {
        let a = AirframeParams::default();
        let p = a.power_breakdown(CRUISE);
        assert_relative_eq!(p.induced, 307.8165763252876, epsilon = 1e-6);
        assert_relative_eq!(p.parasitic, 336.07681755829907, epsilon = 1e-9);
        assert_relative_eq!(p.blade_profile, 591.1111111111111, epsilon = 1e-9);
        assert_relative_eq!(p.total(), 1235.0045049946978, epsilon = 1e-6);
        let doubled = a.power_breakdown(2.0 * CRUISE).parasitic;
        assert_relative_eq!(doubled, 8.0 * p.parasitic, max_relative = 1e-14);
    }

    #[test]
    fn hover_values() {
        let a = AirframeParams::default();
        assert_relative_eq!(a.hover_power(), 1008.940315081768, epsilon = 1e-9);
        assert_relative_eq!(a.forward_flight_power(0.0), a.hover_power(), epsilon = 1e-9);
        assert!((a.forward_flight_power(1e-6) - a.hover_power()).abs() < 1e-6);

        // Lift term re-evaluated with mass and disc area both scaled by 4.
        let scaled = AirframeParams {
            mass_kg: 20.0,
            disc_area: 1.0,
            ..a
        };
        let lift =
            |p: &AirframeParams| (p.weight().powi(3) / (2.0 * p.air_density * p.disc_area)).sqrt();
        assert_relative_eq!(scaled.hover_power() - 570.0, lift(&scaled), epsilon = 1e-9);
        assert_relative_eq!(lift(&scaled), 4.0 * lift(&a), max_relative = 1e-12);

        let ghost = AirframeParams {
            mass_kg: 1e-12,
            blade_profile_w: 0.0,
            ..a
        };
        assert!(ghost.hover_power() < 1e-12);
    }

    #[test]
    fn optimal_speed_beats_hover() {
        let a = AirframeParams::default();
        let v = a.optimal_cruise_speed();
        assert_relative_eq!(v, 3.14332916930045, epsilon = 1e-4);
        let p = a.forward_flight_power(v);
        assert!(p < a.hover_power());
        assert!(a.forward_flight_power(v - 0.1) >= p);
        assert!(a.forward_flight_power(v + 0.1) >= p);
    }

    #[test]
    fn heavy_drag_pushes_optimum_to_zero() {
        let a = AirframeParams {
            drag_area: 1e6,
            ..Default::default()
        };
        assert!(a.optimal_cruise_speed() < 1e-3);
    }

    #[test]
    fn max_range_speed_value() {
        let a = AirframeParams::default();
        assert_relative_eq!(a.max_range_speed(), 12.780478896432687, epsilon = 1e-4);
    }

    #[test]
    fn component_monotonicity_and_single_minimum() {
        let a = AirframeParams::default();
        let speeds: Vec<f64> = (0..=3000).map(|i| i as f64 * 0.01).collect();
        let parts: Vec<PowerBreakdown> = speeds.iter().map(|&v| a.power_breakdown(v)).collect();
        for w in parts.windows(2) {
            assert!(w[1].induced < w[0].induced);
            assert!(w[1].parasitic > w[0].parasitic);
        }
        for (v, p) in speeds.iter().zip(&parts) {
            assert!(p.total() >= a.weight() * a.induced_velocity(*v));
        }
        let totals: Vec<f64> = parts.iter().map(PowerBreakdown::total).collect();
        let interior_minima = totals
            .windows(3)
            .filter(|w| w[1] < w[0] && w[1] < w[2])
            .count();
        assert_eq!(interior_minima, 1);
    }

    #[test]
    fn validate_names_the_key() {
        let bad = AirframeParams {
            mass_kg: -1.0,
            ..Default::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("mass_kg"), "{msg}");
    }
}
