//! Circular waypoint paths and their mission energy.
//!
//! `M` waypoints sit evenly on a circle of radius `R` at altitude `h`. The
//! first waypoint is home: the UAV flies `w0 -> w1 -> ... -> w(M-1) -> w0`,
//! hovering at each one and cruising along `M` straight legs. Only hover and
//! level legs count toward energy.

use std::f64::consts::PI;

use crate::channel::LinkGeometry;
use crate::energy::AirframeParams;
use crate::error::{ensure, Error, Result};
use crate::geometry::{Point2, Point3};

/// Default cruise speed, 40 km/h.
pub const DEFAULT_CRUISE_SPEED: f64 = 40.0 / 3.6;

#[derive(Debug, Clone, PartialEq)]
pub enum HoverTime {
    /// Same dwell at every waypoint, s.
    Uniform(f64),
    /// One dwell per waypoint, s.
    PerWaypoint(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub center: Point2,
    pub radius: f64,
    pub altitude: f64,
    pub n_waypoints: usize,
    pub hover: HoverTime,
    pub cruise_speed: f64,
    /// Angular position of the home waypoint, rad.
    pub phase: f64,
}

impl Trajectory {
    /// Circle centered at the origin, phase 0, default cruise speed.
    pub fn circular(
        radius: f64,
        altitude: f64,
        n_waypoints: usize,
        hover_time: f64,
    ) -> Result<Self> {
        let traj = Self {
            center: Point2::ORIGIN,
            radius,
            altitude,
            n_waypoints,
            hover: HoverTime::Uniform(hover_time),
            cruise_speed: DEFAULT_CRUISE_SPEED,
            phase: 0.0,
        };
        traj.validate()?;
        Ok(traj)
    }

    pub fn with_cruise_speed(mut self, v: f64) -> Result<Self> {
        self.cruise_speed = v;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.n_waypoints >= 3,
            "n_waypoints",
            ">= 3",
            self.n_waypoints as f64,
        )?;
        ensure(self.radius > 0.0, "radius", "> 0", self.radius)?;
        ensure(self.altitude > 0.0, "altitude", "> 0", self.altitude)?;
        ensure(
            self.cruise_speed > 0.0,
            "cruise_speed",
            "> 0",
            self.cruise_speed,
        )?;
        ensure(self.phase.is_finite(), "phase", "finite", self.phase)?;
        match &self.hover {
            HoverTime::Uniform(t) => ensure(*t >= 0.0, "hover_time", ">= 0", *t)?,
            HoverTime::PerWaypoint(ts) => {
                if ts.len() != self.n_waypoints {
                    return Err(Error::LengthMismatch {
                        left: ts.len(),
                        right: self.n_waypoints,
                    });
                }
                for &t in ts {
                    ensure(t >= 0.0, "hover_time", ">= 0", t)?;
                }
            }
        }
        Ok(())
    }

    /// Angle between adjacent waypoints seen from the center, rad.
    pub fn angular_step(&self) -> f64 {
        2.0 * PI / self.n_waypoints as f64
    }

    pub fn waypoint(&self, index: usize) -> Result<Point3> {
        if index >= self.n_waypoints {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.n_waypoints,
            });
        }
        let angle = self.phase + index as f64 * self.angular_step();
        Ok((self.center + Point2::from_polar(self.radius, angle)).with_altitude(self.altitude))
    }

    pub fn waypoints(&self) -> Vec<Point3> {
        (0..self.n_waypoints)
            .map(|k| {
                let angle = self.phase + k as f64 * self.angular_step();
                (self.center + Point2::from_polar(self.radius, angle)).with_altitude(self.altitude)
            })
            .collect()
    }

    /// Ground projections of the waypoints.
    pub fn anchors(&self) -> Vec<Point2> {
        self.waypoints().iter().map(Point3::ground).collect()
    }

    pub fn hover_time(&self, index: usize) -> f64 {
        match &self.hover {
            HoverTime::Uniform(t) => *t,
            HoverTime::PerWaypoint(ts) => ts[index],
        }
    }

    pub fn total_hover_time(&self) -> f64 {
        match &self.hover {
            HoverTime::Uniform(t) => *t * self.n_waypoints as f64,
            HoverTime::PerWaypoint(ts) => ts.iter().sum(),
        }
    }

    /// Straight-line distance between adjacent waypoints, m.
    pub fn leg_length(&self) -> f64 {
        2.0 * self.radius * (self.angular_step() / 2.0).sin()
    }

    /// Ground distance of the closed tour, m.
    pub fn tour_length(&self) -> f64 {
        self.n_waypoints as f64 * self.leg_length()
    }

    /// Hover energy at every waypoint plus cruise energy over every leg, J.
    pub fn mission_energy(&self, airframe: &AirframeParams) -> f64 {
        let hover = self.total_hover_time() * airframe.hover_power();
        let leg_time = self.leg_length() / self.cruise_speed;
        let cruise =
            self.n_waypoints as f64 * leg_time * airframe.forward_flight_power(self.cruise_speed);
        hover + cruise
    }

    /// Link from waypoint `index` down to a ground node.
    pub fn elevation_to(&self, index: usize, node: Point2) -> Result<LinkGeometry> {
        let wp = self.waypoint(index)?;
        LinkGeometry::new(wp.ground().distance(&node), self.altitude)
    }
}
