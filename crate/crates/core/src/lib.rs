//! Localization of stationary ground nodes from a single hovering UAV anchor.
//!
//! The crate models the elevation-dependent air-to-ground RSS channel, the
//! propulsion power of a rotary-wing airframe, RSS ranging with
//! multilateration, CRLB-bounded coverage, and a Monte-Carlo experiment layer
//! that sweeps and grid-optimizes circular waypoint trajectories under an
//! energy budget.
//!
//! Angles are radians everywhere. Distances are meters, powers watts, energies
//! joules, and signal levels dB / dBm.
//!
//! ```
//! use uavloc::{AirframeParams, Trajectory};
//!
//! let airframe = AirframeParams::default();
//! let traj = Trajectory::circular(120.0, 200.0, 3, 5.0).unwrap();
//! let energy = traj.mission_energy(&airframe);
//! assert!((energy - 84_440.6).abs() < 1.0);
//! ```

pub mod channel;
pub mod cli;
pub mod coverage;
pub mod energy;
mod error;
pub mod estimation;
pub mod experiment;
pub mod geometry;
pub mod rng;
pub mod trajectory;

pub use channel::{ChannelParams, LinkClass, LinkGeometry, SamplingMode};
pub use coverage::{CoverageMethod, CoverageRadius, CoverageResult, CoverageSpec};
pub use energy::{AirframeParams, PowerBreakdown};
pub use error::{Error, Result};
pub use estimation::{AnchorRange, PositionEstimate, RangeEstimate, RangeObservation};
pub use experiment::{
    Candidate, Constraint, DesignGrid, DesignPoint, ErrorPopulation, EstimatorMode, LinkMode,
    OptimizationOutcome, Scenario, SweepAxis, SweepResult,
};
pub use geometry::{Point2, Point3};
pub use trajectory::{HoverTime, Trajectory};
