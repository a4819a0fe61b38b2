use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented constraint.
    #[error("invalid parameter `{name}`: must be {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("elevation angle {0} rad is outside [0, pi/2]")]
    AngleOutOfRange(f64),

    #[error("underdetermined: multilateration needs at least 3 ranges, got {0}")]
    Underdetermined(usize),

    #[error("degenerate geometry: anchors are collinear")]
    DegenerateGeometry,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("waypoint index {index} out of range for {len} waypoints")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty grid for `{0}`")]
    EmptyGrid(&'static str),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            constraint,
            value,
        }
    }
}

/// Returns `Err(InvalidParameter)` unless `ok` holds.
pub(crate) fn ensure(
    ok: bool,
    name: &'static str,
    constraint: &'static str,
    value: f64,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(name, constraint, value))
    }
}
