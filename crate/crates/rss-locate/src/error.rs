//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by configuration validation, scenario I/O, the optimizer,
/// and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A scenario definition violates a structural invariant.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Target and sensor occupy the same point; the noiseless RSS model is
    /// undefined at zero distance.
    #[error("target and sensor coincide; RSS is undefined at zero distance")]
    CoincidentPoints,

    /// As [`Error::CoincidentPoints`], with the offending sensor index.
    #[error("target coincides with sensor {sensor_id}; RSS is undefined at zero distance")]
    CoincidentSensor { sensor_id: usize },

    /// The optimizer evaluated the objective at a point where it is not finite.
    #[error("objective is not finite at ({x}, {y})")]
    NonFiniteObjective { x: f64, y: f64 },

    /// RSS accumulation was requested for a sensor with no observations.
    #[error("empty RSS history for sensor {sensor_id}")]
    EmptyHistory { sensor_id: usize },

    /// A scenario file did not match the expected schema.
    #[error("failed to parse scenario file {path}: {reason}")]
    ScenarioParse { path: PathBuf, reason: String },

    /// An I/O operation failed.
    #[error("{context} ({path}): {source}")]
    Io {
        context: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
