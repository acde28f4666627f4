//! Baseline simulation constants.
//!
//! The first group pins the standard simulation setup; the second group
//! holds artifact defaults for quantities the standard setup leaves open.
//! Everything here is a default, never a hard-coded assumption: each value
//! is overridable through the library configs and the CLI.

use crate::geom::{Point2, SearchArea};

/// Reference RSS at 1 m, dB.
pub const P0_DB: f64 = -30.0;
/// Path-loss exponent.
pub const BETA: f64 = 2.5;
/// RSS noise standard deviation, dB.
pub const SIGMA_DB: f64 = 5.0;
/// Resampling ratio.
pub const RHO: f64 = 0.9;
/// Time epochs per trial.
pub const EPOCHS: usize = 100;

/// Square search area from (-50, -50) to (50, 50).
pub fn area() -> SearchArea {
    SearchArea::new(Point2::new(-50.0, -50.0), Point2::new(50.0, 50.0))
        .expect("default area is valid")
}

// Artifact defaults.

/// Particle count N.
pub const PARTICLES: usize = 1000;
/// Sensor count M.
pub const SENSORS: usize = 4;
/// Monte Carlo trials per experiment.
pub const TRIALS: usize = 50;
/// Sensor circle radius, meters.
pub const RADIUS_M: f64 = 40.0;
/// Bad-geometry arc width, degrees.
pub const ARC_DEGREES: f64 = 60.0;
