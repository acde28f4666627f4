//! RSS trilateration baseline.
//!
//! Each RSS measurement is inverted to a distance estimate through the
//! path-loss model, and the position is the nonlinear least-squares fit
//!
//! ```text
//! argmin_x  sum_m ( ||x - s_m|| - d_m )^2
//! ```
//!
//! solved with the Nelder–Mead module. The fit is unconstrained: with poor
//! sensor geometry the minimizer may land outside the search area, which is
//! precisely the failure mode the particle filter avoids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point2, SearchArea};
use crate::nelder_mead::{minimize, OptimizerConfig};
use crate::path_loss::{invert_distance, PathLossParams, RssMeasurement};

/// Starting point for the least-squares solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub enum InitialGuess {
    /// Centroid of the sensor positions (default).
    #[default]
    SensorCentroid,
    /// Center of the search area.
    AreaCenter,
    /// A caller-chosen point.
    Custom(Point2),
}

/// Trilateration configuration.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TrilaterationConfig {
    /// Average RSS per sensor across all epochs observed so far before
    /// inverting to distances, versus using only the current epoch (the
    /// default).
    ///
    /// Averaging happens in dB: the noise is additive Gaussian in dB, so the
    /// dB mean is the maximum-likelihood combination. No correction is
    /// applied for the lognormal bias this induces after inversion. Note
    /// that accumulation makes the baseline strictly stronger than the
    /// filter on long runs (its effective noise shrinks as 1/sqrt(epochs)
    /// while the filter's uniform re-injection bounds its memory), which is
    /// why per-epoch solves are the default comparison mode.
    pub accumulate: bool,
    pub optimizer: OptimizerConfig,
    pub initial_guess: InitialGuess,
}

/// A position fix from the least-squares solve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrilaterationFix {
    pub position: Point2,
    /// Residual sum of squares at the returned position.
    pub objective: f64,
    /// False when the optimizer stopped at its iteration cap.
    pub converged: bool,
    pub iterations: usize,
}

/// Sum of squared range residuals at `x`.
pub fn range_residual_sq(x: Point2, sensors: &[Point2], distances: &[f64]) -> f64 {
    sensors
        .iter()
        .zip(distances.iter())
        .map(|(&s, &d)| {
            let r = x.distance_to(s) - d;
            r * r
        })
        .sum()
}

/// Estimates the target position from one RSS value per sensor.
///
/// Distances come from [`invert_distance`]; the fit starts from the
/// configured initial guess. A non-converged optimizer still yields a fix,
/// flagged through [`TrilaterationFix::converged`].
pub fn trilaterate(
    sensors: &[Point2],
    rss: &[RssMeasurement],
    params: &PathLossParams,
    config: &TrilaterationConfig,
    area: SearchArea,
) -> Result<TrilaterationFix> {
    if sensors.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "trilateration requires at least 3 sensors for a 2D fix, got {}",
            sensors.len()
        )));
    }
    if rss.len() != sensors.len() {
        return Err(Error::InvalidConfig(format!(
            "need exactly one RSS value per sensor: {} sensors, {} measurements",
            sensors.len(),
            rss.len()
        )));
    }
    for (m, measurement) in rss.iter().enumerate() {
        if measurement.sensor_id != m {
            return Err(Error::InvalidConfig(format!(
                "RSS measurements must be in sensor order: index {m} carries sensor_id {}",
                measurement.sensor_id
            )));
        }
    }

    let distances: Vec<f64> = rss
        .iter()
        .map(|measurement| invert_distance(params, measurement.value_db))
        .collect();
    let x0 = match config.initial_guess {
        InitialGuess::SensorCentroid => sensor_centroid(sensors),
        InitialGuess::AreaCenter => area.center(),
        InitialGuess::Custom(p) => p,
    };
    let result = minimize(
        |x| range_residual_sq(x, sensors, &distances),
        x0,
        &config.optimizer,
    )?;
    Ok(TrilaterationFix {
        position: result.x_min,
        objective: result.f_min,
        converged: result.converged,
        iterations: result.iterations,
    })
}

fn sensor_centroid(sensors: &[Point2]) -> Point2 {
    let n = sensors.len() as f64;
    let (sx, sy) = sensors
        .iter()
        .fold((0.0, 0.0), |(sx, sy), s| (sx + s.x, sy + s.y));
    Point2::new(sx / n, sy / n)
}

/// Per-sensor arithmetic mean of every RSS value observed so far.
///
/// `history[m]` holds the dB values recorded at sensor `m`, one per epoch.
pub fn accumulate_rss(history: &[Vec<f64>]) -> Result<Vec<RssMeasurement>> {
    if history.is_empty() {
        return Err(Error::InvalidConfig("RSS history has no sensors".into()));
    }
    history
        .iter()
        .enumerate()
        .map(|(sensor_id, values)| {
            if values.is_empty() {
                return Err(Error::EmptyHistory { sensor_id });
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            Ok(RssMeasurement {
                sensor_id,
                value_db: mean,
            })
        })
        .collect()
}
