//! Log-distance path-loss model.
//!
//! A sensor at distance `d` from the transmitter observes
//!
//! ```text
//! rss_db = p0_db - 10 * beta * log10(d) + v,    v ~ N(0, sigma_db^2)
//! ```
//!
//! where `p0_db` is the reference RSS at 1 m, `beta` the path-loss exponent
//! and `v` i.i.d. Gaussian measurement noise in dB. The model is invertible:
//! a measured RSS maps back to a distance estimate via [`invert_distance`].
//!
//! [`predict_rss_guarded`] adds a small constant to the distance inside the
//! logarithm so that candidate positions sitting exactly on a sensor still
//! produce a finite prediction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::rng::SimRng;

/// Default singularity guard for predicted particle RSS, in meters.
///
/// Far below any meaningful inter-point distance at the 100 m scenario
/// scale, yet keeps the logarithm finite at zero distance.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Parameters of the log-distance path-loss model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathLossParams {
    /// Reference RSS at 1 m, in dB.
    pub p0_db: f64,
    /// Path-loss exponent (2 in free space, larger indoors).
    pub beta: f64,
    /// Standard deviation of the measurement noise, in dB.
    pub sigma_db: f64,
}

impl PathLossParams {
    pub fn new(p0_db: f64, beta: f64, sigma_db: f64) -> Result<Self> {
        let params = Self {
            p0_db,
            beta,
            sigma_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p0_db.is_finite() || !self.beta.is_finite() || !self.sigma_db.is_finite() {
            return Err(Error::InvalidConfig(
                "path-loss parameters must be finite".into(),
            ));
        }
        if self.beta <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "path-loss exponent beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.sigma_db < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be >= 0, got {}",
                self.sigma_db
            )));
        }
        Ok(())
    }

    /// Copy of the parameters with a different noise level.
    pub fn with_sigma(&self, sigma_db: f64) -> Self {
        Self { sigma_db, ..*self }
    }
}

/// A single RSS observation attributed to a sensor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RssMeasurement {
    /// Index into the scenario's sensor list.
    pub sensor_id: usize,
    /// Measured RSS in dB.
    pub value_db: f64,
}

/// Noiseless RSS at `sensor` for a transmitter at `target`.
///
/// Errors when the two points coincide; particle evaluation should use
/// [`predict_rss_guarded`] instead.
pub fn predict_rss(params: &PathLossParams, target: Point2, sensor: Point2) -> Result<f64> {
    let d = target.distance_to(sensor);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(params.p0_db - 10.0 * params.beta * d.log10())
}

/// Noiseless RSS prediction with the singularity guard: `log10(d + epsilon)`.
///
/// Finite for every candidate position, including one sitting exactly on the
/// sensor.
pub fn predict_rss_guarded(
    params: &PathLossParams,
    particle: Point2,
    sensor: Point2,
    epsilon: f64,
) -> f64 {
    debug_assert!(epsilon > 0.0, "guard epsilon must be positive");
    let d = particle.distance_to(sensor);
    params.p0_db - 10.0 * params.beta * (d + epsilon).log10()
}

/// One noisy measurement per sensor.
///
/// Consumes exactly one standard-normal draw per sensor, in sensor order,
/// so a given stream always yields the same measurement set.
pub fn sample_measurements(
    params: &PathLossParams,
    target: Point2,
    sensors: &[Point2],
    rng: &mut SimRng,
) -> Result<Vec<RssMeasurement>> {
    if sensors.is_empty() {
        return Err(Error::InvalidConfig("sensor list is empty".into()));
    }
    sensors
        .iter()
        .enumerate()
        .map(|(sensor_id, &sensor)| {
            let noiseless = predict_rss(params, target, sensor)
                .map_err(|_| Error::CoincidentSensor { sensor_id })?;
            let z = rng.standard_normal();
            Ok(RssMeasurement {
                sensor_id,
                value_db: noiseless + params.sigma_db * z,
            })
        })
        .collect()
}

/// Distance estimate recovered from a measured RSS:
/// `10^((p0_db - rss_db) / (10 * beta))`. Strictly positive for finite input.
pub fn invert_distance(params: &PathLossParams, rss_db: f64) -> f64 {
    10f64.powf((params.p0_db - rss_db) / (10.0 * params.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper_params() -> PathLossParams {
        PathLossParams::new(-30.0, 2.5, 5.0).unwrap()
    }

    fn at_distance(d: f64) -> (Point2, Point2) {
        (Point2::new(0.0, 0.0), Point2::new(d, 0.0))
    }

    #[test]
    fn predict_at_reference_distances() {
        let params = paper_params();
        for (d, expected) in [(1.0, -30.0), (10.0, -55.0), (100.0, -80.0)] {
            let (target, sensor) = at_distance(d);
            let rss = predict_rss(&params, target, sensor).unwrap();
            assert!(
                (rss - expected).abs() < 1e-12,
                "d={d}: got {rss}, expected {expected}"
            );
        }
    }

    #[test]
    fn predict_rejects_coincident_points() {
        let p = Point2::new(3.0, -7.0);
        let err = predict_rss(&paper_params(), p, p).unwrap_err();
        assert!(matches!(err, Error::CoincidentPoints));
    }

    #[test]
    fn guarded_is_finite_at_zero_distance() {
        let p = Point2::new(1.0, 1.0);
        // -30 - 25 * log10(1e-6) = +120 dB
        let rss = predict_rss_guarded(&paper_params(), p, p, 1e-6);
        assert!((rss - 120.0).abs() < 1e-9);
    }

    #[test]
    fn guarded_tracks_unguarded_away_from_sensor() {
        // The gap is exactly 10 * beta * log10(1 + eps/d): about 1.1e-5 dB at
        // d=1 and 1.1e-6 dB at d=10 for beta=2.5, eps=1e-6.
        let params = paper_params();
        for (d, ceiling) in [(1.0, 1.2e-5), (10.0, 1.2e-6)] {
            let (target, sensor) = at_distance(d);
            let plain = predict_rss(&params, target, sensor).unwrap();
            let guarded = predict_rss_guarded(&params, target, sensor, 1e-6);
            let gap = (plain - guarded).abs();
            let analytic = 10.0 * params.beta * (1.0 + 1e-6 / d).log10();
            assert!((gap - analytic).abs() < 1e-12, "d={d}: gap {gap} vs {analytic}");
            assert!(gap < ceiling, "d={d}");
        }
    }

    #[test]
    fn zero_sigma_sampling_is_exact() {
        let params = PathLossParams::new(-30.0, 2.5, 0.0).unwrap();
        let target = Point2::new(5.0, -2.0);
        let sensors = [
            Point2::new(40.0, 0.0),
            Point2::new(0.0, 40.0),
            Point2::new(-40.0, 0.0),
        ];
        let mut rng = SimRng::from_seed(1);
        let measurements = sample_measurements(&params, target, &sensors, &mut rng).unwrap();
        for m in &measurements {
            let expected = predict_rss(&params, target, sensors[m.sensor_id]).unwrap();
            assert!(m.value_db == expected, "sensor {}", m.sensor_id);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let params = paper_params();
        let target = Point2::new(0.0, 0.0);
        let sensors = [Point2::new(40.0, 0.0), Point2::new(0.0, 40.0)];
        let a = sample_measurements(&params, target, &sensors, &mut SimRng::from_seed(9)).unwrap();
        let b = sample_measurements(&params, target, &sensors, &mut SimRng::from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_consumes_one_draw_per_sensor() {
        // Exactly M normal draws, even at sigma = 0, so downstream stream
        // positions never depend on the noise level.
        let params = PathLossParams::new(-30.0, 2.5, 0.0).unwrap();
        let target = Point2::new(0.0, 0.0);
        let sensors = [
            Point2::new(40.0, 0.0),
            Point2::new(0.0, 40.0),
            Point2::new(-40.0, 0.0),
        ];
        let mut rng = SimRng::from_seed(42);
        sample_measurements(&params, target, &sensors, &mut rng).unwrap();
        let next_after_sampling = rng.standard_normal();

        let mut reference = SimRng::from_seed(42);
        for _ in 0..sensors.len() {
            reference.standard_normal();
        }
        assert_eq!(next_after_sampling, reference.standard_normal());
    }

    #[test]
    fn sampling_rejects_coincident_sensor() {
        let params = paper_params();
        let target = Point2::new(1.0, 2.0);
        let sensors = [Point2::new(40.0, 0.0), target];
        let err = sample_measurements(&params, target, &sensors, &mut SimRng::from_seed(0))
            .unwrap_err();
        assert!(matches!(err, Error::CoincidentSensor { sensor_id: 1 }));
    }

    #[test]
    fn sampling_rejects_empty_sensor_list() {
        let err = sample_measurements(
            &paper_params(),
            Point2::new(0.0, 0.0),
            &[],
            &mut SimRng::from_seed(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn noise_statistics_converge() {
        // 10^4 draws at a single sensor: sample mean within 0.2 dB of the
        // noiseless value and sample std within 0.2 dB of sigma.
        let params = paper_params();
        let (target, sensor) = at_distance(25.0);
        let noiseless = predict_rss(&params, target, sensor).unwrap();
        let mut rng = SimRng::from_seed(2024);
        let mut stats = crate::stats::RunningStats::new();
        for _ in 0..10_000 {
            let m = sample_measurements(&params, target, &[sensor], &mut rng).unwrap();
            stats.push(m[0].value_db);
        }
        assert!((stats.mean() - noiseless).abs() < 0.2);
        assert!((stats.sample_std() - params.sigma_db).abs() < 0.2);
    }

    #[test]
    fn invert_reference_values() {
        let params = paper_params();
        assert!((invert_distance(&params, -30.0) - 1.0).abs() < 1e-12);
        assert!((invert_distance(&params, -55.0) - 10.0).abs() < 1e-11);
    }

    #[test]
    fn invert_roundtrips_prediction() {
        let params = paper_params();
        for d in [0.5, 3.0, 47.0, 120.0] {
            let (target, sensor) = at_distance(d);
            let rss = predict_rss(&params, target, sensor).unwrap();
            let recovered = invert_distance(&params, rss);
            assert!(
                (recovered - d).abs() <= 1e-12 * d,
                "d={d}, recovered={recovered}"
            );
        }
    }

    #[test]
    fn params_validation() {
        assert!(PathLossParams::new(-30.0, 0.0, 5.0).is_err());
        assert!(PathLossParams::new(-30.0, -1.0, 5.0).is_err());
        assert!(PathLossParams::new(-30.0, 2.5, -0.1).is_err());
        assert!(PathLossParams::new(f64::NAN, 2.5, 5.0).is_err());
        assert!(PathLossParams::new(-30.0, 2.5, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn prediction_decreases_with_distance(
            p0 in -60.0..-10.0f64,
            beta in 1.5..4.0f64,
            d1 in 0.1..200.0f64,
            factor in 1.001..10.0f64,
        ) {
            let params = PathLossParams::new(p0, beta, 0.0).unwrap();
            let (t1, s1) = at_distance(d1);
            let (t2, s2) = at_distance(d1 * factor);
            prop_assert!(
                predict_rss(&params, t1, s1).unwrap() > predict_rss(&params, t2, s2).unwrap()
            );
        }

        #[test]
        fn guard_gap_is_bounded(
            beta in 1.5..4.0f64,
            d in 0.01..200.0f64,
            eps_exp in -9.0..-3.0f64,
        ) {
            let epsilon = 10f64.powf(eps_exp);
            let params = PathLossParams::new(-30.0, beta, 0.0).unwrap();
            let (target, sensor) = at_distance(d);
            let gap = (predict_rss(&params, target, sensor).unwrap()
                - predict_rss_guarded(&params, target, sensor, epsilon))
            .abs();
            let bound = 10.0 * beta * (1.0 + epsilon / d).log10();
            prop_assert!(gap <= bound + 1e-9, "gap {gap} exceeds bound {bound}");
        }

        #[test]
        fn roundtrip_over_random_params(
            p0 in -60.0..-10.0f64,
            beta in 1.5..4.0f64,
            d in 0.1..200.0f64,
        ) {
            let params = PathLossParams::new(p0, beta, 0.0).unwrap();
            let (target, sensor) = at_distance(d);
            let rss = predict_rss(&params, target, sensor).unwrap();
            let recovered = invert_distance(&params, rss);
            prop_assert!((recovered - d).abs() <= 1e-11 * d);
        }
    }
}
