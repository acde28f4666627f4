//! Particle filter for stationary-target RSS localization.
//!
//! The filter keeps `N` candidate positions with importance weights. One
//! epoch consists of three stages:
//!
//! 1. **Weighting** — each particle's weight is the Gaussian likelihood of
//!    the epoch's RSS measurements given the particle position, computed in
//!    the log domain with the max log-weight subtracted before
//!    exponentiation.
//! 2. **Resampling** — `round(rho * N)` particles are drawn from the
//!    weighted set (systematic resampling by default) and the remaining
//!    `N - round(rho * N)` are re-injected uniformly over the search area.
//!    Weights reset to `1/N`.
//! 3. **Estimation** — the position estimate is the unweighted mean of the
//!    combined post-resampling set.
//!
//! The target is stationary, so there is no motion or prediction stage;
//! initialization happens once per filter run.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point2, SearchArea};
use crate::path_loss::{predict_rss_guarded, PathLossParams, RssMeasurement, DEFAULT_EPSILON};
use crate::rng::SimRng;

/// How the retained fraction of particles is selected during resampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ResampleMode {
    /// Low-variance systematic draw proportional to weights (default).
    #[default]
    WeightedSystematic,
    /// Keep the highest-weight particles by rank, one copy each. Discards
    /// likelihood mass; kept for comparison runs only.
    RankTruncation,
}

/// Particle filter configuration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PfConfig {
    pub n_particles: usize,
    /// Fraction of the set regenerated from the weighted particles each
    /// epoch; the remainder is drawn uniformly from the area.
    pub rho: f64,
    /// Singularity guard for predicted particle RSS, meters.
    pub epsilon: f64,
    pub area: SearchArea,
    pub resample_mode: ResampleMode,
    /// Per-axis Gaussian roughening applied to weighted-resampled particles;
    /// zero disables it (the default — uniform re-injection already supplies
    /// diversity).
    pub jitter_std: f64,
}

impl PfConfig {
    pub fn new(n_particles: usize, rho: f64, area: SearchArea) -> Result<Self> {
        let config = Self {
            n_particles,
            rho,
            epsilon: DEFAULT_EPSILON,
            area,
            resample_mode: ResampleMode::default(),
            jitter_std: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidConfig("particle count must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!(
                "resampling ratio rho must be within [0, 1], got {}",
                self.rho
            )));
        }
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "guard epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.jitter_std < 0.0 || !self.jitter_std.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "jitter std must be >= 0, got {}",
                self.jitter_std
            )));
        }
        Ok(())
    }

    /// Number of weighted resampling draws: `round(rho * N)`, half-up.
    pub fn weighted_count(&self) -> usize {
        let count = (self.rho * self.n_particles as f64 + 0.5).floor() as usize;
        count.min(self.n_particles)
    }
}

/// `N` candidate positions with importance weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSet {
    pub positions: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl ParticleSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Normalized weights plus a flag marking a degenerate-weight fallback.
#[derive(Clone, Debug)]
pub struct WeightUpdate {
    /// Normalized weights, summing to one.
    pub weights: Vec<f64>,
    /// True when the likelihoods could not be normalized and uniform weights
    /// were substituted.
    pub degenerate: bool,
}

/// Uniformly seeds `N` particles over the search area, weight `1/N` each.
///
/// Performed once at the start of a filter run.
pub fn init_particles(config: &PfConfig, rng: &mut SimRng) -> ParticleSet {
    let n = config.n_particles;
    let positions = (0..n).map(|_| config.area.sample_uniform(rng)).collect();
    ParticleSet {
        positions,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Converts log-weights into normalized weights.
///
/// The maximum log-weight is subtracted before exponentiation, so a uniform
/// shift of every log-weight leaves the output unchanged. Falls back to
/// uniform weights (flagged) when the result cannot be normalized.
pub fn normalize_log_weights(log_weights: &[f64]) -> WeightUpdate {
    assert!(!log_weights.is_empty(), "cannot normalize an empty set");
    let n = log_weights.len();
    let uniform = || WeightUpdate {
        weights: vec![1.0 / n as f64; n],
        degenerate: true,
    };

    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return uniform();
    }
    let mut weights: Vec<f64> = log_weights.iter().map(|&lw| (lw - max).exp()).collect();
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        return uniform();
    }
    for w in &mut weights {
        *w /= sum;
    }
    WeightUpdate {
        weights,
        degenerate: false,
    }
}

/// Likelihood weighting of every particle against one epoch's measurements.
///
/// The weight of particle `i` is proportional to
/// `exp(-1/(2 sigma^2) * sum_m (measured_m - predicted_m(i))^2)` with the
/// guarded RSS prediction. Requires `measurements[m].sensor_id == m` covering
/// the whole sensor list, and `sigma_db > 0`.
pub fn compute_weights(
    set: &ParticleSet,
    measurements: &[RssMeasurement],
    sensors: &[Point2],
    params: &PathLossParams,
    epsilon: f64,
) -> WeightUpdate {
    assert!(!set.is_empty(), "particle set is empty");
    assert!(
        params.sigma_db > 0.0,
        "likelihood weighting requires sigma_db > 0"
    );
    assert_eq!(
        measurements.len(),
        sensors.len(),
        "need exactly one measurement per sensor"
    );
    for (m, measurement) in measurements.iter().enumerate() {
        assert_eq!(
            measurement.sensor_id, m,
            "measurements must be in sensor order"
        );
    }

    let inv_two_sigma_sq = 1.0 / (2.0 * params.sigma_db * params.sigma_db);
    let log_weights: Vec<f64> = set
        .positions
        .iter()
        .map(|&particle| {
            let mut residual_sq = 0.0;
            for (measurement, &sensor) in measurements.iter().zip(sensors.iter()) {
                let predicted = predict_rss_guarded(params, particle, sensor, epsilon);
                let r = measurement.value_db - predicted;
                residual_sq += r * r;
            }
            -residual_sq * inv_two_sigma_sq
        })
        .collect();
    normalize_log_weights(&log_weights)
}

/// Partial resampling with uniform re-injection.
///
/// Exactly `round(rho * N)` particles come from the weighted set and
/// `N - round(rho * N)` are drawn uniformly over the area; output weights are
/// reset to `1/N`. Draw order is fixed (systematic offset, optional jitter,
/// then uniform injections) so the output is a pure function of the inputs
/// and the RNG state.
pub fn resample(set: &ParticleSet, config: &PfConfig, rng: &mut SimRng) -> ParticleSet {
    let n = config.n_particles;
    assert_eq!(set.len(), n, "particle set size must match the configuration");
    let n_weighted = config.weighted_count();

    let mut positions = match config.resample_mode {
        ResampleMode::WeightedSystematic => systematic_draw(set, n_weighted, rng),
        ResampleMode::RankTruncation => rank_truncate(set, n_weighted),
    };
    if config.jitter_std > 0.0 {
        for p in &mut positions {
            p.x += config.jitter_std * rng.standard_normal();
            p.y += config.jitter_std * rng.standard_normal();
        }
    }
    for _ in n_weighted..n {
        positions.push(config.area.sample_uniform(rng));
    }

    ParticleSet {
        positions,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Systematic (low-variance) resampling: a single uniform offset over the
/// cumulative weight distribution.
fn systematic_draw(set: &ParticleSet, count: usize, rng: &mut SimRng) -> Vec<Point2> {
    if count == 0 {
        return Vec::new();
    }
    let step = 1.0 / count as f64;
    let offset = rng.uniform(0.0, step);
    let mut drawn = Vec::with_capacity(count);
    let mut index = 0;
    let mut cumulative = set.weights[0];
    for j in 0..count {
        let u = offset + j as f64 * step;
        while cumulative < u && index + 1 < set.len() {
            index += 1;
            cumulative += set.weights[index];
        }
        drawn.push(set.positions[index]);
    }
    drawn
}

/// Keeps the `count` highest-weight particles (ties broken by lower index).
fn rank_truncate(set: &ParticleSet, count: usize) -> Vec<Point2> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| {
        set.weights[b]
            .partial_cmp(&set.weights[a])
            .expect("weights are finite")
    });
    order.truncate(count);
    order.into_iter().map(|i| set.positions[i]).collect()
}

/// Position estimate: the unweighted arithmetic mean of all particles.
pub fn estimate(set: &ParticleSet) -> Point2 {
    assert!(!set.is_empty(), "cannot estimate from an empty set");
    let n = set.len() as f64;
    let (sx, sy) = set
        .positions
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2::new(sx / n, sy / n)
}

/// Outcome of one filter epoch.
#[derive(Clone, Debug)]
pub struct PfStep {
    pub particles: ParticleSet,
    pub estimate: Point2,
    /// True if this epoch's weights degenerated and uniform weights were used.
    pub degenerate_weights: bool,
}

/// One filter epoch: weight, resample, estimate.
pub fn pf_step(
    set: ParticleSet,
    measurements: &[RssMeasurement],
    sensors: &[Point2],
    params: &PathLossParams,
    config: &PfConfig,
    rng: &mut SimRng,
) -> PfStep {
    let update = compute_weights(&set, measurements, sensors, params, config.epsilon);
    let weighted = ParticleSet {
        positions: set.positions,
        weights: update.weights,
    };
    let resampled = resample(&weighted, config, rng);
    let position = estimate(&resampled);
    PfStep {
        particles: resampled,
        estimate: position,
        degenerate_weights: update.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_area() -> SearchArea {
        SearchArea::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap()
    }

    fn paper_area() -> SearchArea {
        SearchArea::new(Point2::new(-50.0, -50.0), Point2::new(50.0, 50.0)).unwrap()
    }

    fn square_sensors() -> Vec<Point2> {
        vec![
            Point2::new(40.0, 0.0),
            Point2::new(0.0, 40.0),
            Point2::new(-40.0, 0.0),
            Point2::new(0.0, -40.0),
        ]
    }

    #[test]
    fn init_respects_area_and_weights() {
        let config = PfConfig::new(4, 0.9, unit_area()).unwrap();
        let set = init_particles(&config, &mut SimRng::from_seed(5));
        assert_eq!(set.len(), 4);
        for p in &set.positions {
            assert!(config.area.contains(*p));
        }
        for w in &set.weights {
            assert_eq!(*w, 0.25);
        }
    }

    #[test]
    fn init_moments_match_uniform_distribution() {
        // Per-axis mean within 1.5 of 0 and variance within 10% of 100^2/12.
        let config = PfConfig::new(10_000, 0.9, paper_area()).unwrap();
        let set = init_particles(&config, &mut SimRng::from_seed(81));
        for axis in [0, 1] {
            let mut stats = crate::stats::RunningStats::new();
            for p in &set.positions {
                stats.push(if axis == 0 { p.x } else { p.y });
            }
            let expected_var = 100.0f64.powi(2) / 12.0;
            assert!(stats.mean().abs() < 1.5, "axis {axis} mean {}", stats.mean());
            assert!(
                (stats.sample_variance() - expected_var).abs() < 0.1 * expected_var,
                "axis {axis} variance {}",
                stats.sample_variance()
            );
        }
    }

    #[test]
    fn init_is_deterministic() {
        let config = PfConfig::new(64, 0.9, paper_area()).unwrap();
        let a = init_particles(&config, &mut SimRng::from_seed(17));
        let b = init_particles(&config, &mut SimRng::from_seed(17));
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_count_rounds_half_up() {
        let area = unit_area();
        let count = |n: usize, rho: f64| PfConfig::new(n, rho, area).unwrap().weighted_count();
        assert_eq!(count(10, 0.9), 9);
        assert_eq!(count(10, 0.95), 10);
        assert_eq!(count(2, 0.25), 1);
        assert_eq!(count(10, 0.0), 0);
        assert_eq!(count(10, 1.0), 10);
    }

    #[test]
    fn zero_residual_particle_gets_max_weight() {
        let params = PathLossParams::new(-30.0, 2.5, 5.0).unwrap();
        let sensors = square_sensors();
        let target = Point2::new(3.0, -4.0);
        let measurements: Vec<RssMeasurement> = sensors
            .iter()
            .enumerate()
            .map(|(sensor_id, &s)| RssMeasurement {
                sensor_id,
                // Guarded prediction so the matching particle has residual 0.
                value_db: predict_rss_guarded(&params, target, s, DEFAULT_EPSILON),
            })
            .collect();
        let set = ParticleSet {
            positions: vec![target, Point2::new(10.0, 10.0), Point2::new(-20.0, 5.0)],
            weights: vec![1.0 / 3.0; 3],
        };
        let update = compute_weights(&set, &measurements, &sensors, &params, DEFAULT_EPSILON);
        assert!(!update.degenerate);
        assert!(update.weights[0] > update.weights[1]);
        assert!(update.weights[0] > update.weights[2]);
    }

    #[test]
    fn one_sigma_residual_weight_ratio() {
        // Single sensor; particle B's prediction is exactly sigma away from
        // the measurement, so its weight relative to a zero-residual particle
        // is exp(-1/2).
        let params = PathLossParams::new(-30.0, 2.5, 5.0).unwrap();
        let sensor = Point2::new(0.0, 0.0);
        let d_a = 10.0;
        let particle_a = Point2::new(d_a, 0.0);
        let measured = predict_rss_guarded(&params, particle_a, sensor, DEFAULT_EPSILON);
        // Position whose guarded prediction is measured - sigma.
        let d_b = 10f64.powf((params.p0_db - (measured - params.sigma_db)) / (10.0 * params.beta))
            - DEFAULT_EPSILON;
        let particle_b = Point2::new(d_b, 0.0);
        let set = ParticleSet {
            positions: vec![particle_a, particle_b],
            weights: vec![0.5, 0.5],
        };
        let measurements = [RssMeasurement {
            sensor_id: 0,
            value_db: measured,
        }];
        let update = compute_weights(&set, &measurements, &[sensor], &params, DEFAULT_EPSILON);
        let ratio = update.weights[1] / update.weights[0];
        assert!(
            (ratio - (-0.5f64).exp()).abs() < 1e-9,
            "ratio {ratio} vs exp(-1/2)"
        );
    }

    #[test]
    fn two_particle_weights_match_hand_evaluation() {
        // Residual sums 0 and 2 sigma^2 normalize to
        // (1/(1+e^-1), e^-1/(1+e^-1)).
        let params = PathLossParams::new(-30.0, 2.5, 5.0).unwrap();
        let sensor = Point2::new(0.0, 0.0);
        let particle_a = Point2::new(20.0, 0.0);
        let measured = predict_rss_guarded(&params, particle_a, sensor, DEFAULT_EPSILON);
        let offset = params.sigma_db * 2f64.sqrt();
        let d_b = 10f64.powf((params.p0_db - (measured - offset)) / (10.0 * params.beta))
            - DEFAULT_EPSILON;
        let set = ParticleSet {
            positions: vec![particle_a, Point2::new(d_b, 0.0)],
            weights: vec![0.5, 0.5],
        };
        let measurements = [RssMeasurement {
            sensor_id: 0,
            value_db: measured,
        }];
        let update = compute_weights(&set, &measurements, &[sensor], &params, DEFAULT_EPSILON);
        let e_inv = (-1.0f64).exp();
        let expected = [1.0 / (1.0 + e_inv), e_inv / (1.0 + e_inv)];
        for (got, want) in update.weights.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
        }
    }

    #[test]
    fn degenerate_log_weights_fall_back_to_uniform() {
        let update = normalize_log_weights(&[f64::NEG_INFINITY, f64::NEG_INFINITY]);
        assert!(update.degenerate);
        assert_eq!(update.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn resample_rho_one_with_point_mass() {
        let area = paper_area();
        let config = PfConfig::new(50, 1.0, area).unwrap();
        let winner = Point2::new(12.0, -34.0);
        let mut positions = vec![Point2::new(0.0, 0.0); 50];
        positions[17] = winner;
        let mut weights = vec![0.0; 50];
        weights[17] = 1.0;
        let set = ParticleSet { positions, weights };
        let out = resample(&set, &config, &mut SimRng::from_seed(1));
        assert_eq!(out.len(), 50);
        for p in &out.positions {
            assert_eq!(*p, winner);
        }
    }

    #[test]
    fn resample_rho_zero_ignores_input_positions() {
        let config = PfConfig::new(32, 0.0, paper_area()).unwrap();
        let set_a = ParticleSet {
            positions: vec![Point2::new(1.0, 2.0); 32],
            weights: vec![1.0 / 32.0; 32],
        };
        let set_b = ParticleSet {
            positions: vec![Point2::new(-40.0, 13.0); 32],
            weights: vec![1.0 / 32.0; 32],
        };
        let out_a = resample(&set_a, &config, &mut SimRng::from_seed(99));
        let out_b = resample(&set_b, &config, &mut SimRng::from_seed(99));
        assert_eq!(out_a, out_b);
        for p in &out_a.positions {
            assert!(config.area.contains(*p));
        }
    }

    #[test]
    fn resample_partial_counts() {
        // N=10, rho=0.9: 9 weighted draws plus 1 uniform injection.
        let config = PfConfig::new(10, 0.9, paper_area()).unwrap();
        let winner = Point2::new(7.0, 7.0);
        let mut positions = vec![Point2::new(-1.0, -1.0); 10];
        positions[3] = winner;
        let mut weights = vec![0.0; 10];
        weights[3] = 1.0;
        let set = ParticleSet { positions, weights };
        let out = resample(&set, &config, &mut SimRng::from_seed(4));
        assert_eq!(out.len(), 10);
        let copies = out.positions.iter().filter(|p| **p == winner).count();
        assert_eq!(copies, 9);
        for w in &out.weights {
            assert_eq!(*w, 0.1);
        }
    }

    #[test]
    fn rank_truncation_keeps_top_weights() {
        let config = PfConfig {
            resample_mode: ResampleMode::RankTruncation,
            ..PfConfig::new(4, 0.5, paper_area()).unwrap()
        };
        let set = ParticleSet {
            positions: vec![
                Point2::new(1.0, 0.0),
                Point2::new(2.0, 0.0),
                Point2::new(3.0, 0.0),
                Point2::new(4.0, 0.0),
            ],
            weights: vec![0.1, 0.4, 0.2, 0.3],
        };
        let out = resample(&set, &config, &mut SimRng::from_seed(0));
        // round(0.5 * 4) = 2 retained: indices 1 and 3 by weight rank.
        assert_eq!(out.positions[0], Point2::new(2.0, 0.0));
        assert_eq!(out.positions[1], Point2::new(4.0, 0.0));
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn estimate_examples() {
        let set = ParticleSet {
            positions: vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)],
            weights: vec![0.5, 0.5],
        };
        assert_eq!(estimate(&set), Point2::new(1.0, 0.0));

        let single = ParticleSet {
            positions: vec![Point2::new(-3.0, 7.0)],
            weights: vec![1.0],
        };
        assert_eq!(estimate(&single), Point2::new(-3.0, 7.0));

        let corners = ParticleSet {
            positions: vec![
                Point2::new(1.0, 1.0),
                Point2::new(-1.0, 1.0),
                Point2::new(1.0, -1.0),
                Point2::new(-1.0, -1.0),
            ],
            weights: vec![0.25; 4],
        };
        assert_eq!(estimate(&corners), Point2::new(0.0, 0.0));
    }

    #[test]
    fn pf_step_is_deterministic() {
        let params = PathLossParams::new(-30.0, 2.5, 5.0).unwrap();
        let sensors = square_sensors();
        let target = Point2::new(5.0, 5.0);
        let config = PfConfig::new(200, 0.9, paper_area()).unwrap();

        let run = || {
            let mut init_rng = SimRng::from_seed(7);
            let mut set = init_particles(&config, &mut init_rng);
            let mut est = Point2::new(0.0, 0.0);
            for epoch in 0..5u64 {
                let mut meas_rng = SimRng::stream(13, &[epoch]);
                let measurements =
                    crate::path_loss::sample_measurements(&params, target, &sensors, &mut meas_rng)
                        .unwrap();
                let mut step_rng = SimRng::stream(29, &[epoch]);
                let step = pf_step(set, &measurements, &sensors, &params, &config, &mut step_rng);
                set = step.particles;
                est = step.estimate;
            }
            (set, est)
        };
        let (set_a, est_a) = run();
        let (set_b, est_b) = run();
        assert_eq!(set_a, set_b);
        assert_eq!(est_a, est_b);
    }

    proptest! {
        #[test]
        fn log_normalization_is_shift_invariant(
            raw in proptest::collection::vec(-80.0..0.0f64, 1..20),
            shift in -50.0..50.0f64,
        ) {
            let shifted: Vec<f64> = raw.iter().map(|lw| lw + shift).collect();
            let a = normalize_log_weights(&raw);
            let b = normalize_log_weights(&shifted);
            for (wa, wb) in a.weights.iter().zip(b.weights.iter()) {
                prop_assert!((wa - wb).abs() < 1e-9);
            }
        }

        #[test]
        fn normalized_weights_sum_to_one(
            raw in proptest::collection::vec(-200.0..0.0f64, 1..50),
        ) {
            let update = normalize_log_weights(&raw);
            let sum: f64 = update.weights.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(update.weights.iter().all(|w| *w >= 0.0));
        }

        #[test]
        fn resample_conserves_count_and_containment(
            n in 1..200usize,
            rho in 0.0..=1.0f64,
            seed in 0..1000u64,
        ) {
            let config = PfConfig::new(n, rho, paper_area()).unwrap();
            let mut rng = SimRng::from_seed(seed);
            let init = init_particles(&config, &mut rng);
            prop_assert_eq!(init.len(), n);
            let weights = normalize_log_weights(
                &(0..n).map(|i| -(i as f64) * 0.1).collect::<Vec<_>>(),
            );
            let weighted = ParticleSet { positions: init.positions.clone(), weights: weights.weights };
            let out = resample(&weighted, &config, &mut rng);
            prop_assert_eq!(out.len(), n);
            for p in &out.positions {
                prop_assert!(config.area.contains(*p));
            }
            let sum: f64 = out.weights.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}
