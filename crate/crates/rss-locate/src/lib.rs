//! Deterministic RSS-based localization of a stationary target.
//!
//! A transmitter at an unknown 2D position is observed by `M` sensors, each
//! recording received signal strength under a log-distance path-loss model
//! with Gaussian dB noise. Two estimators are implemented:
//!
//! - a **particle filter** — uniform initialization over the search area,
//!   Gaussian likelihood weighting, partial systematic resampling with
//!   uniform re-injection, mean-of-particles estimate;
//! - a **trilateration baseline** — per-sensor RSS-to-distance inversion
//!   followed by a Nelder–Mead nonlinear least-squares fit.
//!
//! The [`experiment`] module runs seeded Monte Carlo comparisons of the two
//! across sensor geometries and noise levels and writes plot-ready CSV.
//! Every random draw flows through per-(trial, epoch) derived streams, so
//! results are bit-reproducible regardless of thread count or execution
//! order.

pub mod defaults;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod nelder_mead;
pub mod particle_filter;
pub mod path_loss;
pub mod rng;
pub mod scenario;
pub mod stats;
pub mod trilateration;

pub use error::{Error, Result};
pub use experiment::{EpochRecord, ExperimentConfig, Method, SweepMetric, SweepSummary};
pub use geom::{Point2, SearchArea};
pub use nelder_mead::{OptimizerConfig, OptimizerResult};
pub use particle_filter::{ParticleSet, PfConfig, ResampleMode};
pub use path_loss::{PathLossParams, RssMeasurement};
pub use rng::SimRng;
pub use scenario::Scenario;
pub use trilateration::{InitialGuess, TrilaterationConfig, TrilaterationFix};
