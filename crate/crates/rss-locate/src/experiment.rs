//! Monte Carlo experiment harness.
//!
//! Runs paired trials of the particle filter and the trilateration baseline
//! over a scenario, collects per-epoch localization errors, aggregates noise
//! sweeps, and writes deterministic CSV output.
//!
//! Within a trial, both estimators consume the identical measurement set
//! each epoch (a paired design), and every (trial, epoch) pair owns its own
//! derived RNG stream, so trials can run in any order on any number of
//! threads without changing a single output byte.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::particle_filter::{self as pf, PfConfig};
use crate::path_loss::{sample_measurements, PathLossParams};
use crate::rng::{derive_seed, SimRng};
use crate::scenario::Scenario;
use crate::stats::RunningStats;
use crate::trilateration::{accumulate_rss, trilaterate, TrilaterationConfig};

// Stream purpose tags for per-(trial, epoch) seed derivation.
const STREAM_PF_INIT: u64 = 1;
const STREAM_MEASURE: u64 = 2;
const STREAM_RESAMPLE: u64 = 3;

/// Likelihood kernel width substituted when the simulated noise is exactly
/// zero: the Gaussian weight of Eq.-style likelihoods is undefined at
/// sigma = 0, so zero-noise runs weight with this sigma instead.
pub const ZERO_NOISE_WEIGHT_SIGMA_DB: f64 = 1.0;

/// Estimator identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Method {
    #[serde(rename = "pf")]
    ParticleFilter,
    #[serde(rename = "tri")]
    Trilateration,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::ParticleFilter, Method::Trilateration];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ParticleFilter => "pf",
            Method::Trilateration => "tri",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pf" | "particle_filter" => Ok(Method::ParticleFilter),
            "tri" | "trilateration" => Ok(Method::Trilateration),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected pf or tri)"
            ))),
        }
    }
}

/// Which per-trial statistic the noise sweep aggregates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SweepMetric {
    /// Mean localization error over all epochs of the trial (default).
    #[default]
    MeanOverEpochs,
    /// Error at the final epoch only.
    FinalEpoch,
}

/// Full description of one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: PathLossParams,
    pub pf: PfConfig,
    pub tri: TrilaterationConfig,
    pub epochs: usize,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Likelihood sigma override for the filter. `None` weights with the
    /// simulation sigma (matched filter), substituting
    /// [`ZERO_NOISE_WEIGHT_SIGMA_DB`] when that is zero.
    pub weight_sigma_db: Option<f64>,
    pub sweep_metric: SweepMetric,
}

impl ExperimentConfig {
    /// Baseline configuration for a scenario: default parameters, both
    /// estimators, per-epoch trilateration.
    pub fn baseline(scenario: Scenario, seed: u64) -> Self {
        let params = PathLossParams {
            p0_db: crate::defaults::P0_DB,
            beta: crate::defaults::BETA,
            sigma_db: crate::defaults::SIGMA_DB,
        };
        let pf = PfConfig::new(crate::defaults::PARTICLES, crate::defaults::RHO, scenario.area())
            .expect("default filter config is valid");
        Self {
            scenario,
            params,
            pf,
            tri: TrilaterationConfig::default(),
            epochs: crate::defaults::EPOCHS,
            trials: crate::defaults::TRIALS,
            seed,
            methods: Method::ALL.to_vec(),
            weight_sigma_db: None,
            sweep_metric: SweepMetric::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.pf.validate()?;
        self.tri.optimizer.validate()?;
        if self.pf.area != self.scenario.area() {
            return Err(Error::InvalidConfig(
                "particle filter search area must match the scenario area".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one method must be enabled".into(),
            ));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("duplicate method '{m}'")));
            }
        }
        if let Some(sigma) = self.weight_sigma_db {
            if sigma <= 0.0 || !sigma.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "weight sigma override must be > 0, got {sigma}"
                )));
            }
        }
        Ok(())
    }

    pub fn method_enabled(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    /// Parameters used for likelihood weighting.
    fn weighting_params(&self) -> PathLossParams {
        let sigma = self.weight_sigma_db.unwrap_or(self.params.sigma_db);
        let sigma = if sigma > 0.0 {
            sigma
        } else {
            ZERO_NOISE_WEIGHT_SIGMA_DB
        };
        self.params.with_sigma(sigma)
    }
}

/// One method's localization error in one epoch of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub sigma_db: f64,
    /// Trial index, 0-based.
    pub trial: usize,
    /// Epoch index, 1-based.
    pub epoch: usize,
    pub method: Method,
    /// Euclidean distance between estimate and truth, meters.
    pub error_m: f64,
    /// Trilateration: optimizer convergence. Particle filter: true unless
    /// the epoch's weights degenerated to the uniform fallback.
    pub converged: bool,
    /// Derived seed of this (trial, epoch) measurement stream.
    pub seed: u64,
}

/// Per-(noise level, method) aggregate across trials.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepSummary {
    pub sigma_db: f64,
    pub method: Method,
    pub mean_error_m: f64,
    pub std_error_m: f64,
    pub trials: usize,
}

/// Runs one trial: the filter is initialized once, then every epoch samples
/// a fresh measurement set shared by both estimators.
///
/// Deterministic in `(config.seed, trial)`; trials may execute in any order.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<Vec<EpochRecord>> {
    config.validate()?;
    let scenario = &config.scenario;
    let sensors = scenario.sensors();
    let target = scenario.target();
    let weight_params = config.weighting_params();
    let run_pf = config.method_enabled(Method::ParticleFilter);
    let run_tri = config.method_enabled(Method::Trilateration);

    let mut particles = if run_pf {
        let mut init_rng = SimRng::stream(config.seed, &[trial as u64, 0, STREAM_PF_INIT]);
        Some(pf::init_particles(&config.pf, &mut init_rng))
    } else {
        None
    };
    let mut rss_history: Vec<Vec<f64>> = vec![Vec::new(); sensors.len()];

    let mut records = Vec::with_capacity(config.epochs * config.methods.len());
    for epoch in 1..=config.epochs {
        let measure_seed = derive_seed(config.seed, &[trial as u64, epoch as u64, STREAM_MEASURE]);
        let mut measure_rng = SimRng::from_seed(measure_seed);
        let measurements = sample_measurements(&config.params, target, sensors, &mut measure_rng)?;

        if let Some(set) = particles.take() {
            let mut step_rng =
                SimRng::stream(config.seed, &[trial as u64, epoch as u64, STREAM_RESAMPLE]);
            let step = pf::pf_step(
                set,
                &measurements,
                sensors,
                &weight_params,
                &config.pf,
                &mut step_rng,
            );
            records.push(EpochRecord {
                sigma_db: config.params.sigma_db,
                trial,
                epoch,
                method: Method::ParticleFilter,
                error_m: step.estimate.distance_to(target),
                converged: !step.degenerate_weights,
                seed: measure_seed,
            });
            particles = Some(step.particles);
        }

        if run_tri {
            for m in &measurements {
                rss_history[m.sensor_id].push(m.value_db);
            }
            let rss = if config.tri.accumulate {
                accumulate_rss(&rss_history)?
            } else {
                measurements.clone()
            };
            let fix = trilaterate(sensors, &rss, &config.params, &config.tri, scenario.area())?;
            records.push(EpochRecord {
                sigma_db: config.params.sigma_db,
                trial,
                epoch,
                method: Method::Trilateration,
                error_m: fix.position.distance_to(target),
                converged: fix.converged,
                seed: measure_seed,
            });
        }
    }
    Ok(records)
}

/// Runs every trial (in parallel when a rayon pool is available) and
/// concatenates the records in trial order.
pub fn run_epoch_experiment(config: &ExperimentConfig) -> Result<Vec<EpochRecord>> {
    config.validate()?;
    let per_trial: Vec<Vec<EpochRecord>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Runs the epoch experiment once per noise level and aggregates each into
/// per-method summaries.
pub fn run_noise_sweep(config: &ExperimentConfig, sigmas: &[f64]) -> Result<Vec<SweepSummary>> {
    if sigmas.is_empty() {
        return Err(Error::InvalidConfig(
            "noise sweep requires at least one sigma".into(),
        ));
    }
    for &sigma in sigmas {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sweep sigma must be >= 0, got {sigma}"
            )));
        }
    }
    let mut summaries = Vec::with_capacity(sigmas.len() * config.methods.len());
    for &sigma in sigmas {
        let mut sweep_config = config.clone();
        sweep_config.params.sigma_db = sigma;
        let records = run_epoch_experiment(&sweep_config)?;
        summaries.extend(summarize_records(&records, sweep_config.sweep_metric));
    }
    Ok(summaries)
}

/// Collapses epoch records into per-(sigma, method) summaries.
///
/// Each trial contributes one value (its metric over epochs); the summary
/// reports mean and sample standard deviation of those values across trials.
/// Output rows are ordered by ascending sigma, then method.
pub fn summarize_records(records: &[EpochRecord], metric: SweepMetric) -> Vec<SweepSummary> {
    #[derive(Default)]
    struct TrialAgg {
        sum: f64,
        count: usize,
        last_epoch: usize,
        last_error: f64,
    }

    // f64 keys ordered via to_bits: valid for the non-negative sigmas used here.
    let mut groups: BTreeMap<(u64, Method), BTreeMap<usize, TrialAgg>> = BTreeMap::new();
    for record in records {
        let agg = groups
            .entry((record.sigma_db.to_bits(), record.method))
            .or_default()
            .entry(record.trial)
            .or_default();
        agg.sum += record.error_m;
        agg.count += 1;
        if record.epoch >= agg.last_epoch {
            agg.last_epoch = record.epoch;
            agg.last_error = record.error_m;
        }
    }

    groups
        .into_iter()
        .map(|((sigma_bits, method), trials)| {
            let mut stats = RunningStats::new();
            for agg in trials.values() {
                let value = match metric {
                    SweepMetric::MeanOverEpochs => agg.sum / agg.count as f64,
                    SweepMetric::FinalEpoch => agg.last_error,
                };
                stats.push(value);
            }
            SweepSummary {
                sigma_db: f64::from_bits(sigma_bits),
                method,
                mean_error_m: stats.mean(),
                std_error_m: stats.sample_std(),
                trials: stats.count() as usize,
            }
        })
        .collect()
}

/// Sorts records by the canonical output key (sigma, trial, epoch, method).
pub fn sort_records(records: &mut [EpochRecord]) {
    records.sort_by(|a, b| {
        a.sigma_db
            .total_cmp(&b.sigma_db)
            .then_with(|| a.trial.cmp(&b.trial))
            .then_with(|| a.epoch.cmp(&b.epoch))
            .then_with(|| a.method.cmp(&b.method))
    });
}

/// A row type with a fixed CSV schema.
pub trait CsvRecord {
    fn csv_header() -> &'static str;
    fn write_csv_row<W: Write>(&self, w: &mut W) -> std::io::Result<()>;
}

/// Floats in CSV output carry 9 significant digits.
fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

impl CsvRecord for EpochRecord {
    fn csv_header() -> &'static str {
        "sigma_db,trial,epoch,method,error_m,converged,seed"
    }

    fn write_csv_row<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_float(self.sigma_db),
            self.trial,
            self.epoch,
            self.method,
            fmt_float(self.error_m),
            self.converged,
            self.seed
        )
    }
}

impl CsvRecord for SweepSummary {
    fn csv_header() -> &'static str {
        "sigma_db,method,mean_error_m,std_error_m,trials"
    }

    fn write_csv_row<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(self.sigma_db),
            self.method,
            fmt_float(self.mean_error_m),
            fmt_float(self.std_error_m),
            self.trials
        )
    }
}

/// Metadata lines embedded in every CSV as `#`-prefixed comments.
///
/// Thread counts and output paths are deliberately excluded: identical
/// configurations must produce identical bytes regardless of how and where
/// they ran.
pub fn metadata_lines(config: &ExperimentConfig, extra: &[String]) -> Vec<String> {
    let mut lines = vec![
        format!("generator = rss-locate {}", env!("CARGO_PKG_VERSION")),
        format!(
            "config = {}",
            serde_json::to_string(config).expect("config serializes")
        ),
    ];
    lines.extend_from_slice(extra);
    lines
}

/// Writes metadata comments, a header row, and one line per record.
/// Output bytes are a pure function of the inputs.
pub fn write_csv<T: CsvRecord>(rows: &[T], metadata: &[String], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        context: "creating output file",
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = BufWriter::new(file);
    write_csv_to(rows, metadata, &mut writer).map_err(|source| Error::Io {
        context: "writing output file",
        path: path.to_path_buf(),
        source,
    })?;
    writer.flush().map_err(|source| Error::Io {
        context: "flushing output file",
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv_to<T: CsvRecord, W: Write>(
    rows: &[T],
    metadata: &[String],
    w: &mut W,
) -> std::io::Result<()> {
    for line in metadata {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{}", T::csv_header())?;
    for row in rows {
        row.write_csv_row(w)?;
    }
    Ok(())
}
