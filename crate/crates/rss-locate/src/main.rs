//! Command-line front end: scenario generation, epoch experiments, and
//! noise sweeps with deterministic CSV output.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use rss_locate::experiment::{
    metadata_lines, run_epoch_experiment, run_noise_sweep, sort_records, write_csv,
};
use rss_locate::scenario::{bad_geometry, good_geometry, load_scenario, save_scenario};
use rss_locate::{
    defaults, ExperimentConfig, Method, PathLossParams, PfConfig, Point2, Scenario, SweepMetric,
};

const SEED_ENV_VAR: &str = "RSS_LOCATE_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "rss-locate",
    version,
    about = "RSS-based stationary-target localization: particle filter vs. trilateration",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the error-vs-epoch experiment and write per-epoch records as CSV
    Run(RunArgs),
    /// Sweep the RSS noise level and write per-noise summaries as CSV
    Sweep(SweepArgs),
    /// Generate a scenario file
    Scenario(ScenarioArgs),
    /// Print the program version
    Version,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    /// Sensor geometry: good, bad, or file:PATH for a scenario file
    #[arg(long, default_value = "good")]
    geometry: String,
    /// Number of sensors M [default: 4 (artifact default)]
    #[arg(long)]
    sensors: Option<usize>,
    /// Sensor circle radius in meters [default: 40 (artifact default)]
    #[arg(long)]
    radius: Option<f64>,
    /// Bad-geometry arc width in degrees [default: 60 (artifact default)]
    #[arg(long)]
    arc: Option<f64>,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Time epochs per trial
    #[arg(long, default_value_t = defaults::EPOCHS)]
    epochs: usize,
    /// Monte Carlo trials [default: 50 (artifact default)]
    #[arg(long, default_value_t = defaults::TRIALS)]
    trials: usize,
    /// Base RNG seed [default: RSS_LOCATE_SEED env var, then 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Estimators to run, comma-separated: pf,tri
    #[arg(long, value_delimiter = ',', default_value = "pf,tri")]
    methods: Vec<String>,
    /// Particle count N [default: 1000 (artifact default)]
    #[arg(long, default_value_t = defaults::PARTICLES)]
    particles: usize,
    /// Resampling ratio rho in [0, 1]
    #[arg(long, default_value_t = defaults::RHO, allow_negative_numbers = true)]
    rho: f64,
    /// Reference RSS at 1 m, dB
    #[arg(long, default_value_t = defaults::P0_DB, allow_negative_numbers = true)]
    p0: f64,
    /// Path-loss exponent
    #[arg(long, default_value_t = defaults::BETA, allow_negative_numbers = true)]
    beta: f64,
    /// Trilaterate on the across-epoch RSS average instead of the current
    /// epoch only
    #[arg(long)]
    accumulate: bool,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    /// RSS noise standard deviation sigma, dB
    #[arg(long, default_value_t = defaults::SIGMA_DB, allow_negative_numbers = true)]
    sigma: f64,
    #[command(flatten)]
    sim: SimArgs,
    /// Output CSV path (per-epoch records)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Noise levels to sweep, comma-separated dB values
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,3,4,5,6,7,8,9,10",
        allow_negative_numbers = true
    )]
    sigmas: Vec<f64>,
    /// Per-trial statistic aggregated across trials
    #[arg(long, value_parser = parse_metric, default_value = "mean")]
    metric: SweepMetric,
    #[command(flatten)]
    sim: SimArgs,
    /// Output CSV path (per-noise summaries)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Geometry to generate: good or bad
    #[arg(long)]
    geometry: String,
    /// Number of sensors M [default: 4 (artifact default)]
    #[arg(long, default_value_t = defaults::SENSORS)]
    sensors: usize,
    /// Sensor circle radius in meters [default: 40 (artifact default)]
    #[arg(long, default_value_t = defaults::RADIUS_M)]
    radius: f64,
    /// Bad-geometry arc width in degrees [default: 60 (artifact default)]
    #[arg(long, default_value_t = defaults::ARC_DEGREES)]
    arc: f64,
    /// Target position as "x,y" meters
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    target: String,
    /// Scenario label [default: the geometry name]
    #[arg(long)]
    label: Option<String>,
    /// Output scenario file path
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    /// Bad flag values: exit 2.
    Usage(String),
    /// Failures while running: exit 1.
    Runtime(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(err: impl ToString) -> CliError {
    CliError::Runtime(err.to_string())
}

fn parse_metric(s: &str) -> Result<SweepMetric, String> {
    match s {
        "mean" => Ok(SweepMetric::MeanOverEpochs),
        "final" => Ok(SweepMetric::FinalEpoch),
        other => Err(format!("unknown metric '{other}' (expected mean or final)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Scenario(args) => cmd_scenario(args),
        Command::Version => {
            println!("rss-locate {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    if args.sigma < 0.0 || !args.sigma.is_finite() {
        return Err(usage("sigma must be >= 0"));
    }
    let config = build_config(&args.geometry, &args.sim, args.sigma)?;
    let threads = resolve_threads(args.sim.threads)?;
    print_resolved_config(&config, threads);

    let pool = build_pool(threads)?;
    let mut records = pool
        .install(|| run_epoch_experiment(&config))
        .map_err(runtime)?;
    sort_records(&mut records);
    write_csv(&records, &metadata_lines(&config, &[]), &args.out).map_err(runtime)?;

    for &method in &config.methods {
        let final_errors: Vec<f64> = records
            .iter()
            .filter(|r| r.method == method && r.epoch == config.epochs)
            .map(|r| r.error_m)
            .collect();
        let mean = rss_locate::stats::mean(&final_errors);
        println!(
            "{method}: mean final-epoch error {mean:.6} m over {} trials",
            final_errors.len()
        );
    }
    println!("wrote {} records to {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.sigmas.is_empty() {
        return Err(usage("at least one sigma is required"));
    }
    for &sigma in &args.sigmas {
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(usage("sigma must be >= 0"));
        }
    }
    let mut config = build_config(&args.geometry, &args.sim, args.sigmas[0])?;
    config.sweep_metric = args.metric;
    let threads = resolve_threads(args.sim.threads)?;
    print_resolved_config(&config, threads);

    let pool = build_pool(threads)?;
    let summaries = pool
        .install(|| run_noise_sweep(&config, &args.sigmas))
        .map_err(runtime)?;
    let extra = vec![format!(
        "sigmas = [{}]",
        args.sigmas
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    )];
    write_csv(&summaries, &metadata_lines(&config, &extra), &args.out).map_err(runtime)?;
    println!(
        "wrote {} summary rows to {}",
        summaries.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_scenario(args: ScenarioArgs) -> Result<(), CliError> {
    let target = parse_point(&args.target)?;
    let area = defaults::area();
    let scenario = match args.geometry.as_str() {
        "good" => good_geometry(args.sensors, args.radius, target, area),
        "bad" => bad_geometry(args.sensors, args.radius, args.arc, target, area),
        other => {
            return Err(usage(format!(
                "scenario generation requires --geometry good or bad, got '{other}'"
            )))
        }
    }
    .map_err(|e| usage(e.to_string()))?;
    let scenario = match args.label {
        Some(label) => {
            Scenario::new(label, scenario.target(), scenario.sensors().to_vec(), area)
                .map_err(|e| usage(e.to_string()))?
        }
        None => scenario,
    };
    save_scenario(&scenario, &args.out).map_err(runtime)?;
    println!(
        "wrote scenario '{}' with {} sensors to {}",
        scenario.label(),
        scenario.sensor_count(),
        args.out.display()
    );
    Ok(())
}

/// Builds the resolved experiment configuration from CLI flags.
fn build_config(
    geometry: &GeometryArgs,
    sim: &SimArgs,
    sigma: f64,
) -> Result<ExperimentConfig, CliError> {
    let scenario = build_scenario(geometry)?;
    let params = PathLossParams::new(sim.p0, sim.beta, sigma).map_err(|e| usage(e.to_string()))?;
    let mut pf_config = PfConfig::new(sim.particles, sim.rho, scenario.area())
        .map_err(|e| usage(e.to_string()))?;
    pf_config.jitter_std = 0.0;

    let mut methods = Vec::new();
    for name in &sim.methods {
        let method = Method::from_str(name).map_err(|e| usage(e.to_string()))?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    if methods.is_empty() {
        return Err(usage("at least one method is required"));
    }

    let mut config = ExperimentConfig::baseline(scenario, resolve_seed(sim.seed)?);
    config.params = params;
    config.pf = pf_config;
    config.tri.accumulate = sim.accumulate;
    config.epochs = sim.epochs;
    config.trials = sim.trials;
    config.methods = methods;
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn build_scenario(args: &GeometryArgs) -> Result<Scenario, CliError> {
    let area = defaults::area();
    if let Some(path) = args.geometry.strip_prefix("file:") {
        if args.sensors.is_some() || args.radius.is_some() || args.arc.is_some() {
            return Err(usage(
                "--sensors/--radius/--arc only apply to generated geometries, not file: scenarios",
            ));
        }
        return load_scenario(path).map_err(runtime);
    }
    let m = args.sensors.unwrap_or(defaults::SENSORS);
    let radius = args.radius.unwrap_or(defaults::RADIUS_M);
    let target = Point2::new(0.0, 0.0);
    match args.geometry.as_str() {
        "good" => {
            if args.arc.is_some() {
                return Err(usage("--arc only applies to the bad geometry"));
            }
            good_geometry(m, radius, target, area).map_err(|e| usage(e.to_string()))
        }
        "bad" => {
            let arc = args.arc.unwrap_or(defaults::ARC_DEGREES);
            bad_geometry(m, radius, arc, target, area).map_err(|e| usage(e.to_string()))
        }
        other => Err(usage(format!(
            "unknown geometry '{other}' (expected good, bad, or file:PATH)"
        ))),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| usage(format!("{SEED_ENV_VAR} must be an unsigned 64-bit integer"))),
        Err(_) => Ok(0),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    let threads = match flag {
        Some(n) => n,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    };
    if threads == 0 {
        return Err(usage("threads must be >= 1"));
    }
    Ok(threads)
}

fn build_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(runtime)
}

fn parse_point(text: &str) -> Result<Point2, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("expected a point as \"x,y\", got '{text}'")));
    }
    let x: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| usage(format!("invalid x coordinate '{}'", parts[0])))?;
    let y: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| usage(format!("invalid y coordinate '{}'", parts[1])))?;
    Ok(Point2::new(x, y))
}

/// Every run logs the fully resolved configuration for provenance. Goes to
/// stderr so CSV piping stays clean; thread count is excluded from the CSV
/// metadata because it must not affect output bytes.
fn print_resolved_config(config: &ExperimentConfig, threads: usize) {
    eprintln!(
        "config: {}",
        serde_json::to_string(config).expect("config serializes")
    );
    eprintln!("threads: {threads}");
}
