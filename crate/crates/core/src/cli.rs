//! Command-line front end: single campaigns, density/frequency sweeps,
//! interferer-state tables, and paired array comparisons.
//!
//! Every subcommand resolves one [`RunManifest`] (config file plus
//! overrides), validates it before any computation, runs the engine, and
//! writes its outputs under `--out`. Identical invocations produce
//! byte-identical files.

use crate::engine::{
    self, interferer_state_table, run_campaign, CampaignResult, EngineError,
};
use crate::params::{ConfigError, SimConfig};
use crate::report;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("invalid argument {flag}: {reason}")]
    InvalidArgument { flag: String, reason: String },
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn bad_arg(flag: &str, reason: impl Into<String>) -> CliError {
    CliError::InvalidArgument {
        flag: flag.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mmwsim",
    version,
    about = "Monte Carlo INR/SINR simulator for mmWave cellular deployments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one campaign and write per-iteration, ECDF, and summary outputs.
    Run(RunArgs),
    /// Run one campaign per BS density (and per frequency) and tabulate
    /// percentiles.
    Sweep(SweepArgs),
    /// Split the INR ECDF and report interferer state probabilities per
    /// interval.
    Table1(Table1Args),
    /// Paired campaigns with enlarged arrays under shared seeds; reports
    /// INR/SINR deltas.
    CompareArrays(CompareArgs),
}

/// Flags shared by every subcommand: the config file, the output directory,
/// and scenario overrides.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Path to the JSON configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Override BS density, per km^2.
    #[arg(long, value_name = "LAMBDA", allow_negative_numbers = true)]
    pub lambda_bs: Option<f64>,

    /// Override UE density, per km^2.
    #[arg(long, value_name = "LAMBDA", allow_negative_numbers = true)]
    pub lambda_ue: Option<f64>,

    /// Override carrier frequency in GHz (28 or 73).
    #[arg(long, value_name = "GHZ")]
    pub freq: Option<f64>,

    /// Override the iteration count.
    #[arg(long, value_name = "N")]
    pub iterations: Option<u64>,

    /// Override the master seed.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Override the BS array shape, e.g. 8x8.
    #[arg(long, value_name = "RxC")]
    pub bs_array: Option<String>,

    /// Override the UE array shape, e.g. 4x4.
    #[arg(long, value_name = "RxC")]
    pub ue_array: Option<String>,

    /// Override the deployment disc radius in meters.
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub region_radius_m: Option<f64>,

    /// Worker threads (default: one per core).
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Also dump the node positions of iteration 0 as CSV.
    #[arg(long)]
    pub dump_deployment: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Comma-separated BS densities per km^2, e.g. 30,60,90,120.
    #[arg(long, value_name = "LIST")]
    pub densities: String,

    /// Comma-separated carrier frequencies in GHz.
    #[arg(long, value_name = "LIST", default_value = "28,73")]
    pub freqs: String,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub common: CommonArgs,

    /// ECDF quantile splitting the two intervals.
    #[arg(long, value_name = "Q", default_value_t = engine::DEFAULT_TABLE_SPLIT_QUANTILE)]
    pub split_quantile: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Enlarged BS array for the second arm.
    #[arg(long, value_name = "RxC", default_value = "16x16")]
    pub alt_bs_array: String,

    /// Enlarged UE array for the second arm.
    #[arg(long, value_name = "RxC", default_value = "8x8")]
    pub alt_ue_array: String,
}

/// A resolved invocation: where the config came from, where outputs go, and
/// the fully overridden configuration to run.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub config: SimConfig,
    pub threads: Option<usize>,
}

pub fn parse_array_shape(text: &str, flag: &str) -> Result<(usize, usize), CliError> {
    let (r, c) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| bad_arg(flag, format!("expected RxC, got `{text}`")))?;
    let rows: usize = r
        .trim()
        .parse()
        .map_err(|_| bad_arg(flag, format!("bad row count `{r}`")))?;
    let cols: usize = c
        .trim()
        .parse()
        .map_err(|_| bad_arg(flag, format!("bad column count `{c}`")))?;
    if rows == 0 || cols == 0 {
        return Err(bad_arg(flag, "rows and cols must be >= 1"));
    }
    Ok((rows, cols))
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let values = values.map_err(|e| bad_arg(flag, format!("{e}")))?;
    if values.is_empty() {
        return Err(bad_arg(flag, "list must not be empty"));
    }
    Ok(values)
}

fn check_freq(freq: f64) -> Result<f64, CliError> {
    if freq == 28.0 || freq == 73.0 {
        Ok(freq)
    } else {
        Err(bad_arg("--freq", format!("must be 28 or 73, got {freq}")))
    }
}

impl CommonArgs {
    /// Load the config, apply overrides, and validate before any
    /// computation starts.
    pub fn resolve(&self) -> Result<RunManifest, CliError> {
        let mut config = SimConfig::load(&self.config)?;
        let s = &mut config.scenario;
        if let Some(v) = self.lambda_bs {
            s.lambda_bs_per_km2 = v;
        }
        if let Some(v) = self.lambda_ue {
            s.lambda_ue_per_km2 = v;
        }
        if let Some(v) = self.freq {
            s.carrier_frequency_ghz = check_freq(v)?;
        }
        if let Some(v) = self.iterations {
            s.iterations = v;
        }
        if let Some(v) = self.seed {
            s.master_seed = v;
        }
        if let Some(v) = self.region_radius_m {
            s.region_radius_m = v;
        }
        if let Some(text) = &self.bs_array {
            let (rows, cols) = parse_array_shape(text, "--bs-array")?;
            s.bs_array.rows = rows;
            s.bs_array.cols = cols;
        }
        if let Some(text) = &self.ue_array {
            let (rows, cols) = parse_array_shape(text, "--ue-array")?;
            s.ue_array.rows = rows;
            s.ue_array.cols = cols;
        }
        config.validate()?;
        Ok(RunManifest {
            config_path: self.config.clone(),
            out_dir: self.out.clone(),
            config,
            threads: self.threads,
        })
    }
}

/// Run `f` on a worker pool of the requested size (or the default pool).
/// Results do not depend on the worker count.
fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(f)
        }
        None => f(),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    report::write_file(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let manifest = args.common.resolve()?;
    let config = &manifest.config;
    let result = with_threads(manifest.threads, || run_campaign(config))?;

    let out = &manifest.out_dir;
    write(&out.join("iterations.csv"), &report::iterations_csv(config, &result))?;
    write(&out.join("ecdf.csv"), &report::ecdf_csv(config, &[(None, &result)]))?;
    write(&out.join("summary.json"), &report::summary_json(config, &result))?;
    write(&out.join("plot_ecdf.py"), report::PLOT_ECDF_PY)?;
    if args.dump_deployment {
        // same stream construction the engine uses for iteration 0
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.scenario.master_seed);
        rng.set_stream(0);
        let deployment = crate::deployment::Deployment::sample(&config.scenario, &mut rng);
        write(&out.join("deployment.csv"), &deployment.to_csv())?;
    }
    println!(
        "run: {} iterations, {} served, regime {} ({:.1}% of INR above {} dB)",
        result.iterations,
        result.served_count,
        result.regime.as_str(),
        100.0 * result.fraction_above_threshold,
        result.regime_threshold_db,
    );
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let manifest = args.common.resolve()?;
    let densities = parse_f64_list(&args.densities, "--densities")?;
    for &d in &densities {
        if !(d > 0.0) {
            return Err(bad_arg("--densities", format!("density {d} must be > 0")));
        }
    }
    let freqs = parse_f64_list(&args.freqs, "--freqs")?;
    let freqs: Result<Vec<f64>, CliError> = freqs.into_iter().map(check_freq).collect();
    let freqs = freqs?;
    // each requested frequency must have a table before any campaign runs
    for &f in &freqs {
        manifest.config.channel_params_for(f)?;
    }

    let mut rows = Vec::new();
    for &freq in &freqs {
        let mut cfg = manifest.config.clone();
        cfg.scenario.carrier_frequency_ghz = freq;
        let freq_rows =
            with_threads(manifest.threads, || engine::density_sweep(&cfg, &densities))?;
        rows.extend(freq_rows);
    }

    let out = &manifest.out_dir;
    write(&out.join("sweep.csv"), &report::sweep_csv(&manifest.config, &rows))?;
    write(&out.join("plot_sweep.py"), report::PLOT_SWEEP_PY)?;
    println!("sweep: {} rows written to {}", rows.len(), out.join("sweep.csv").display());
    Ok(())
}

pub fn cmd_table1(args: &Table1Args) -> Result<(), CliError> {
    if !(args.split_quantile > 0.0 && args.split_quantile < 1.0) {
        return Err(bad_arg("--split-quantile", "must be in (0, 1)"));
    }
    let manifest = args.common.resolve()?;
    let config = &manifest.config;
    let result = with_threads(manifest.threads, || run_campaign(config))?;
    let table = interferer_state_table(&result.results, args.split_quantile);

    let out = &manifest.out_dir;
    write(&out.join("table1.csv"), &report::state_table_csv(config, &table))?;
    write(&out.join("summary.json"), &report::summary_json(config, &result))?;
    println!(
        "table1: bottom {:.0}%: los/nlos/outage = {:.1}%/{:.1}%/{:.1}%; upper: {:.1}%/{:.1}%/{:.1}%",
        100.0 * table.split_quantile,
        100.0 * table.bottom.los_fraction,
        100.0 * table.bottom.nlos_fraction,
        100.0 * table.bottom.outage_fraction,
        100.0 * table.upper.los_fraction,
        100.0 * table.upper.nlos_fraction,
        100.0 * table.upper.outage_fraction,
    );
    Ok(())
}

pub fn cmd_compare_arrays(args: &CompareArgs) -> Result<(), CliError> {
    let manifest = args.common.resolve()?;
    let base_cfg = manifest.config.clone();

    let mut alt_cfg = base_cfg.clone();
    let (rows, cols) = parse_array_shape(&args.alt_bs_array, "--alt-bs-array")?;
    alt_cfg.scenario.bs_array.rows = rows;
    alt_cfg.scenario.bs_array.cols = cols;
    let (rows, cols) = parse_array_shape(&args.alt_ue_array, "--alt-ue-array")?;
    alt_cfg.scenario.ue_array.rows = rows;
    alt_cfg.scenario.ue_array.cols = cols;
    alt_cfg.validate()?;

    let (base, alt) = with_threads(manifest.threads, || {
        let base = run_campaign(&base_cfg)?;
        let alt = run_campaign(&alt_cfg)?;
        Ok::<(CampaignResult, CampaignResult), EngineError>((base, alt))
    })?;

    let out = &manifest.out_dir;
    write(
        &out.join("ecdf_compare.csv"),
        &report::ecdf_csv(&base_cfg, &[(Some("base"), &base), (Some("alt"), &alt)]),
    )?;
    write(
        &out.join("summary.json"),
        &report::compare_summary_json(&manifest.config, &base_cfg, &base, &alt_cfg, &alt),
    )?;
    write(&out.join("plot_ecdf.py"), report::PLOT_ECDF_PY)?;
    println!(
        "compare-arrays: median INR delta {:+.2} dB, median SINR delta {:+.2} dB",
        alt.inr_percentiles.p50 - base.inr_percentiles.p50,
        alt.sinr_percentiles.p50 - base.sinr_percentiles.p50,
    );
    Ok(())
}

/// Parse argv and dispatch. Returns an error (nonzero exit) if any requested
/// campaign failed.
pub fn main_with_args<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Table1(args) => cmd_table1(args),
        Command::CompareArrays(args) => cmd_compare_arrays(args),
    }
}
