//! faasbench: simulate serverless platform campaigns, fingerprint the
//! resulting datasets and analyze their performance surfaces.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 usage or
//! configuration error, 2 I/O error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use faasbench_core::analysis::{
    cold_start_stats, fit_diurnal, hourly_mean_series, performance_stats, smooth_series,
    write_series_csv, write_tier_stats_csv, Metric, SeriesMetric, TierStats,
};
use faasbench_core::fingerprint::{build_topology, decode_cpu_model};
use faasbench_core::observer::{
    read_jsonl, run_campaign, CampaignConfig, CampaignRun, DatasetError, HttpSink,
    InvocationRecord, JsonlSink, RecordSink,
};
use faasbench_core::profile::{load_preset, load_profile, PlatformProfile, PRESET_NAMES};
use faasbench_core::time::{MILLIS_PER_DAY, MILLIS_PER_HOUR};

/// Default campaign seed; override with --seed or FAASBENCH_SEED.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "faasbench",
    version,
    about = "Deterministic serverless-platform measurement campaigns at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a measurement campaign against a simulated platform and write a
    /// JSONL dataset.
    Simulate(SimulateArgs),
    /// Compute per-tier statistics, smoothed series and the diurnal fit
    /// from a dataset.
    Analyze(AnalyzeArgs),
    /// Aggregate the platform topology (VMs, containers, CPU prevalence,
    /// memory map) from a dataset.
    Fingerprint(FingerprintArgs),
    /// Decode a CPU model id + speed to a product name.
    DecodeCpu(DecodeCpuArgs),
    /// Export statistics or a time series as CSV.
    Export(ExportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Preset name (aws-like, google-like, ibm-like, azure-like) or a path
    /// to a profile TOML document.
    #[arg(long)]
    profile: String,
    /// Campaign length in virtual days.
    #[arg(long, default_value_t = 30)]
    days: u64,
    /// Additional virtual hours on top of --days.
    #[arg(long, default_value_t = 0)]
    hours: u64,
    /// Minutes between observer ticks.
    #[arg(long, default_value_t = 60)]
    interval_mins: u64,
    /// Concurrent invocations per burst scenario.
    #[arg(long, default_value_t = 50)]
    burst: u32,
    /// Comma-separated memory tiers (MB); defaults to all configured tiers.
    #[arg(long, value_delimiter = ',')]
    tiers: Option<Vec<u32>>,
    /// Campaign seed; identical seeds reproduce identical datasets.
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSONL path.
    #[arg(long, short)]
    out: PathBuf,
    /// Also POST the records as newline-delimited JSON batches to this
    /// http:// URL.
    #[arg(long)]
    http_sink: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input JSONL dataset.
    #[arg(long, short)]
    input: PathBuf,
    /// Output directory for the stats JSON, series CSVs and diurnal fit.
    #[arg(long, short)]
    out: PathBuf,
    /// Smoothing window in hours for the series CSVs.
    #[arg(long, default_value_t = 12)]
    smooth_window_hours: u64,
}

#[derive(Args)]
struct FingerprintArgs {
    /// Input JSONL dataset.
    #[arg(long, short)]
    input: PathBuf,
    /// Optional path for the topology report as JSON.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeCpuArgs {
    /// Decimal model id from /proc/cpuinfo.
    model_id: u32,
    /// CPU speed in MHz.
    mhz: u32,
}

#[derive(Args)]
struct ExportArgs {
    /// Input JSONL dataset.
    #[arg(long, short)]
    input: PathBuf,
    /// Output CSV path.
    #[arg(long, short)]
    out: PathBuf,
    /// Export a statistics table for this metric (cold_start_ms,
    /// prime_count, disk_mb_per_s, total_runtime_ms).
    #[arg(long, conflicts_with = "series")]
    stats: Option<String>,
    /// Export an hourly series for this metric (total_runtime_ms,
    /// prime_count, disk_mb_per_s, disk_s_per_mb).
    #[arg(long)]
    series: Option<String>,
    /// Smoothing window in hours for series export.
    #[arg(long, default_value_t = 12)]
    smooth_window_hours: u64,
}

/// Errors mapped onto the exit-code contract.
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => msg,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_error(context: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {err}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Fingerprint(args) => cmd_fingerprint(args),
        Command::DecodeCpu(args) => cmd_decode_cpu(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn resolve_profile(name_or_path: &str) -> Result<PlatformProfile, CliError> {
    if PRESET_NAMES.contains(&name_or_path) {
        return load_preset(name_or_path)
            .map_err(|e| usage(format!("preset {name_or_path}: {e}")));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(usage(format!(
            "`{name_or_path}` is neither a preset ({}) nor an existing profile path",
            PRESET_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_error(&format!("reading {name_or_path}"), e))?;
    load_profile(&text).map_err(|e| usage(format!("profile {name_or_path}: {e}")))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("FAASBENCH_SEED") {
        Ok(value) => value
            .parse::<u64>()
            .map_err(|_| usage(format!("FAASBENCH_SEED `{value}` is not an integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn load_dataset(path: &Path) -> Result<Vec<InvocationRecord>, CliError> {
    let file = File::open(path)
        .map_err(|e| io_error(&format!("opening {}", path.display()), e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| match e {
        DatasetError::Malformed { .. } => usage(format!("{}: {e}", path.display())),
        DatasetError::Io(err) => io_error(&format!("reading {}", path.display()), err),
    })
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    let file =
        File::create(path).map_err(|e| io_error(&format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(file))
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let profile = resolve_profile(&args.profile)?;
    let seed = resolve_seed(args.seed)?;
    let tiers = match args.tiers {
        Some(tiers) => tiers,
        None => profile.memory_tiers(),
    };
    let mut config = CampaignConfig::new(vec![CampaignRun { profile, tiers }], seed);
    config.interval_ms = args.interval_mins * 60_000;
    config.duration_ms = args.days * MILLIS_PER_DAY + args.hours * MILLIS_PER_HOUR;
    config.burst_size = args.burst;
    config
        .validate()
        .map_err(|e| usage(e.to_string()))?;

    let file = create_file(&args.out)?;
    let mut file_sink = JsonlSink::new(file);
    let summary = if let Some(url) = &args.http_sink {
        let http = HttpSink::new(url).map_err(|e| usage(e.to_string()))?;
        let mut tee = TeeSink {
            first: &mut file_sink,
            second: http,
        };
        run_campaign(&config, &mut tee)
    } else {
        run_campaign(&config, &mut file_sink)
    }
    .map_err(|e| match e {
        faasbench_core::observer::CampaignError::Config(msg) => usage(msg),
        other => io_error("campaign", other),
    })?;
    file_sink
        .into_inner()
        .flush()
        .map_err(|e| io_error("flushing output", e))?;

    println!("records={}", summary.records);
    println!("cold={}", summary.cold);
    println!("warm={}", summary.warm);
    println!("cold_fraction={:.4}", summary.cold_fraction());
    println!("seed={seed}");
    println!("output={}", args.out.display());
    println!(
        "Campaign complete: {} records, cold fraction {:.3}, written to {}",
        summary.records,
        summary.cold_fraction(),
        args.out.display()
    );
    Ok(())
}

/// Duplicates records into two sinks (file + HTTP push).
struct TeeSink<'a, A: RecordSink> {
    first: &'a mut A,
    second: HttpSink,
}

impl<A: RecordSink> RecordSink for TeeSink<'_, A> {
    fn write_record(
        &mut self,
        record: &InvocationRecord,
    ) -> Result<(), faasbench_core::observer::SinkError> {
        self.first.write_record(record)?;
        self.second.write_record(record)
    }

    fn flush(&mut self) -> Result<(), faasbench_core::observer::SinkError> {
        self.first.flush()?;
        self.second.flush()
    }

    fn written(&self) -> u64 {
        self.first.written()
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let records = load_dataset(&args.input)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| io_error(&format!("creating {}", args.out.display()), e))?;

    let cold = cold_start_stats(&records).map_err(|e| usage(e.to_string()))?;
    for warning in &cold.warnings {
        eprintln!("warning: {warning}");
    }
    let cold_path = args.out.join("cold_start_stats.json");
    write_json(&cold_path, &serde_json::json!({ "stats": cold.stats }))?;

    let mut performance: Vec<TierStats> = Vec::new();
    for metric in [Metric::PrimeCount, Metric::DiskMbPerS, Metric::TotalRuntimeMs] {
        performance.extend(performance_stats(&records, metric).map_err(|e| usage(e.to_string()))?);
    }
    let perf_path = args.out.join("performance_stats.json");
    write_json(&perf_path, &performance)?;

    let window_ms = args.smooth_window_hours * MILLIS_PER_HOUR;
    let mut series_files = Vec::new();
    for metric in [
        SeriesMetric::TotalRuntimeMs,
        SeriesMetric::PrimeCount,
        SeriesMetric::DiskMbPerS,
        SeriesMetric::DiskSecondsPerMb,
    ] {
        let series = hourly_mean_series(&records, metric).map_err(|e| usage(e.to_string()))?;
        let smoothed = if series.points.len() >= 2 {
            smooth_series(&series, window_ms).map_err(|e| usage(e.to_string()))?
        } else {
            series
        };
        let path = args.out.join(format!("series_{}.csv", metric.label()));
        let file = create_file(&path)?;
        write_series_csv(&smoothed, file).map_err(|e| io_error("writing series csv", e))?;
        series_files.push(path);
    }

    // The reciprocal-throughput series tracks the interference level
    // directly, so the diurnal fit runs on it.
    let fit_series = hourly_mean_series(&records, SeriesMetric::DiskSecondsPerMb)
        .map_err(|e| usage(e.to_string()))?;
    let fit_path = args.out.join("diurnal_fit.json");
    match fit_diurnal(&fit_series) {
        Ok(fit) => {
            write_json(&fit_path, &fit)?;
            println!("diurnal_amplitude={:.4}", fit.amplitude);
            println!("diurnal_peak_hour={:.2}", fit.peak_hour);
            println!("diurnal_anomaly_windows={}", fit.anomaly_windows.len());
        }
        Err(e) => eprintln!("warning: diurnal fit skipped: {e}"),
    }

    println!("cold_start_stats={}", cold_path.display());
    println!("performance_stats={}", perf_path.display());
    for path in series_files {
        println!("series={}", path.display());
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut file = create_file(path)?;
    serde_json::to_writer_pretty(&mut file, value)
        .map_err(|e| io_error(&format!("writing {}", path.display()), e))?;
    file.write_all(b"\n")
        .and_then(|_| file.flush())
        .map_err(|e| io_error(&format!("writing {}", path.display()), e))
}

fn cmd_fingerprint(args: FingerprintArgs) -> Result<(), CliError> {
    let records = load_dataset(&args.input)?;
    let topology = build_topology(&records).map_err(|e| usage(e.to_string()))?;
    print!("{topology}");
    if let Some(path) = args.out {
        write_json(&path, &topology)?;
        println!("topology={}", path.display());
    }
    Ok(())
}

fn cmd_decode_cpu(args: DecodeCpuArgs) -> Result<(), CliError> {
    // A miss is an answer, not a failure.
    println!("{}", decode_cpu_model(args.model_id, args.mhz).label());
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let records = load_dataset(&args.input)?;
    match (&args.stats, &args.series) {
        (Some(metric), None) => {
            let stats = match metric.parse::<Metric>().map_err(|e| usage(e.to_string()))? {
                Metric::ColdStartMs => {
                    let cold = cold_start_stats(&records).map_err(|e| usage(e.to_string()))?;
                    for warning in &cold.warnings {
                        eprintln!("warning: {warning}");
                    }
                    cold.stats
                }
                metric => performance_stats(&records, metric).map_err(|e| usage(e.to_string()))?,
            };
            let file = create_file(&args.out)?;
            write_tier_stats_csv(&stats, file).map_err(|e| io_error("writing csv", e))?;
        }
        (None, Some(metric)) => {
            let metric = match metric.as_str() {
                "total_runtime_ms" => SeriesMetric::TotalRuntimeMs,
                "prime_count" => SeriesMetric::PrimeCount,
                "disk_mb_per_s" => SeriesMetric::DiskMbPerS,
                "disk_s_per_mb" => SeriesMetric::DiskSecondsPerMb,
                other => return Err(usage(format!("unknown series metric `{other}`"))),
            };
            let series = hourly_mean_series(&records, metric).map_err(|e| usage(e.to_string()))?;
            let smoothed = smooth_series(&series, args.smooth_window_hours * MILLIS_PER_HOUR)
                .map_err(|e| usage(e.to_string()))?;
            let file = create_file(&args.out)?;
            write_series_csv(&smoothed, file).map_err(|e| io_error("writing csv", e))?;
        }
        _ => {
            return Err(usage(
                "pass exactly one of --stats <metric> or --series <metric>".to_string(),
            ))
        }
    }
    println!("output={}", args.out.display());
    Ok(())
}
