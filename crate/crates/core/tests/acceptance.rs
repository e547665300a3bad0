//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `--nocapture`).
//!
//! Criteria are parameter-recovery round trips against configured simulator
//! ground truth plus property checks. The four 30-day campaigns are run
//! once per test binary and shared.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use faasbench_core::analysis::{
    cold_start_stats, fit_diurnal, hourly_mean_series, performance_stats, Metric, SeriesMetric,
    TimeSeries,
};
use faasbench_core::fingerprint::{build_topology, model_id_hex, CpuidTable, DecodedCpu};
use faasbench_core::observer::{
    persist, read_jsonl, run_campaign_collect, CampaignConfig, CampaignRun, InvocationRecord,
    JsonlSink, Scenario,
};
use faasbench_core::probe::{count_primes_with_budget, is_prime, ExecutionEnv, TmpStorageError};
use faasbench_core::profile::{load_preset, AnomalyWindow};
use faasbench_core::time::{VirtualTime, MILLIS_PER_HOUR};

/// The documented default seed; campaigns here use it so the README numbers
/// reproduce exactly.
const SEED: u64 = 42;

/// Cold/total invocation counts the presets are calibrated against.
const COLD_TARGETS: [(&str, f64, f64); 4] = [
    ("aws-like", 156_847.0, 175_477.0),
    ("google-like", 21_253.0, 175_357.0),
    ("ibm-like", 37_820.0, 176_266.0),
    ("azure-like", 1_392.0, 36_176.0),
];

struct CampaignResult {
    records: Vec<InvocationRecord>,
    elapsed: Duration,
}

fn campaign(preset: &str) -> Arc<CampaignResult> {
    static CACHE: OnceLock<Mutex<BTreeMap<String, Arc<CampaignResult>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(preset.to_string())
        .or_insert_with(|| {
            let profile = load_preset(preset).expect("preset loads");
            let config = CampaignConfig::new(vec![CampaignRun::all_tiers(profile)], SEED);
            let start = std::time::Instant::now();
            let records = run_campaign_collect(&config).expect("campaign runs");
            Arc::new(CampaignResult {
                records,
                elapsed: start.elapsed(),
            })
        })
        .clone()
}

#[test]
fn criterion_1_cold_fraction_recovery() {
    for (preset, cold, total) in COLD_TARGETS {
        let target = cold / total;
        let result = campaign(preset);
        let observed_cold = result.records.iter().filter(|r| r.is_cold).count() as f64;
        let fraction = observed_cold / result.records.len() as f64;
        assert!(
            (fraction - target).abs() <= 0.02,
            "{preset}: cold fraction {fraction:.4} vs target {target:.4}"
        );
        assert!(
            result.elapsed < Duration::from_secs(120),
            "{preset}: campaign took {:?}",
            result.elapsed
        );
        println!(
            "criterion 1 [{preset}]: PASS  cold_fraction={fraction:.4} target={target:.4} runtime={:?}",
            result.elapsed
        );
    }
}

#[test]
fn criterion_2_cold_start_means() {
    let expected: [(&str, &[(u32, f64)]); 4] = [
        (
            "aws-like",
            &[
                (128, 346.73),
                (256, 221.0),
                (512, 221.0),
                (1024, 221.0),
                (2048, 221.0),
            ],
        ),
        (
            "google-like",
            &[
                (128, 14465.52),
                (256, 5722.33),
                (512, 4681.37),
                (1024, 3689.48),
                (2048, 2865.49),
            ],
        ),
        (
            "ibm-like",
            &[
                (128, 2990.55),
                (256, 1076.60),
                (512, 1310.43),
                (1024, 1319.05),
                (2048, 915.49),
            ],
        ),
        ("azure-like", &[(1536, 1997.63)]),
    ];
    for (preset, tiers) in expected {
        let result = campaign(preset);
        let stats = cold_start_stats(&result.records).expect("cold stats");
        assert!(stats.warnings.is_empty(), "{preset}: {:?}", stats.warnings);
        for &(tier, mean) in tiers {
            let row = stats
                .stats
                .iter()
                .find(|s| s.tier_mb == tier)
                .unwrap_or_else(|| panic!("{preset}: tier {tier} missing"));
            assert!(
                row.count >= 1000,
                "{preset} tier {tier}: only {} cold samples",
                row.count
            );
            let relative = (row.mean - mean).abs() / mean;
            assert!(
                relative <= 0.05,
                "{preset} tier {tier}: mean {:.2} vs configured {mean:.2} ({:.2}%)",
                row.mean,
                relative * 100.0
            );
            println!(
                "criterion 2 [{preset} {tier} MB]: PASS  mean={:.2} configured={mean:.2} n={}",
                row.mean, row.count
            );
        }
    }
}

#[test]
fn criterion_3_topology_recovery() {
    let result = campaign("aws-like");
    let topology = build_topology(&result.records).expect("topology");
    let dominant = topology
        .cpu_prevalence
        .iter()
        .find(|p| p.model_name == "Intel Xeon E5-2670 v2")
        .expect("dominant model present");
    assert!(
        (dominant.percent - 99.93).abs() <= 2.0,
        "prevalence {:.3}",
        dominant.percent
    );

    let expected: BTreeMap<u32, Vec<u64>> = [
        (128u32, vec![192_484u64]),
        (256, vec![331_740]),
        (512, vec![633_804]),
        (1024, vec![1_190_860, 1_717_196]),
        (2048, vec![3_230_668]),
    ]
    .into_iter()
    .collect();
    assert_eq!(
        topology.memory_map_observed, expected,
        "memory map must match the configured mapping exactly, outlier included"
    );
    assert_eq!(topology.identity_strategy_used, "vm-id");
    let percent_sum: f64 = topology.cpu_prevalence.iter().map(|p| p.percent).sum();
    assert!((percent_sum - 100.0).abs() <= 0.1, "percents sum to {percent_sum}");
    println!(
        "criterion 3: PASS  prevalence={:.3}% unique_vms={:?}",
        dominant.percent, topology.unique_vms
    );
}

#[test]
fn criterion_4_cpuid_decode() {
    let table = CpuidTable::shipped();
    // Every shipped row decodes to itself (star -> undetermined marker).
    for entry in table.entries() {
        let decoded = table.decode(entry.model_id, entry.mhz);
        match decoded {
            DecodedCpu::Exact { ref name, undetermined } => {
                let expected_base = entry.model_name.trim_end_matches('*').trim_end();
                assert_eq!(name, expected_base);
                assert_eq!(undetermined, entry.model_name.ends_with('*'));
            }
            other => panic!(
                "row ({}, {}) decoded to {other:?}",
                entry.model_id, entry.mhz
            ),
        }
    }
    // Spot checks across the four platforms.
    let expect = [
        (62u32, 2500u32, "Intel Xeon E5-2670 v2"),
        (62, 3000, "Intel Xeon E5-2690 v2"),
        (45, 2600, "Intel Xeon E5-2670"),
        (85, 2000, "Intel Xeon (Skylake), model undetermined"),
        (85, 2300, "Intel Xeon Gold6140"),
        (79, 2100, "Intel Xeon E5-2683 v4"),
        (79, 2300, "Intel Xeon E5-2673 v4"),
        (63, 2400, "Intel Xeon E5-2673 v3"),
        (85, 2600, "Intel Xeon Platinum8171M"),
    ];
    for (id, mhz, label) in expect {
        assert_eq!(table.decode(id, mhz).label(), label);
    }
    assert_eq!(table.decode(99, 9999), DecodedCpu::Unknown);
    assert_eq!(model_id_hex(62), "0x3E");
    assert_eq!(model_id_hex(79), "0x4F");
    assert_eq!(model_id_hex(85), "0x55");
    println!("criterion 4: PASS  {} rows decode exactly", table.entries().len());
}

/// Bare work meter for the benchmark checks.
struct MeterEnv {
    cost_ms: f64,
    elapsed_ms: f64,
}

impl ExecutionEnv for MeterEnv {
    fn read_proc(&mut self, _: &str) -> Option<String> {
        None
    }
    fn tier_mb(&self) -> u32 {
        128
    }
    fn now(&self) -> VirtualTime {
        VirtualTime::from_millis(self.elapsed_ms as u64)
    }
    fn elapsed_ms(&self) -> f64 {
        self.elapsed_ms
    }
    fn iteration_cost_ms(&self) -> f64 {
        self.cost_ms
    }
    fn charge_iterations(&mut self, count: u64) {
        self.elapsed_ms += count as f64 * self.cost_ms;
    }
    fn tmp_read(&mut self, _: &str) -> Result<Option<String>, TmpStorageError> {
        Ok(None)
    }
    fn tmp_write(&mut self, _: &str, _: &str) -> Result<(), TmpStorageError> {
        Ok(())
    }
    fn stream_write(&mut self, _: &str, _: u64) -> Result<(), TmpStorageError> {
        Ok(())
    }
    fn stream_read(&mut self, _: &str, _: u64, _: u64) -> Result<u64, TmpStorageError> {
        Ok(0)
    }
    fn fresh_id(&mut self) -> String {
        "meter".to_string()
    }
}

#[test]
fn criterion_5_primality_oracle() {
    // Exhaustive agreement with a sieve of Eratosthenes below 1e5.
    let limit = 100_000usize;
    let mut flags = vec![true; limit + 1];
    flags[0] = false;
    flags[1] = false;
    let mut p = 2usize;
    while p * p <= limit {
        if flags[p] {
            let mut m = p * p;
            while m <= limit {
                flags[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    for (n, &flag) in flags.iter().enumerate().skip(1) {
        assert_eq!(is_prime(n as u64), flag, "disagreement at {n}");
    }

    // Half the CPU share affords half the metered work within 10%.
    let mut full = MeterEnv {
        cost_ms: 0.001,
        elapsed_ms: 0.0,
    };
    let full_score = count_primes_with_budget(&mut full, 1000.0);
    let mut half = MeterEnv {
        cost_ms: 0.002,
        elapsed_ms: 0.0,
    };
    let half_score = count_primes_with_budget(&mut half, 1000.0);
    let ratio = half_score.iterations as f64 / full_score.iterations as f64;
    assert!(
        (ratio - 0.5).abs() <= 0.05,
        "half-share work ratio {ratio:.4}"
    );
    // Oracle-frozen candidate counts (see tests/probe_oracles.rs): the
    // candidate count shrinks sublinearly because divisor scans grow ~sqrt(n).
    assert_eq!(full_score.numbers_checked, 48_072);
    assert_eq!(half_score.numbers_checked, 28_966);
    println!(
        "criterion 5: PASS  sieve exhaustive to 1e5, work ratio {ratio:.4}, scores {} / {}",
        full_score.numbers_checked, half_score.numbers_checked
    );
}

#[test]
fn criterion_6_disk_ceilings() {
    let aws = campaign("aws-like");
    let aws_stats = performance_stats(&aws.records, Metric::DiskMbPerS).expect("disk stats");
    let mut previous_mean = 0.0;
    for row in &aws_stats {
        assert!(
            row.max <= 3.0,
            "aws tier {}: max {:.3} MB/s",
            row.tier_mb,
            row.max
        );
        assert!(
            row.mean > previous_mean,
            "aws tier {}: means must increase with the tier",
            row.tier_mb
        );
        previous_mean = row.mean;
    }

    let ibm = campaign("ibm-like");
    for row in performance_stats(&ibm.records, Metric::DiskMbPerS).expect("disk stats") {
        assert!(
            (row.mean - 0.6).abs() / 0.6 <= 0.15,
            "ibm tier {}: mean {:.4} MB/s",
            row.tier_mb,
            row.mean
        );
    }

    let azure = campaign("azure-like");
    for row in performance_stats(&azure.records, Metric::DiskMbPerS).expect("disk stats") {
        assert!(
            row.max < 0.5,
            "azure tier {}: max {:.4} MB/s",
            row.tier_mb,
            row.max
        );
    }
    println!("criterion 6: PASS  aws <= 3.0 monotone, ibm ~0.6, azure < 0.5");
}

#[test]
fn criterion_7_interference_round_trip() {
    // (a) Noiseless synthetic series.
    use std::f64::consts::TAU;
    let points: Vec<(VirtualTime, f64)> = (0..30 * 24u64)
        .map(|h| {
            let phase = TAU * (h as f64 - 6.0) / 24.0;
            (
                VirtualTime::from_hours(h),
                4.0 * (1.0 + 0.1 * phase.sin()),
            )
        })
        .collect();
    let series = TimeSeries::new("synthetic", points).unwrap();
    let fit = fit_diurnal(&series).unwrap();
    assert!((fit.amplitude - 0.1).abs() <= 0.005, "A = {}", fit.amplitude);
    assert!(
        (fit.peak_hour - 12.0).abs() <= 0.25,
        "peak = {}",
        fit.peak_hour
    );

    // (b) Full-noise campaign: the reciprocal disk-throughput series scales
    // directly with the interference multiplier.
    let aws = campaign("aws-like");
    let series = hourly_mean_series(&aws.records, SeriesMetric::DiskSecondsPerMb).unwrap();
    let campaign_fit = fit_diurnal(&series).unwrap();
    assert!(
        (campaign_fit.amplitude - 0.05).abs() <= 0.02,
        "campaign A = {}",
        campaign_fit.amplitude
    );
    assert!(
        (campaign_fit.peak_hour - 12.0).abs() <= 1.0,
        "campaign peak = {}",
        campaign_fit.peak_hour
    );

    // (c) An injected 2-day severity-0.5 window is localized within +-2
    // hourly ticks.
    let mut profile = load_preset("azure-like").unwrap();
    profile.interference.amplitude = 0.05;
    profile.interference.anomaly_windows = vec![AnomalyWindow {
        start_hour: 120,
        end_hour: 168,
        severity: 0.5,
    }];
    let config = CampaignConfig::new(vec![CampaignRun::all_tiers(profile)], SEED);
    let records = run_campaign_collect(&config).unwrap();
    let series = hourly_mean_series(&records, SeriesMetric::DiskSecondsPerMb).unwrap();
    let window_fit = fit_diurnal(&series).unwrap();
    assert_eq!(
        window_fit.anomaly_windows.len(),
        1,
        "windows: {:?}",
        window_fit.anomaly_windows
    );
    let window = &window_fit.anomaly_windows[0];
    let start_tick = (window.start.as_millis() / MILLIS_PER_HOUR) as i64;
    let end_tick = (window.end.as_millis() / MILLIS_PER_HOUR) as i64;
    assert!((start_tick - 120).abs() <= 2, "start tick {start_tick}");
    assert!((end_tick - 167).abs() <= 2, "end tick {end_tick}");
    assert!(window.mean_deviation > 0.0, "cost rises inside the window");
    println!(
        "criterion 7: PASS  noiseless A={:.4}, campaign A={:.4}, window [{start_tick}, {end_tick}]",
        fit.amplitude, campaign_fit.amplitude
    );
}

#[test]
fn criterion_8_determinism_and_round_trip() {
    let profile = load_preset("aws-like").unwrap();
    let mut config = CampaignConfig::new(vec![CampaignRun::all_tiers(profile)], SEED);
    config.duration_ms = 5 * 24 * MILLIS_PER_HOUR;

    let render = |config: &CampaignConfig| -> Vec<u8> {
        let records = run_campaign_collect(config).unwrap();
        let mut bytes = Vec::new();
        persist(&records, &mut JsonlSink::new(&mut bytes)).unwrap();
        bytes
    };
    let first = render(&config);
    let second = render(&config);
    assert_eq!(first, second, "same seed must produce byte-identical JSONL");

    let reloaded = read_jsonl(std::io::Cursor::new(first.clone())).unwrap();
    let original = run_campaign_collect(&config).unwrap();
    assert_eq!(reloaded, original, "persisted dataset round-trips losslessly");

    let mut other = config.clone();
    other.seed = SEED + 1;
    assert_ne!(render(&other), first, "seed must matter");
    println!(
        "criterion 8: PASS  {} bytes byte-identical across runs, lossless reload",
        first.len()
    );
}

#[test]
fn criterion_9_scenario_accounting() {
    for (preset, _, _) in COLD_TARGETS {
        let result = campaign(preset);
        let records = &result.records;

        // Partition counts: per (tick, tier) exactly 2 sequential + 50 burst.
        let mut per_tick_tier: BTreeMap<(u64, u32), (u64, u64)> = BTreeMap::new();
        for record in records {
            // The sequential pair's second request lands inside the tick of
            // its first, so bucketing by hour assigns both to the tick.
            let tick = record.request_time.as_millis() / MILLIS_PER_HOUR;
            let entry = per_tick_tier.entry((tick, record.tier_mb)).or_default();
            match record.scenario {
                Scenario::Sequential => entry.0 += 1,
                Scenario::Burst => entry.1 += 1,
            }
        }
        for (&(tick, tier), &(sequential, burst)) in &per_tick_tier {
            assert_eq!(
                (sequential, burst),
                (2, 50),
                "{preset} tick {tick} tier {tier}"
            );
        }

        // Cold + warm = total for every (platform, tier) partition.
        let mut per_tier: BTreeMap<u32, (u64, u64, u64)> = BTreeMap::new();
        for record in records {
            let entry = per_tier.entry(record.tier_mb).or_default();
            entry.0 += 1;
            if record.is_cold {
                entry.1 += 1;
            } else {
                entry.2 += 1;
            }
        }
        for (&tier, &(total, cold, warm)) in &per_tier {
            assert_eq!(cold + warm, total, "{preset} tier {tier}");
        }
        let ticks = records
            .iter()
            .map(|r| r.request_time.as_millis() / MILLIS_PER_HOUR)
            .max()
            .unwrap()
            + 1;
        println!(
            "criterion 9 [{preset}]: PASS  {} ticks x {} tiers x 52 = {} records",
            ticks,
            per_tier.len(),
            records.len()
        );
    }
}
