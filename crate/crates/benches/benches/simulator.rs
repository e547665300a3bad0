//! Benchmarks for the hot paths: single invocations, a campaign tick, the
//! CPU benchmark resolution and the diurnal fit.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use faasbench_core::analysis::{fit_diurnal, hourly_mean_series, SeriesMetric};
use faasbench_core::observer::{run_campaign_collect, CampaignConfig, CampaignRun};
use faasbench_core::profile::load_preset;
use faasbench_core::sim::PlatformPool;
use faasbench_core::time::{VirtualTime, MILLIS_PER_HOUR};

fn bench_execute_invocation(c: &mut Criterion) {
    let mut group = c.benchmark_group("execute_invocation");
    group.throughput(Throughput::Elements(1));
    for preset in ["aws-like", "google-like"] {
        group.bench_function(preset, |b| {
            let profile = load_preset(preset).unwrap();
            let mut pool = PlatformPool::new(profile);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut hour = 0u64;
            b.iter(|| {
                hour += 1;
                let t = VirtualTime::from_millis(hour * MILLIS_PER_HOUR);
                black_box(pool.execute_invocation(128, t, &mut rng).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_campaign_day(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign_day");
    group.sample_size(10);
    group.bench_function("aws-like_24_ticks", |b| {
        b.iter(|| {
            let profile = load_preset("aws-like").unwrap();
            let mut config = CampaignConfig::new(vec![CampaignRun::all_tiers(profile)], 42);
            config.duration_ms = 24 * MILLIS_PER_HOUR;
            black_box(run_campaign_collect(&config).unwrap())
        })
    });
    group.finish();
}

fn bench_diurnal_fit(c: &mut Criterion) {
    let profile = load_preset("aws-like").unwrap();
    let mut config = CampaignConfig::new(vec![CampaignRun::all_tiers(profile)], 42);
    config.duration_ms = 5 * 24 * MILLIS_PER_HOUR;
    let records = run_campaign_collect(&config).unwrap();
    let series = hourly_mean_series(&records, SeriesMetric::DiskSecondsPerMb).unwrap();
    c.bench_function("fit_diurnal_120_points", |b| {
        b.iter(|| black_box(fit_diurnal(&series).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_execute_invocation,
    bench_campaign_day,
    bench_diurnal_fit
);
criterion_main!(benches);
