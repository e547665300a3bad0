//! The observer: drives measurement scenarios against a simulated platform,
//! stamps observer-side timings onto the probe reports, and persists the
//! records.
//!
//! Each campaign tick runs two scenarios per (profile, tier): a sequential
//! pair (a definitive cold and warm measurement) and a concurrent burst
//! that forces the platform to scale out.

pub mod sink;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::probe::ProbeReport;
use crate::profile::PlatformProfile;
use crate::sim::{CompletedInvocation, PlatformPool, SimError};
use crate::time::VirtualTime;

pub use sink::{persist, read_jsonl, DatasetError, HttpSink, JsonlSink, RecordSink, SinkError};

/// Which scenario produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Sequential,
    Burst,
}

/// Observer-side envelope around one probe report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvocationRecord {
    pub platform: String,
    pub region: String,
    pub tier_mb: u32,
    pub request_time: VirtualTime,
    pub response_time: VirtualTime,
    pub total_runtime_ms: f64,
    pub start_lag_ms: f64,
    pub is_cold: bool,
    pub scenario: Scenario,
    pub report: ProbeReport,
}

impl InvocationRecord {
    fn from_outcome(outcome: CompletedInvocation, scenario: Scenario, profile: &PlatformProfile) -> Self {
        InvocationRecord {
            platform: profile.name.clone(),
            region: profile.region.clone(),
            tier_mb: outcome.report.tier_mb,
            request_time: outcome.request_time,
            response_time: outcome.response_time,
            total_runtime_ms: outcome.total_runtime_ms,
            start_lag_ms: outcome.start_lag_ms,
            is_cold: outcome.is_cold,
            scenario,
            report: outcome.report,
        }
    }
}

/// One platform's slice of a campaign.
#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub profile: PlatformProfile,
    /// Tiers to exercise; defaults to every configured tier.
    pub tiers: Vec<u32>,
}

impl CampaignRun {
    pub fn all_tiers(profile: PlatformProfile) -> Self {
        let tiers = profile.memory_tiers();
        CampaignRun { profile, tiers }
    }
}

/// Campaign parameters.
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub runs: Vec<CampaignRun>,
    /// Milliseconds between ticks; default one hour.
    pub interval_ms: u64,
    /// Total campaign span in milliseconds; default 30 days.
    pub duration_ms: u64,
    /// Invocations in the concurrent burst; default 50.
    pub burst_size: u32,
    pub seed: u64,
}

impl CampaignConfig {
    pub fn new(runs: Vec<CampaignRun>, seed: u64) -> Self {
        CampaignConfig {
            runs,
            interval_ms: crate::time::MILLIS_PER_HOUR,
            duration_ms: 30 * crate::time::MILLIS_PER_DAY,
            burst_size: 50,
            seed,
        }
    }

    pub fn ticks(&self) -> u64 {
        self.duration_ms / self.interval_ms
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.interval_ms == 0 {
            return Err(CampaignError::Config("interval must be positive".into()));
        }
        if self.duration_ms < self.interval_ms {
            return Err(CampaignError::Config(
                "duration must cover at least one tick".into(),
            ));
        }
        if self.burst_size == 0 {
            return Err(CampaignError::Config("burst size must be at least 1".into()));
        }
        if self.runs.is_empty() {
            return Err(CampaignError::Config("no profiles configured".into()));
        }
        for run in &self.runs {
            if run.tiers.is_empty() {
                return Err(CampaignError::Config(format!(
                    "profile {} has no tiers selected",
                    run.profile.name
                )));
            }
            for &tier in &run.tiers {
                if run.profile.tier(tier).is_none() {
                    return Err(CampaignError::Config(format!(
                        "tier {tier} is not configured for profile {}",
                        run.profile.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sink(#[from] SinkError),
}

/// Aggregate summary printed after a campaign.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub records: u64,
    pub cold: u64,
    pub warm: u64,
}

impl CampaignSummary {
    pub fn cold_fraction(&self) -> f64 {
        if self.records == 0 {
            0.0
        } else {
            self.cold as f64 / self.records as f64
        }
    }

    fn add(&mut self, record: &InvocationRecord) {
        self.records += 1;
        if record.is_cold {
            self.cold += 1;
        } else {
            self.warm += 1;
        }
    }
}

/// Two sequential invocations: the second is issued only after the first
/// response, giving one definitive cold and one definitive warm sample on a
/// fresh platform.
pub fn run_sequential_pair<R: rand::Rng>(
    pool: &mut PlatformPool,
    tier_mb: u32,
    t: VirtualTime,
    rng: &mut R,
) -> Result<[InvocationRecord; 2], SimError> {
    let profile = pool.profile().clone();
    let first = pool.execute_invocation(tier_mb, t, rng)?;
    let second = pool.execute_invocation(tier_mb, first.response_time, rng)?;
    Ok([
        InvocationRecord::from_outcome(first, Scenario::Sequential, &profile),
        InvocationRecord::from_outcome(second, Scenario::Sequential, &profile),
    ])
}

/// `n` logically-concurrent invocations, all stamped with the same request
/// time; the platform scales containers and VMs as needed.
pub fn run_concurrent_burst<R: rand::Rng>(
    pool: &mut PlatformPool,
    tier_mb: u32,
    n: u32,
    t: VirtualTime,
    rng: &mut R,
) -> Result<Vec<InvocationRecord>, SimError> {
    let profile = pool.profile().clone();
    (0..n)
        .map(|_| {
            pool.execute_invocation(tier_mb, t, rng)
                .map(|outcome| InvocationRecord::from_outcome(outcome, Scenario::Burst, &profile))
        })
        .collect()
}

/// Run a full campaign, streaming records into `sink` in deterministic
/// order: ticks ascending, then profiles, then tiers, pair before burst.
pub fn run_campaign(
    config: &CampaignConfig,
    sink: &mut dyn RecordSink,
) -> Result<CampaignSummary, CampaignError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pools: Vec<PlatformPool> = config
        .runs
        .iter()
        .map(|run| PlatformPool::new(run.profile.clone()))
        .collect();

    let mut summary = CampaignSummary::default();
    for tick in 0..config.ticks() {
        let t = VirtualTime::from_millis(tick * config.interval_ms);
        for (run, pool) in config.runs.iter().zip(pools.iter_mut()) {
            for &tier in &run.tiers {
                let pair = run_sequential_pair(pool, tier, t, &mut rng)?;
                let burst = run_concurrent_burst(pool, tier, config.burst_size, t, &mut rng)?;
                for record in pair.into_iter().chain(burst) {
                    summary.add(&record);
                    if let Err(err) = sink.write_record(&record) {
                        // Abort, but leave everything already accepted flushed.
                        let _ = sink.flush();
                        return Err(err.into());
                    }
                }
            }
        }
    }
    sink.flush()?;
    Ok(summary)
}

/// Run a campaign and collect the dataset in memory.
pub fn run_campaign_collect(
    config: &CampaignConfig,
) -> Result<Vec<InvocationRecord>, CampaignError> {
    let mut records = Vec::new();
    {
        let mut sink = sink::VecSink::new(&mut records);
        run_campaign(config, &mut sink)?;
    }
    Ok(records)
}
