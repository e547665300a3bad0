//! faasbench-core: a deterministic, virtual-clock simulator of serverless
//! platform archetypes coupled to the measurement harness that studies them.
//!
//! The crate is organized along the measurement pipeline:
//!
//! - [`profile`]: platform archetype configuration (four shipped presets).
//! - [`sim`]: the platform itself: VM/container pool, reuse policy,
//!   cold-start sampling, time-sliced CPU shares, disk rates, diurnal
//!   interference, and a pseudo-procfs view.
//! - [`probe`]: the in-function payload that parses that view, identifies
//!   its container, classifies cold/warm and runs the CPU and disk
//!   benchmarks.
//! - [`observer`]: the campaign driver (sequential pair + concurrent burst,
//!   hourly over weeks) and record sinks.
//! - [`fingerprint`]: CPU model decoding and topology aggregation.
//! - [`analysis`]: statistics, smoothing, diurnal fitting, CSV export.
//!
//! Everything is deterministic: one seed reproduces a campaign byte for
//! byte.

pub mod analysis;
pub mod fingerprint;
pub mod observer;
pub mod probe;
pub mod profile;
pub mod sim;
pub mod time;

pub use analysis::{DiurnalFit, Metric, TierStats, TimeSeries};
pub use fingerprint::{CpuidTable, DecodedCpu, TopologyReport};
pub use observer::{
    run_campaign, run_campaign_collect, run_concurrent_burst, run_sequential_pair, CampaignConfig,
    CampaignRun, CampaignSummary, InvocationRecord, Scenario,
};
pub use probe::{run_probe, ExecutionEnv, ProbeReport};
pub use profile::{load_preset, load_profile, IdStrategy, PlatformProfile, PRESET_NAMES};
pub use sim::{cold_start_delay, interference_multiplier, CompletedInvocation, PlatformPool};
pub use time::VirtualTime;
