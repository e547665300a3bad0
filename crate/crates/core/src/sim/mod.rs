//! Deterministic simulation of a FaaS platform.
//!
//! A [`PlatformPool`] owns the VM/container state of one platform archetype.
//! Invocations execute against a virtual clock: the cold-start delay is
//! sampled from the tier's log-normal distribution, the probe's work is
//! metered through [`env::SimEnvironment`], and the response lands at
//! request time + lag + metered work. Identical profile, seed and call
//! sequence reproduce byte-identical results.

pub mod env;
pub mod interference;
pub mod pool;
pub mod procfs;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};

pub use env::SimEnvironment;
pub use interference::interference_multiplier;
pub use pool::{ExecutionVm, FunctionContainer, PlatformPool, PoolStats, SimError, TmpFile};
pub use procfs::render_procfs;

use crate::probe::{run_probe, ExecutionEnv, ProbeReport};
use crate::profile::PlatformProfile;
use crate::time::VirtualTime;

/// Sample a cold-start delay for a tier: log-normal, parameterized so the
/// distribution's mean equals the configured mean.
pub fn cold_start_delay<R: Rng>(
    profile: &PlatformProfile,
    tier_mb: u32,
    rng: &mut R,
) -> Result<f64, SimError> {
    let tier = profile.tier(tier_mb).ok_or_else(|| SimError::UnknownTier {
        tier_mb,
        platform: profile.name.clone(),
    })?;
    let sigma = tier.cold_start_dispersion;
    let mu = tier.cold_start_mean_ms.ln() - sigma * sigma / 2.0;
    let dist = LogNormal::new(mu, sigma).expect("validated distribution parameters");
    Ok(dist.sample(rng))
}

/// The simulator-side outcome of one invocation.
#[derive(Debug, Clone)]
pub struct CompletedInvocation {
    pub request_time: VirtualTime,
    pub response_time: VirtualTime,
    pub start_lag_ms: f64,
    pub total_runtime_ms: f64,
    pub is_cold: bool,
    pub report: ProbeReport,
    /// Pool keys, for state inspection.
    pub vm_key: u64,
    pub container_key: u64,
}

impl PlatformPool {
    /// Execute one invocation end to end: acquire a container (provisioning
    /// a VM if needed), apply the cold-start delay when fresh, run the probe
    /// against the environment, and advance the container to its response
    /// time.
    pub fn execute_invocation<R: Rng>(
        &mut self,
        tier_mb: u32,
        request_time: VirtualTime,
        rng: &mut R,
    ) -> Result<CompletedInvocation, SimError> {
        let (container_key, is_new) = self.acquire_container(tier_mb, request_time, rng)?;
        let start_lag_ms = if is_new {
            cold_start_delay(&self.profile, tier_mb, rng)?.round()
        } else {
            0.0
        };
        let probe_start = request_time + start_lag_ms as u64;
        let multiplier = interference_multiplier(&self.profile.interference, request_time);

        let host_key = self.containers[&container_key].host_vm;
        let (report, work_elapsed_ms) = {
            let profile = &self.profile;
            let tier = profile.tier(tier_mb).expect("tier validated by acquire");
            let vm = self.vms.get(&host_key).expect("host vm exists");
            let container = self
                .containers
                .get_mut(&container_key)
                .expect("container exists");
            let mut env =
                SimEnvironment::new(profile, tier, vm, container, probe_start, multiplier, rng);
            let report = run_probe(&mut env);
            let elapsed = env.elapsed_ms();
            (report, elapsed)
        };

        let work_ms = work_elapsed_ms.ceil() as u64;
        let response_time = probe_start + work_ms;
        debug_assert_eq!(
            report.classified_cold(),
            is_new,
            "probe classification must match pool state"
        );
        self.complete_invocation(
            container_key,
            report.function_id.clone(),
            response_time,
            work_ms,
            start_lag_ms as u64,
        );

        Ok(CompletedInvocation {
            request_time,
            response_time,
            start_lag_ms,
            total_runtime_ms: response_time.since(request_time) as f64,
            is_cold: is_new,
            report,
            vm_key: host_key,
            container_key,
        })
    }
}
